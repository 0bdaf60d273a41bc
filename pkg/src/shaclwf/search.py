"""Bounded satisfiability and implication search.

These are semi-decision helpers: they exhaustively enumerate candidate
graphs up to a node bound (isomorphism-reduced, named nodes pinned) and
test each one.  A witness is definitive — it replays through the
well-founded engine before being returned.  Absence of a witness up to
the bound proves nothing beyond the bound, and the outcome says so.

Two evaluation routes exist for the well-founded semantics:

* ``mu`` — compile the shape/target formula once and run the kernel's
  bitmask scanner over packed graph codes (fast; the default), then
  replay any hit through the wf-engine;
* ``wf`` — build each graph and run the well-founded fixpoint directly
  (slow; the reference).

The two must agree everywhere (the translation-correctness property);
the test suite cross-checks them.  Searches under the supported-model
semantics always use the direct route, since the translation targets
the well-founded semantics only.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterator, Optional

from . import kernel
from .kernel import Signature
from .model import (
    ConstraintSet,
    DataGraph,
    Document,
    EngineError,
    ShapeName,
    TranslationBudget,
    restrict_to,
)
from .mu import eval as mu_eval
from .supported import DEFAULT_ENUM_BITS, enumerate_supported_models
from .translate import add_hub, doc_sat_formula, fresh_role, theta, translate
from .wf import validates, well_founded_model

DEFAULT_MAX_NODES = 4

WF = "wf"
SUPPORTED = "supported"


# ---------------------------------------------------------------------------
# outcome record
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchOutcome:
    """Result of a bounded search.

    ``witness`` is the first matching graph in enumeration order, or
    None.  ``bound`` is the largest node count fully searched (equal to
    the witness size when one was found).  ``complete`` is True iff the
    whole space up to the requested bound was examined without finding
    a witness — only then does the outcome certify NoWitnessUpTo(bound).
    """

    witness: Optional[DataGraph]
    bound: int
    graphs_examined: int
    elapsed_ms: float
    complete: bool

    @property
    def found(self) -> bool:
        return self.witness is not None


# ---------------------------------------------------------------------------
# signatures and enumeration
# ---------------------------------------------------------------------------

def signature_of(c: ConstraintSet) -> Signature:
    return Signature(tuple(c.concept_names()), tuple(c.role_names()),
                     tuple(c.nominals()))


def signature_of_documents(*docs: Document) -> Signature:
    concepts: set[str] = set()
    roles: set[str] = set()
    required: set[str] = set()
    for d in docs:
        concepts.update(d.concept_names())
        roles.update(d.role_names())
        required.update(d.individuals())
    return Signature(tuple(sorted(concepts)), tuple(sorted(roles)),
                     tuple(sorted(required)))


def enumerate_graphs(sig: Signature, max_nodes: int) -> Iterator[DataGraph]:
    """All graphs over ``sig`` with ≤ max_nodes nodes, one per isomorphism
    class (named nodes fixed pointwise), smallest first, deterministic."""
    if len(sig.required) > max_nodes:
        raise ValueError(
            f"{len(sig.required)} required nodes exceed max_nodes={max_nodes}")
    for n in range(len(sig.required), max_nodes + 1):
        for code in kernel.iter_codes(n, sig):
            yield kernel.code_to_graph(code, n, sig)


# ---------------------------------------------------------------------------
# the generic bounded scan
# ---------------------------------------------------------------------------

def _deadline_ns(budget_ms: Optional[float]) -> int:
    if budget_ms is None:
        return -1
    return time.monotonic_ns() + int(budget_ms * 1e6)


def _scan_sizes(sig: Signature, max_nodes: int, prog, mode: int, prog2,
                budget_graphs: Optional[int], deadline: int,
                confirm) -> SearchOutcome:
    """Kernel scan over sizes |required|..max_nodes; confirm(g) replays a hit."""
    start = time.monotonic()
    examined = 0
    remaining = -1 if budget_graphs is None else budget_graphs
    for n in range(len(sig.required), max_nodes + 1):
        code, seen, exhausted = kernel.scan(
            n, sig, prog, mode, prog2, limit_graphs=remaining, deadline_ns=deadline)
        examined += seen
        if remaining >= 0:
            remaining -= seen
        elapsed = (time.monotonic() - start) * 1000.0
        if code is not None:
            g = kernel.code_to_graph(code, n, sig)
            if not confirm(g):
                raise EngineError(
                    "internal error: kernel witness failed well-founded replay")
            return SearchOutcome(g, n, examined, elapsed, False)
        if not exhausted:
            return SearchOutcome(None, n - 1, examined, elapsed, False)
    elapsed = (time.monotonic() - start) * 1000.0
    return SearchOutcome(None, max_nodes, examined, elapsed, True)


def _search_direct(sig: Signature, max_nodes: int, predicate,
                   budget_graphs: Optional[int], deadline: int) -> SearchOutcome:
    """Reference route: build every graph and apply ``predicate`` directly."""
    start = time.monotonic()
    examined = 0
    for n in range(len(sig.required), max_nodes + 1):
        for code in kernel.iter_codes(n, sig):
            if budget_graphs is not None and examined >= budget_graphs:
                return SearchOutcome(None, n - 1, examined,
                                     (time.monotonic() - start) * 1000.0, False)
            if deadline >= 0 and time.monotonic_ns() > deadline:
                return SearchOutcome(None, n - 1, examined,
                                     (time.monotonic() - start) * 1000.0, False)
            examined += 1
            g = kernel.code_to_graph(code, n, sig)
            if predicate(g):
                return SearchOutcome(g, n, examined,
                                     (time.monotonic() - start) * 1000.0, False)
    return SearchOutcome(None, max_nodes, examined,
                         (time.monotonic() - start) * 1000.0, True)


# ---------------------------------------------------------------------------
# public searches
# ---------------------------------------------------------------------------

def shape_sat_bounded(c: ConstraintSet, s: ShapeName,
                      max_nodes: int = DEFAULT_MAX_NODES, *,
                      semantics: str = WF,
                      budget_ms: Optional[float] = None,
                      budget_graphs: Optional[int] = None,
                      method: str = "mu",
                      budget_bits: int = DEFAULT_ENUM_BITS) -> SearchOutcome:
    """Search for a graph with a node validating ``s`` under ``c``."""
    cs = restrict_to(c, s)
    sig = signature_of(cs)
    deadline = _deadline_ns(budget_ms)

    def wf_hit(g: DataGraph) -> bool:
        model = well_founded_model(g, cs).model
        return any((s, a) in model.positive for a in g.domain)

    if semantics == SUPPORTED:
        def supported_hit(g: DataGraph) -> bool:
            return any(any((s, a) in m.positive for a in g.domain)
                       for m in enumerate_supported_models(g, cs, budget_bits))
        return _search_direct(sig, max_nodes, supported_hit, budget_graphs, deadline)

    if method == "mu":
        try:
            prog = kernel.compile_mu(translate(cs, s), sig)
        except TranslationBudget:
            method = "wf"
        else:
            return _scan_sizes(sig, max_nodes, prog, kernel.MODE_SAT, None,
                               budget_graphs, deadline, wf_hit)
    return _search_direct(sig, max_nodes, wf_hit, budget_graphs, deadline)


def doc_sat_bounded(d: Document, max_nodes: int = DEFAULT_MAX_NODES, *,
                    semantics: str = WF,
                    budget_ms: Optional[float] = None,
                    budget_graphs: Optional[int] = None,
                    method: str = "mu",
                    budget_bits: int = DEFAULT_ENUM_BITS) -> SearchOutcome:
    """Search for a compatible graph that validates the document."""
    sig = signature_of_documents(d)
    deadline = _deadline_ns(budget_ms)

    def wf_hit(g: DataGraph) -> bool:
        return validates(g, d)

    if semantics == SUPPORTED:
        def supported_hit(g: DataGraph) -> bool:
            return brave_validates(g, d, budget_bits)
        return _search_direct(sig, max_nodes, supported_hit, budget_graphs, deadline)

    if method == "mu":
        try:
            prog = kernel.compile_mu(theta(d), sig)
        except TranslationBudget:
            method = "wf"
        else:
            return _scan_sizes(sig, max_nodes, prog, kernel.MODE_VALID, None,
                               budget_graphs, deadline, wf_hit)
    return _search_direct(sig, max_nodes, wf_hit, budget_graphs, deadline)


def implies_bounded(d1: Document, d2: Document,
                    max_nodes: int = DEFAULT_MAX_NODES, *,
                    semantics: str = WF,
                    budget_ms: Optional[float] = None,
                    budget_graphs: Optional[int] = None,
                    method: str = "mu",
                    budget_bits: int = DEFAULT_ENUM_BITS) -> SearchOutcome:
    """Search for a counterexample: a graph validating d1 but not d2.

    A witness refutes the implication; exhaustion up to the bound is
    evidence only (NoWitnessUpTo).  Graphs are enumerated over the joint
    signature with the individuals of both documents pinned, so both
    validation questions are always defined.
    """
    sig = signature_of_documents(d1, d2)
    deadline = _deadline_ns(budget_ms)

    def wf_hit(g: DataGraph) -> bool:
        return validates(g, d1) and not validates(g, d2)

    if semantics == SUPPORTED:
        def supported_hit(g: DataGraph) -> bool:
            return (brave_validates(g, d1, budget_bits)
                    and not brave_validates(g, d2, budget_bits))
        return _search_direct(sig, max_nodes, supported_hit, budget_graphs, deadline)

    if method == "mu":
        try:
            prog1 = kernel.compile_mu(theta(d1), sig)
            prog2 = kernel.compile_mu(theta(d2), sig)
        except TranslationBudget:
            method = "wf"
        else:
            return _scan_sizes(sig, max_nodes, prog1, kernel.MODE_COUNTER, prog2,
                               budget_graphs, deadline, wf_hit)
    return _search_direct(sig, max_nodes, wf_hit, budget_graphs, deadline)


# ---------------------------------------------------------------------------
# cross-checks
# ---------------------------------------------------------------------------

def brave_validates(g: DataGraph, d: Document,
                    budget_bits: int = DEFAULT_ENUM_BITS) -> bool:
    """True iff some supported model of the constraints satisfies all targets."""
    return any(validates(g, d, model=m)
               for m in enumerate_supported_models(g, d.constraints, budget_bits))


@dataclass(frozen=True)
class CrosscheckReport:
    wf_extension: frozenset[str]
    mu_extension: frozenset[str]

    @property
    def disagreements(self) -> frozenset[str]:
        return self.wf_extension ^ self.mu_extension

    @property
    def agree(self) -> bool:
        return self.wf_extension == self.mu_extension


def crosscheck(g: DataGraph, c: ConstraintSet, s: ShapeName) -> CrosscheckReport:
    """Compare the two validation routes for shape ``s`` node by node.

    The well-founded route computes the fixpoint model of the closure of
    ``s``; the formula route evaluates the positive translation on the
    graph.  The report's disagreement set must always be empty.
    """
    cs = restrict_to(c, s)
    model = well_founded_model(g, cs).model
    wf_ext = frozenset(a for a in g.domain if (s, a) in model.positive)
    mu_ext = mu_eval(translate(cs, s), g)
    return CrosscheckReport(wf_ext, mu_ext)


def doc_satisfied_via_lambda(g: DataGraph, d: Document) -> bool:
    """Check g ⊨ d by evaluating the document-satisfiability formula.

    Materializes the observation point for the fresh role as a hub node
    with edges to every node (and itself), then asks whether the hub
    satisfies the formula.  Agrees with ``validates`` on compatible
    graphs; used to cross-check the target encoding.
    """
    p = fresh_role(d)
    hub = "__hub"
    extended = add_hub(g, p, hub)
    return hub in mu_eval(doc_sat_formula(d), extended)
