"""Well-founded semantics for recursive shape constraints.

Shape assignments are three-valued: a pair of positive and negative
literal sets over (shape name, node).  Expressions are evaluated to a
lower bound (nodes certainly satisfying the expression) or an upper
bound (nodes not certainly violating it); the two coincide on total
assignments.  The positive-inference operator T, the greatest unfounded
set U, and their combination W(S) = T(S) + negated U(S) drive the least
fixed point computed by ``well_founded_model``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional

from .model import (And, Concept, ConstraintSet, DataGraph, Document,
                    EngineError, Exists, ForAll, IncompatibleGraph, Nominal,
                    NotShape, Or, ShapeExpr, ShapeRef, Target, TARGET_CLASS,
                    TARGET_NODE, TARGET_ROLE, check_compatible)

Literal = tuple[str, str]  # (shape name, node)


class Polarity(enum.Enum):
    LOWER = "lower"
    UPPER = "upper"


@dataclass(frozen=True)
class ShapeAssignment:
    """Positive and negative shape literals; consistent unless built unchecked.

    Internal operators combine an assignment with negated unfounded atoms,
    which may overlap the positive part mid-computation; those
    intermediates are built with ``check=False`` and never escape.
    """

    positive: frozenset[Literal] = frozenset()
    negative: frozenset[Literal] = frozenset()

    @staticmethod
    def make(positive: Iterable[Literal] = (), negative: Iterable[Literal] = (),
             check: bool = True) -> "ShapeAssignment":
        pos = frozenset(positive)
        neg = frozenset(negative)
        if check and pos & neg:
            raise EngineError(f"inconsistent shape assignment: {sorted(pos & neg)}")
        return ShapeAssignment(pos, neg)

    def is_consistent(self) -> bool:
        return not (self.positive & self.negative)

    def is_total(self, shapes: Iterable[str], domain: Iterable[str]) -> bool:
        names = tuple(shapes)
        dom = tuple(domain)
        have = self.positive | self.negative
        return all((s, a) in have for s in names for a in dom)

    def issubset(self, other: "ShapeAssignment") -> bool:
        return self.positive <= other.positive and self.negative <= other.negative

    def __len__(self) -> int:
        return len(self.positive) + len(self.negative)

    def literals(self) -> list[str]:
        """Rendered literals, positives before negatives (plain string sort)."""
        out = [f"{s}({a})" for s, a in self.positive]
        out += [f"¬{s}({a})" for s, a in self.negative]
        return sorted(out)


def format_trace(trace: list["ShapeAssignment"]) -> str:
    """One line per iterate, numbered from 1: ``1: s(6)``, ``2: s(6) ¬t(6)`` ..."""
    return "\n".join(f"{i}: " + " ".join(s.literals()) for i, s in enumerate(trace, start=1))


# ---------------------------------------------------------------------------
# three-valued expression evaluation
# ---------------------------------------------------------------------------

def eval_expr(expr: ShapeExpr, g: DataGraph, assign: ShapeAssignment,
              pol: Polarity) -> frozenset[str]:
    """Lower or upper bound of an expression's extension under an assignment.

    Shape references and their negations read the assignment: the lower
    bound of ``s`` is the set of nodes with a positive literal, its upper
    bound is everything not negated; symmetrically for ``!s``.  All other
    rows are the same for both polarities and recurse structurally.
    """
    dom = g.domain
    lower = pol is Polarity.LOWER

    def ev(e: ShapeExpr) -> frozenset[str]:
        if isinstance(e, ShapeRef):
            if lower:
                return frozenset(a for s, a in assign.positive if s == e.name)
            return frozenset(a for a in dom if (e.name, a) not in assign.negative)
        if isinstance(e, NotShape):
            if lower:
                return frozenset(a for s, a in assign.negative if s == e.name)
            return frozenset(a for a in dom if (e.name, a) not in assign.positive)
        if isinstance(e, Nominal):
            return frozenset({e.node}) & dom
        if isinstance(e, Concept):
            return g.concept_ext(e.name)
        if isinstance(e, And):
            return ev(e.left) & ev(e.right)
        if isinstance(e, Or):
            return ev(e.left) | ev(e.right)
        if isinstance(e, Exists):
            body = ev(e.body)
            return frozenset(a for a in dom if g.successors(a, e.role) & body)
        if isinstance(e, ForAll):
            body = ev(e.body)
            return frozenset(a for a in dom if g.successors(a, e.role) <= body)
        raise TypeError(f"not a shape expression: {e!r}")

    return ev(expr)


# ---------------------------------------------------------------------------
# the W operator and its least fixed point
# ---------------------------------------------------------------------------

def t_operator(g: DataGraph, c: ConstraintSet, assign: ShapeAssignment) -> frozenset[Literal]:
    """Positive inferences: s(a) for every constraint s <- phi with a in the lower bound."""
    out: set[Literal] = set()
    for s, body in c.items():
        for a in eval_expr(body, g, assign, Polarity.LOWER):
            out.add((s, a))
    return frozenset(out)


def greatest_unfounded(g: DataGraph, c: ConstraintSet,
                       assign: ShapeAssignment) -> frozenset[Literal]:
    """The greatest unfounded set of shape atoms w.r.t. the assignment.

    Computed as a decreasing iteration from all candidate atoms
    (defined shapes x domain): keep s(a) while a falls outside the upper
    bound of s's body once all remaining candidates are assumed false.
    The fixpoint is the unique greatest set satisfying the unfoundedness
    condition; tests check this against brute force on tiny instances.
    """
    u: set[Literal] = {(s, a) for s in c.names() for a in g.domain}
    while True:
        combined = ShapeAssignment.make(assign.positive, assign.negative | u, check=False)
        nxt: set[Literal] = set()
        for s, body in c.items():
            upper = eval_expr(body, g, combined, Polarity.UPPER)
            for a in g.domain:
                if (s, a) in u and a not in upper:
                    nxt.add((s, a))
        if nxt == u:
            return frozenset(u)
        u = nxt


def w_operator(g: DataGraph, c: ConstraintSet, assign: ShapeAssignment) -> ShapeAssignment:
    """One well-founded step: T(S) positively, the greatest unfounded set negatively."""
    pos = t_operator(g, c, assign)
    neg = greatest_unfounded(g, c, assign)
    if pos & neg:
        raise EngineError(
            f"W produced an inconsistent assignment (engine bug): {sorted(pos & neg)}")
    return ShapeAssignment(pos, neg)


@dataclass(frozen=True)
class WellFoundedResult:
    model: ShapeAssignment
    trace: tuple[ShapeAssignment, ...]


def well_founded_model(g: DataGraph, c: ConstraintSet) -> WellFoundedResult:
    """Least fixed point of W, iterated from the empty assignment.

    The trace lists every iterate W^1, W^2, ... up to and including the
    fixpoint.  On a finite graph the chain is increasing and stabilizes
    within |defined shapes| * |domain| + 1 steps; exceeding that bound
    means the engine is broken, not the input.
    """
    bound = len(c) * len(g.domain) + 1
    cur = ShapeAssignment()
    trace: list[ShapeAssignment] = []
    for _ in range(bound + 1):
        nxt = w_operator(g, c, cur)
        if nxt == cur:
            return WellFoundedResult(cur, tuple(trace))
        if not cur.issubset(nxt):
            raise EngineError("W iteration is not increasing (engine bug)")
        trace.append(nxt)
        cur = nxt
    raise EngineError("W iteration failed to stabilize within its proven bound")


# ---------------------------------------------------------------------------
# target validation
# ---------------------------------------------------------------------------

def _target_subjects(g: DataGraph, t: Target) -> frozenset[str]:
    if t.kind == TARGET_NODE:
        return frozenset({t.subject})
    if t.kind == TARGET_CLASS:
        return g.concept_ext(t.subject)
    return frozenset(a for a, _b in g.role_ext(t.subject))


def validates(g: DataGraph, d: Document, model: Optional[ShapeAssignment] = None) -> bool:
    """True iff the model satisfies every target of the document on g.

    Node targets need the shape at the named node; class targets at every
    member of the concept; role targets at every subject of the role's
    extension (for an inverted role, subjects of the converse).  Raises
    IncompatibleGraph when the graph does not mention every individual of
    the document, because validation is undefined there.
    """
    if not check_compatible(g, d):
        missing = sorted(set(d.individuals()) - set(g.domain))
        raise IncompatibleGraph(f"individuals not in the graph: {missing}")
    if model is None:
        model = well_founded_model(g, d.constraints).model
    for t in d.targets:
        for a in _target_subjects(g, t):
            if (t.shape, a) not in model.positive:
                return False
    return True
