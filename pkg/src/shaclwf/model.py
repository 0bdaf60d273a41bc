"""Core data model: names, roles, shape expressions, graphs, constraints, documents.

Shape expressions follow the grammar

    phi ::= s | a | A | !s | phi & phi | phi | phi | all r.phi | some r.phi

where ``s`` ranges over shape names, ``a`` over individual (node) names,
``A`` over concept names and ``r`` over roles (a role name, possibly
inverted).  Negation applies to shape names only.  The four name spaces
are disjoint; by convention concept names start with an uppercase letter
and everything else starts lowercase.  A data graph is a finite set of
concept and role assertions; its domain is exactly the set of nodes that
occur in some assertion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Optional, Union

NodeId = str
ConceptName = str
RoleName = str
ShapeName = str

# The distinguished concept with every graph's domain as its intended
# extension.  We treat it as an ordinary concept name: nothing in the
# engines special-cases it, and the mu-calculus layer only ever uses it
# inside tautologies/contradictions (Top | !Top, Top & !Top) whose value
# does not depend on the extension.
TOP_CONCEPT: ConceptName = "Top"


# ---------------------------------------------------------------------------
# errors
# ---------------------------------------------------------------------------

class ShaclError(Exception):
    """Base class for all errors raised by this package."""


class UndefinedShape(ShaclError):
    """A shape name is referenced but has no defining constraint."""


class IncompatibleGraph(ShaclError):
    """The graph does not mention every individual named by the document.

    Validation is undefined in this situation, so it is surfaced as an
    error instead of a boolean.
    """


class BudgetExceeded(ShaclError):
    """An enumeration-based operation refused to run beyond its budget."""


class TranslationBudget(ShaclError):
    """The translated formula would exceed the configured node budget."""


class EngineError(ShaclError):
    """An internal invariant was violated (a bug, not a user error)."""


class ParseError(ShaclError):
    """A text input could not be parsed; carries line/column information."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"line {line}, column {column}: {message}" if line else message)
        self.line = line
        self.column = column


class UnboundVariable(ShaclError):
    """A mu-calculus variable was evaluated outside any binder/valuation."""


class FreeVariable(ShaclError):
    """An operation requiring a closed formula received one with free variables."""


# ---------------------------------------------------------------------------
# roles
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Role:
    """A role name with an optional inversion flag; ``invert`` is an involution."""

    name: RoleName
    inverted: bool = False

    def invert(self) -> "Role":
        return Role(self.name, not self.inverted)

    def __str__(self) -> str:
        return self.name + "-" if self.inverted else self.name

    @staticmethod
    def parse(token: str) -> "Role":
        if token.endswith("-"):
            return Role(token[:-1], True)
        return Role(token)


# ---------------------------------------------------------------------------
# shape expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Concept:
    name: ConceptName


@dataclass(frozen=True)
class Nominal:
    node: NodeId


@dataclass(frozen=True)
class ShapeRef:
    name: ShapeName


@dataclass(frozen=True)
class NotShape:
    name: ShapeName


@dataclass(frozen=True)
class And:
    left: "ShapeExpr"
    right: "ShapeExpr"


@dataclass(frozen=True)
class Or:
    left: "ShapeExpr"
    right: "ShapeExpr"


@dataclass(frozen=True)
class Exists:
    role: Role
    body: "ShapeExpr"


@dataclass(frozen=True)
class ForAll:
    role: Role
    body: "ShapeExpr"


ShapeExpr = Union[Concept, Nominal, ShapeRef, NotShape, And, Or, Exists, ForAll]


def sub(item: Union[ShapeExpr, "ConstraintSet"]) -> frozenset:
    """Subexpression closure of a shape expression or of a whole constraint set.

    Follows the recursive definition: atoms map to themselves, the closure
    of ``!s`` contains both ``!s`` and ``s``, boolean/modal operators add
    themselves on top of their arguments' closures, and the closure of a
    constraint set is the union over its bodies.
    """
    if isinstance(item, ConstraintSet):
        out: set = set()
        for body in item.defs.values():
            out |= sub(body)
        return frozenset(out)
    e = item
    if isinstance(e, (Concept, Nominal, ShapeRef)):
        return frozenset({e})
    if isinstance(e, NotShape):
        return frozenset({e, ShapeRef(e.name)})
    if isinstance(e, (And, Or)):
        return frozenset({e}) | sub(e.left) | sub(e.right)
    if isinstance(e, (Exists, ForAll)):
        return frozenset({e}) | sub(e.body)
    raise TypeError(f"not a shape expression: {e!r}")


def shape_deps(e: ShapeExpr) -> Iterator[tuple[ShapeName, bool]]:
    """Yield (referenced shape name, is_negative) pairs of an expression body."""
    if isinstance(e, ShapeRef):
        yield (e.name, False)
    elif isinstance(e, NotShape):
        yield (e.name, True)
    elif isinstance(e, (And, Or)):
        yield from shape_deps(e.left)
        yield from shape_deps(e.right)
    elif isinstance(e, (Exists, ForAll)):
        yield from shape_deps(e.body)


def expr_concepts(e: ShapeExpr) -> frozenset[ConceptName]:
    return frozenset(x.name for x in sub(e) if isinstance(x, Concept))


def expr_nominals(e: ShapeExpr) -> frozenset[NodeId]:
    return frozenset(x.node for x in sub(e) if isinstance(x, Nominal))


def expr_roles(e: ShapeExpr) -> frozenset[RoleName]:
    return frozenset(x.role.name for x in sub(e) if isinstance(x, (Exists, ForAll)))


def uses_inverse(e: ShapeExpr) -> bool:
    return any(isinstance(x, (Exists, ForAll)) and x.role.inverted for x in sub(e))


def uses_nominal(e: ShapeExpr) -> bool:
    return any(isinstance(x, Nominal) for x in sub(e))


# ---------------------------------------------------------------------------
# data graphs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DataGraph:
    """A finite set of assertions ``A(a)`` and ``r(a, b)``.

    The domain is derived: exactly the individuals mentioned in some
    assertion.  Role assertions always use plain (non-inverted) role
    names; inverted roles are evaluated as the converse relation.
    """

    concept_assertions: frozenset[tuple[ConceptName, NodeId]] = frozenset()
    role_assertions: frozenset[tuple[RoleName, NodeId, NodeId]] = frozenset()

    @staticmethod
    def build(concepts: Iterable[tuple[ConceptName, NodeId]] = (),
              roles: Iterable[tuple[RoleName, NodeId, NodeId]] = ()) -> "DataGraph":
        return DataGraph(frozenset(concepts), frozenset(roles))

    @cached_property
    def domain(self) -> frozenset[NodeId]:
        nodes: set[NodeId] = set()
        for _, a in self.concept_assertions:
            nodes.add(a)
        for _, a, b in self.role_assertions:
            nodes.add(a)
            nodes.add(b)
        return frozenset(nodes)

    @cached_property
    def _concept_index(self) -> dict[ConceptName, frozenset[NodeId]]:
        idx: dict[ConceptName, set[NodeId]] = {}
        for c, a in self.concept_assertions:
            idx.setdefault(c, set()).add(a)
        return {c: frozenset(s) for c, s in idx.items()}

    @cached_property
    def _succ_index(self) -> dict[tuple[RoleName, bool], dict[NodeId, frozenset[NodeId]]]:
        fwd: dict[RoleName, dict[NodeId, set[NodeId]]] = {}
        bwd: dict[RoleName, dict[NodeId, set[NodeId]]] = {}
        for r, a, b in self.role_assertions:
            fwd.setdefault(r, {}).setdefault(a, set()).add(b)
            bwd.setdefault(r, {}).setdefault(b, set()).add(a)
        out: dict[tuple[RoleName, bool], dict[NodeId, frozenset[NodeId]]] = {}
        for r, m in fwd.items():
            out[(r, False)] = {a: frozenset(s) for a, s in m.items()}
        for r, m in bwd.items():
            out[(r, True)] = {a: frozenset(s) for a, s in m.items()}
        return out

    def concept_ext(self, name: ConceptName) -> frozenset[NodeId]:
        return self._concept_index.get(name, frozenset())

    def successors(self, node: NodeId, role: Role) -> frozenset[NodeId]:
        return self._succ_index.get((role.name, role.inverted), {}).get(node, frozenset())

    def role_ext(self, role: Role) -> frozenset[tuple[NodeId, NodeId]]:
        if role.inverted:
            return frozenset((b, a) for r, a, b in self.role_assertions if r == role.name)
        return frozenset((a, b) for r, a, b in self.role_assertions if r == role.name)

    def __len__(self) -> int:
        return len(self.domain)


# ---------------------------------------------------------------------------
# constraint sets, targets, documents
# ---------------------------------------------------------------------------

class ConstraintSet:
    """An ordered, head-unique mapping from shape names to their bodies."""

    __slots__ = ("defs", "_hash")

    def __init__(self, defs: Union[Mapping[ShapeName, ShapeExpr],
                                   Iterable[tuple[ShapeName, ShapeExpr]]] = ()):
        items = list(defs.items()) if isinstance(defs, Mapping) else list(defs)
        seen: dict[ShapeName, ShapeExpr] = {}
        for head, body in items:
            if head in seen:
                raise ShaclError(f"shape name {head!r} is the head of more than one constraint")
            seen[head] = body
        self.defs: dict[ShapeName, ShapeExpr] = seen
        self._hash: Optional[int] = None

    def __contains__(self, name: ShapeName) -> bool:
        return name in self.defs

    def __getitem__(self, name: ShapeName) -> ShapeExpr:
        try:
            return self.defs[name]
        except KeyError:
            raise UndefinedShape(f"shape {name!r} has no defining constraint") from None

    def __iter__(self) -> Iterator[ShapeName]:
        return iter(self.defs)

    def __len__(self) -> int:
        return len(self.defs)

    def items(self):
        return self.defs.items()

    def names(self) -> tuple[ShapeName, ...]:
        return tuple(self.defs)

    def __eq__(self, other) -> bool:
        return isinstance(other, ConstraintSet) and self.defs == other.defs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.defs.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"ConstraintSet({self.defs!r})"

    # -- derived signature data ------------------------------------------

    def concept_names(self) -> tuple[ConceptName, ...]:
        out: set[ConceptName] = set()
        for body in self.defs.values():
            out |= expr_concepts(body)
        return tuple(sorted(out))

    def role_names(self) -> tuple[RoleName, ...]:
        out: set[RoleName] = set()
        for body in self.defs.values():
            out |= expr_roles(body)
        return tuple(sorted(out))

    def nominals(self) -> tuple[NodeId, ...]:
        out: set[NodeId] = set()
        for body in self.defs.values():
            out |= expr_nominals(body)
        return tuple(sorted(out))

    def check_references(self) -> None:
        """Raise UndefinedShape if any body references an undefined shape name."""
        for head, body in self.defs.items():
            for name, _neg in shape_deps(body):
                if name not in self.defs:
                    raise UndefinedShape(
                        f"shape {name!r} (referenced from {head!r}) has no defining constraint")


TARGET_NODE = "node"
TARGET_CLASS = "class"
TARGET_ROLE = "role"


@dataclass(frozen=True, order=True)
class Target:
    """A validation target: a node, a class, or a role, paired with a shape.

    ``kind`` is one of "node", "class", "role".  For role targets the
    subject may be an inverted role; validation then applies to subjects
    of the converse relation.
    """

    kind: str
    subject: Union[NodeId, ConceptName, Role]
    shape: ShapeName

    def __post_init__(self):
        if self.kind not in (TARGET_NODE, TARGET_CLASS, TARGET_ROLE):
            raise ValueError(f"bad target kind {self.kind!r}")
        if self.kind == TARGET_ROLE and not isinstance(self.subject, Role):
            raise ValueError("role targets need a Role subject")


@dataclass(frozen=True)
class Document:
    """A constraint set together with a list of targets.

    Every shape name used in targets or constraint bodies must be defined;
    this is checked at construction time.
    """

    constraints: ConstraintSet
    targets: tuple[Target, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        self.constraints.check_references()
        for t in self.targets:
            if t.shape not in self.constraints:
                raise UndefinedShape(f"target shape {t.shape!r} has no defining constraint")

    # -- signature --------------------------------------------------------

    def concept_names(self) -> tuple[ConceptName, ...]:
        out = set(self.constraints.concept_names())
        out |= {t.subject for t in self.targets if t.kind == TARGET_CLASS}
        return tuple(sorted(out))

    def role_names(self) -> tuple[RoleName, ...]:
        out = set(self.constraints.role_names())
        out |= {t.subject.name for t in self.targets if t.kind == TARGET_ROLE}
        return tuple(sorted(out))

    def individuals(self) -> tuple[NodeId, ...]:
        """All individual names the document mentions (nominals and node targets)."""
        out = set(self.constraints.nominals())
        out |= {t.subject for t in self.targets if t.kind == TARGET_NODE}
        return tuple(sorted(out))


def check_compatible(g: DataGraph, d: Document) -> bool:
    """True iff every individual the document mentions occurs in the graph."""
    return set(d.individuals()) <= set(g.domain)


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------

_NORMAL_FRESH_SEP = "#"


def _is_normal(body: ShapeExpr) -> bool:
    if isinstance(body, (Concept, Nominal, NotShape)):
        return True
    if isinstance(body, (And, Or)):
        return isinstance(body.left, ShapeRef) and isinstance(body.right, ShapeRef)
    if isinstance(body, (Exists, ForAll)):
        return isinstance(body.body, ShapeRef)
    return False  # a bare ShapeRef is not one of the seven normal forms


def normalize(c: ConstraintSet) -> ConstraintSet:
    """Rewrite every constraint into one of the seven normal forms.

    The forms are s <- A, s <- a, s <- !s', s <- some r.s', s <- all r.s',
    s <- s' & s'', s <- s' | s''.  Nested operators get fresh auxiliary
    shape names ``<head>#<n>`` with a single counter per call, so output
    names are deterministic.  ``#`` is not allowed in user identifiers,
    which also makes the rewrite idempotent.  Validation of the original
    shape names is preserved for every graph under every implemented
    semantics (exercised by the test suite, not assumed).
    """
    c.check_references()
    counter = 0
    out: list[tuple[ShapeName, ShapeExpr]] = []

    def fresh(head: ShapeName) -> ShapeName:
        nonlocal counter
        counter += 1
        return f"{head}{_NORMAL_FRESH_SEP}{counter}"

    def name_of(head: ShapeName, e: ShapeExpr) -> ShapeName:
        """Return a shape name whose extension equals e, defining it if needed."""
        if isinstance(e, ShapeRef):
            return e.name
        n = fresh(head)
        define(n, e, head)
        return n

    def define(name: ShapeName, body: ShapeExpr, head: ShapeName) -> None:
        if _is_normal(body):
            out.append((name, body))
        elif isinstance(body, ShapeRef):
            # A top-level alias: store as the disjunction normal form s <- s' | s'.
            out.append((name, Or(body, body)))
        elif isinstance(body, And):
            out.append((name, And(ShapeRef(name_of(head, body.left)),
                                  ShapeRef(name_of(head, body.right)))))
        elif isinstance(body, Or):
            out.append((name, Or(ShapeRef(name_of(head, body.left)),
                                 ShapeRef(name_of(head, body.right)))))
        elif isinstance(body, Exists):
            out.append((name, Exists(body.role, ShapeRef(name_of(head, body.body)))))
        elif isinstance(body, ForAll):
            out.append((name, ForAll(body.role, ShapeRef(name_of(head, body.body)))))
        else:
            raise TypeError(f"not a shape expression: {body!r}")

    for head, body in c.items():
        define(head, body, head)
    return ConstraintSet(out)


def restrict_to(c: ConstraintSet, s: ShapeName) -> ConstraintSet:
    """The sub-constraint-set of definitions reachable from ``s``.

    Validation of (C, s(a)) only depends on these definitions, so the
    restriction is safe and is applied before translation and search.
    """
    if s not in c:
        raise UndefinedShape(f"shape {s!r} has no defining constraint")
    reached: set[ShapeName] = set()
    work = [s]
    while work:
        h = work.pop()
        if h in reached:
            continue
        reached.add(h)
        if h not in c:
            raise UndefinedShape(f"shape {h!r} has no defining constraint")
        for name, _neg in shape_deps(c[h]):
            if name not in reached:
                work.append(name)
    return ConstraintSet((h, b) for h, b in c.items() if h in reached)
