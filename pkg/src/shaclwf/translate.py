"""Translation from shape constraints into the mu-calculus.

The positive translation of a shape name wraps a least fixpoint around
the translated body; the negative translation wraps a greatest fixpoint.
The context carries the signed shape names already being translated:
revisiting one yields its variable instead of a new binder.  Negated
shape names flip the translation's sign; flipping back from the negative
side resets the context to its positive entries only.  Conjunction and
disjunction swap under the negative translation, as do the two
quantifiers, giving negation normal form by construction.

Document-level formulas: theta is the conjunction of one clause per
target; lambda relativizes theta to everything reachable over the
document's roles plus a fresh role; the implication formula of two
documents is satisfiable exactly when the first does not imply the
second (checked only by bounded search elsewhere).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .model import (And, Concept, ConstraintSet, DataGraph, Document, Exists,
                    ForAll, Nominal, NotShape, Or, Role, ShapeExpr, ShapeRef,
                    TranslationBudget, TARGET_CLASS, TARGET_NODE, restrict_to)
from . import mu
from .mu import Box, Dia, Lit, Mu, MuAnd, MuFormula, MuOr, Nom, Nu, Var

DEFAULT_NODE_BUDGET = 200_000

SignedName = tuple[str, bool]  # (shape name, is_positive)


def variable_names(c: ConstraintSet) -> dict[SignedName, str]:
    """The functional variable naming: s -> X_s, barred s -> X_not_s.

    If a shape name textually collides with another's barred form (e.g.
    shapes ``t`` and ``not_t``), deterministic numeric suffixes keep the
    map injective.
    """
    names: dict[SignedName, str] = {}
    used: set[str] = set()
    for s in c.names():
        for positive in (True, False):
            base = f"X_{s}" if positive else f"X_not_{s}"
            var = base
            n = 1
            while var in used:
                n += 1
                var = f"{base}_{n}"
            used.add(var)
            names[(s, positive)] = var
    return names


@dataclass(frozen=True)
class TranslationContext:
    """Visited signed shape names plus the constraint set being translated."""

    constraints: ConstraintSet
    visited: frozenset[SignedName] = frozenset()

    def positive_part(self) -> "TranslationContext":
        """Drop the barred entries, keeping the positive shape names."""
        return replace(self, visited=frozenset(e for e in self.visited if e[1]))

    def enter(self, name: str, positive: bool) -> "TranslationContext":
        return replace(self, visited=self.visited | {(name, positive)})


class _Translator:
    def __init__(self, c: ConstraintSet, budget: int):
        self.c = c
        self.vars = variable_names(c)
        self.budget = budget
        self.nodes = 0

    def spend(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise TranslationBudget(
                f"translated formula exceeds the {self.budget}-node budget")

    def pos(self, ctx: TranslationContext, e: ShapeExpr) -> MuFormula:
        self.spend()
        if isinstance(e, Concept):
            return Lit(e.name)
        if isinstance(e, Nominal):
            return Nom(e.node)
        if isinstance(e, And):
            return MuAnd(self.pos(ctx, e.left), self.pos(ctx, e.right))
        if isinstance(e, Or):
            return MuOr(self.pos(ctx, e.left), self.pos(ctx, e.right))
        if isinstance(e, Exists):
            return Dia(e.role, self.pos(ctx, e.body))
        if isinstance(e, ForAll):
            return Box(e.role, self.pos(ctx, e.body))
        if isinstance(e, NotShape):
            return self.neg(ctx, ShapeRef(e.name))
        if isinstance(e, ShapeRef):
            if (e.name, True) in ctx.visited:
                return Var(self.vars[(e.name, True)])
            body = self.c[e.name]
            return Mu(self.vars[(e.name, True)],
                      self.pos(ctx.enter(e.name, True), body))
        raise TypeError(f"not a shape expression: {e!r}")

    def neg(self, ctx: TranslationContext, e: ShapeExpr) -> MuFormula:
        self.spend()
        if isinstance(e, Concept):
            return Lit(e.name, False)
        if isinstance(e, Nominal):
            return Nom(e.node, False)
        if isinstance(e, And):
            return MuOr(self.neg(ctx, e.left), self.neg(ctx, e.right))
        if isinstance(e, Or):
            return MuAnd(self.neg(ctx, e.left), self.neg(ctx, e.right))
        if isinstance(e, Exists):
            return Box(e.role, self.neg(ctx, e.body))
        if isinstance(e, ForAll):
            return Dia(e.role, self.neg(ctx, e.body))
        if isinstance(e, NotShape):
            return self.pos(ctx.positive_part(), ShapeRef(e.name))
        if isinstance(e, ShapeRef):
            if (e.name, False) in ctx.visited:
                return Var(self.vars[(e.name, False)])
            body = self.c[e.name]
            return Nu(self.vars[(e.name, False)],
                      self.neg(ctx.enter(e.name, False), body))
        raise TypeError(f"not a shape expression: {e!r}")


def tr_pos(ctx: TranslationContext, e: ShapeExpr,
           budget: int = DEFAULT_NODE_BUDGET) -> MuFormula:
    return _Translator(ctx.constraints, budget).pos(ctx, e)


def tr_neg(ctx: TranslationContext, e: ShapeExpr,
           budget: int = DEFAULT_NODE_BUDGET) -> MuFormula:
    return _Translator(ctx.constraints, budget).neg(ctx, e)


def translate(c: ConstraintSet, s: str, clean: bool = False,
              budget: int = DEFAULT_NODE_BUDGET) -> MuFormula:
    """Positive translation of a shape name from the empty context.

    Only the definitions reachable from ``s`` matter, so the constraint
    set is restricted first.
    """
    ctx = TranslationContext(restrict_to(c, s))
    f = tr_pos(ctx, ShapeRef(s), budget)
    return mu.cln(f) if clean else f


def _conjoin(parts: list[MuFormula]) -> MuFormula:
    if not parts:
        return mu.top()
    out = parts[0]
    for p in parts[1:]:
        out = MuAnd(out, p)
    return out


def _target_sort_key(t) -> tuple:
    return (t.kind, str(t.subject), t.shape)


def theta(d: Document, budget: int = DEFAULT_NODE_BUDGET) -> MuFormula:
    """Conjunction of one clause per target; holds at every node of a
    graph exactly when the graph validates the document.

    Node target (a, s):  !a | tr+(s); class target (A, s):  !A | tr+(s);
    role target (r, s):  [r]false | tr+(s)  (the negation-normal form of
    "no r-successor or the shape holds").  No targets yields true.
    """
    parts: list[MuFormula] = []
    for t in sorted(d.targets, key=_target_sort_key):
        tr = translate(d.constraints, t.shape, budget=budget)
        if t.kind == TARGET_NODE:
            parts.append(MuOr(Nom(t.subject, False), tr))
        elif t.kind == TARGET_CLASS:
            parts.append(MuOr(Lit(t.subject, False), tr))
        else:
            parts.append(MuOr(Box(t.subject, mu.bot()), tr))
    return _conjoin(parts)


LAMBDA_VAR = "X"


def lambda_(d: Document, p: str, budget: int = DEFAULT_NODE_BUDGET) -> MuFormula:
    """Greatest fixpoint propagating theta over every role of the document
    plus the fresh role ``p``, in both orientations.

    On a graph whose nodes are all connected through those roles, its
    extension is all-or-nothing: everything if theta holds everywhere
    reachable, else nothing.
    """
    roles = sorted(set(d.role_names()) | {p})
    parts: list[MuFormula] = [theta(d, budget)]
    parts += [Box(Role(r, True), Var(LAMBDA_VAR)) for r in roles]
    parts += [Box(Role(r), Var(LAMBDA_VAR)) for r in roles]
    return Nu(LAMBDA_VAR, _conjoin(parts))


def fresh_role(*docs: Document) -> str:
    """The first ``__fresh_p<n>`` outside every given document's signature."""
    used: set[str] = set()
    for d in docs:
        used |= set(d.role_names())
    n = 0
    while f"__fresh_p{n}" in used:
        n += 1
    return f"__fresh_p{n}"


def implication_formula(d1: Document, d2: Document,
                        budget: int = DEFAULT_NODE_BUDGET) -> MuFormula:
    """Satisfiable exactly when some graph validates d1 but not d2.

    One diamond conjunct per individual of either document anchors the
    named nodes inside the lambda region of d1; the final conjunct asks
    for a point violating d2's lambda.  The fresh role makes the
    evaluation point see every node.
    """
    p = fresh_role(d1, d2)
    individuals = sorted(set(d1.individuals()) | set(d2.individuals()))
    lam1 = lambda_(d1, p, budget)
    lam2 = lambda_(d2, p, budget)
    parts: list[MuFormula] = [Dia(Role(p), MuAnd(Nom(a), lam1)) for a in individuals]
    parts.append(Dia(Role(p), mu.dualize(lam2)))
    return _conjoin(parts)


def doc_sat_formula(d: Document, budget: int = DEFAULT_NODE_BUDGET) -> MuFormula:
    """Satisfiable exactly when some compatible graph validates ``d``.

    This is the implication formula against the empty document with the
    dual-lambda conjunct dropped (the empty document's lambda is trivial)
    and one positive lambda diamond kept, so that documents without
    individuals are not vacuously satisfiable.
    """
    p = fresh_role(d)
    lam = lambda_(d, p, budget)
    parts: list[MuFormula] = [Dia(Role(p), MuAnd(Nom(a), lam))
                              for a in sorted(d.individuals())]
    parts.append(Dia(Role(p), lam))
    return _conjoin(parts)


def add_hub(g: DataGraph, p: str, hub: str = "__hub") -> DataGraph:
    """The graph extended with an observer node that sees every node
    through the fresh role, itself included.

    Evaluating a formula's fresh-role diamonds at the hub then ranges
    over the whole original graph.
    """
    edges = {(p, hub, a) for a in g.domain} | {(p, hub, hub)}
    return DataGraph(g.concept_assertions, g.role_assertions | frozenset(edges))
