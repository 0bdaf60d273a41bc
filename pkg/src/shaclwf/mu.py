"""Full hybrid mu-calculus: formulas, evaluation, cleaning, dualization.

Formulas are in negation normal form: negation occurs only on concept
and nominal literals.  ``true`` and ``false`` are derived forms over the
distinguished concept ``Top`` (Top | !Top and Top & !Top).  Evaluation
is the naive semantics with fixpoints iterated to stabilization, which
is exact on finite graphs; it deliberately stays simple because it is
the correctness oracle for the rest of the package.

Text format (``&`` tighter than ``|``; modal and negation prefixes bind
tightly; a binder's body extends as far right as possible):

    mu X_s . (A | <p> nu X_not_t . (X_s & [r] X_not_t))

``[r-]`` is the inverted role, ``@a`` a nominal, ``!A`` / ``!@a`` negated
literals, ``true`` / ``false`` the derived constants.  A capitalized bare
token is a variable when an enclosing binder binds it, else a concept.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .model import (DataGraph, FreeVariable, ParseError, Role, TOP_CONCEPT,
                    UnboundVariable)


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Lit:
    """Concept literal A or !A."""
    name: str
    positive: bool = True


@dataclass(frozen=True)
class Nom:
    """Nominal literal a or !a."""
    node: str
    positive: bool = True


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class MuAnd:
    left: "MuFormula"
    right: "MuFormula"


@dataclass(frozen=True)
class MuOr:
    left: "MuFormula"
    right: "MuFormula"


@dataclass(frozen=True)
class Box:
    role: Role
    body: "MuFormula"


@dataclass(frozen=True)
class Dia:
    role: Role
    body: "MuFormula"


@dataclass(frozen=True)
class Mu:
    var: str
    body: "MuFormula"


@dataclass(frozen=True)
class Nu:
    var: str
    body: "MuFormula"


MuFormula = Union[Lit, Nom, Var, MuAnd, MuOr, Box, Dia, Mu, Nu]


def top() -> MuFormula:
    return MuOr(Lit(TOP_CONCEPT), Lit(TOP_CONCEPT, False))


def bot() -> MuFormula:
    return MuAnd(Lit(TOP_CONCEPT), Lit(TOP_CONCEPT, False))


def free_vars(f: MuFormula) -> frozenset[str]:
    if isinstance(f, Var):
        return frozenset({f.name})
    if isinstance(f, (Lit, Nom)):
        return frozenset()
    if isinstance(f, (MuAnd, MuOr)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Box, Dia)):
        return free_vars(f.body)
    if isinstance(f, (Mu, Nu)):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"not a mu-calculus formula: {f!r}")


def closed(f: MuFormula) -> bool:
    return not free_vars(f)


def occurs(var: str, f: MuFormula) -> bool:
    """Whether the variable occurs in the formula at all (bound or free).

    With shadowing renamed apart at construction this coincides with a
    free occurrence, which is what the cleaning function needs.
    """
    if isinstance(f, Var):
        return f.name == var
    if isinstance(f, (Lit, Nom)):
        return False
    if isinstance(f, (MuAnd, MuOr)):
        return occurs(var, f.left) or occurs(var, f.right)
    if isinstance(f, (Box, Dia)):
        return occurs(var, f.body)
    if isinstance(f, (Mu, Nu)):
        return occurs(var, f.body)
    raise TypeError(f"not a mu-calculus formula: {f!r}")


def subformulas(f: MuFormula) -> frozenset[MuFormula]:
    out: set[MuFormula] = set()

    def walk(x: MuFormula) -> None:
        out.add(x)
        if isinstance(x, (MuAnd, MuOr)):
            walk(x.left)
            walk(x.right)
        elif isinstance(x, (Box, Dia, Mu, Nu)):
            walk(x.body)

    walk(f)
    return frozenset(out)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def eval(f: MuFormula, g: DataGraph, valuation: dict[str, frozenset[str]] | None = None
         ) -> frozenset[str]:  # noqa: A001 - the operation is named eval on purpose
    """Extension of the formula on a finite graph under a valuation.

    Fixpoints iterate from the empty set (mu) or the whole domain (nu)
    until stable; on a finite domain the stabilized iterate equals the
    fixpoint.
    """
    dom = g.domain

    def ev(x: MuFormula, env: dict[str, frozenset[str]]) -> frozenset[str]:
        if isinstance(x, Lit):
            ext = g.concept_ext(x.name)
            return ext if x.positive else dom - ext
        if isinstance(x, Nom):
            ext = frozenset({x.node}) & dom
            return ext if x.positive else dom - ext
        if isinstance(x, Var):
            try:
                return env[x.name]
            except KeyError:
                raise UnboundVariable(f"variable {x.name!r} is not bound") from None
        if isinstance(x, MuAnd):
            return ev(x.left, env) & ev(x.right, env)
        if isinstance(x, MuOr):
            return ev(x.left, env) | ev(x.right, env)
        if isinstance(x, Box):
            body = ev(x.body, env)
            return frozenset(a for a in dom if g.successors(a, x.role) <= body)
        if isinstance(x, Dia):
            body = ev(x.body, env)
            return frozenset(a for a in dom if g.successors(a, x.role) & body)
        if isinstance(x, (Mu, Nu)):
            cur = frozenset() if isinstance(x, Mu) else dom
            while True:
                nxt = ev(x.body, {**env, x.var: cur})
                if nxt == cur:
                    return cur
                cur = nxt
        raise TypeError(f"not a mu-calculus formula: {x!r}")

    return ev(f, dict(valuation or {}))


def approximant(f: Union[Mu, Nu], alpha: int, g: DataGraph,
                valuation: dict[str, frozenset[str]] | None = None) -> frozenset[str]:
    """The alpha-th approximant of a fixpoint formula.

    mu starts at the empty set, nu at the whole domain; each step
    evaluates the body with the variable bound to the previous stage.
    """
    if not isinstance(f, (Mu, Nu)):
        raise TypeError("approximant needs a fixpoint formula")
    cur = frozenset() if isinstance(f, Mu) else g.domain
    env = dict(valuation or {})
    for _ in range(alpha):
        cur = eval(f.body, g, {**env, f.var: cur})
    return cur


# ---------------------------------------------------------------------------
# cleaning and dualization
# ---------------------------------------------------------------------------

def cln(f: MuFormula) -> MuFormula:
    """Remove vacuous fixpoint binders (those whose variable never occurs)."""
    if isinstance(f, (Lit, Nom, Var)):
        return f
    if isinstance(f, MuAnd):
        return MuAnd(cln(f.left), cln(f.right))
    if isinstance(f, MuOr):
        return MuOr(cln(f.left), cln(f.right))
    if isinstance(f, Box):
        return Box(f.role, cln(f.body))
    if isinstance(f, Dia):
        return Dia(f.role, cln(f.body))
    if isinstance(f, (Mu, Nu)):
        body = cln(f.body)
        if not occurs(f.var, body):
            return body
        return Mu(f.var, body) if isinstance(f, Mu) else Nu(f.var, body)
    raise TypeError(f"not a mu-calculus formula: {f!r}")


def dualize(f: MuFormula) -> MuFormula:
    """Negation in negation normal form; defined on closed formulas.

    Swaps and/or, box/diamond, mu/nu and literal polarity; variables map
    to themselves, which is exactly what makes sigma X.Phi dualize to the
    opposite binder over the dualized body.  The complement law
    eval(dualize(F)) = domain - eval(F) holds for closed F.
    """
    if not closed(f):
        raise FreeVariable(f"cannot dualize an open formula; free: {sorted(free_vars(f))}")

    def du(x: MuFormula) -> MuFormula:
        if isinstance(x, Lit):
            return Lit(x.name, not x.positive)
        if isinstance(x, Nom):
            return Nom(x.node, not x.positive)
        if isinstance(x, Var):
            return x
        if isinstance(x, MuAnd):
            return MuOr(du(x.left), du(x.right))
        if isinstance(x, MuOr):
            return MuAnd(du(x.left), du(x.right))
        if isinstance(x, Box):
            return Dia(x.role, du(x.body))
        if isinstance(x, Dia):
            return Box(x.role, du(x.body))
        if isinstance(x, Mu):
            return Nu(x.var, du(x.body))
        if isinstance(x, Nu):
            return Mu(x.var, du(x.body))
        raise TypeError(f"not a mu-calculus formula: {x!r}")

    return du(f)


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<boxopen>\[)
  | (?P<boxclose>\])
  | (?P<diaopen><)
  | (?P<diaclose>>)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<dot>\.)
  | (?P<amp>&)
  | (?P<pipe>\|)
  | (?P<bang>!)
  | (?P<at>@)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*-?)
  | (?P<node>[0-9][A-Za-z0-9_.:-]*)
""", re.VERBOSE)


class _MuParser:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"bad character {text[pos]!r}", 1, pos + 1)
            if m.lastgroup != "ws":
                self.toks.append((m.lastgroup, m.group(), pos))
            pos = m.end()
        self.i = 0
        self.rename_counter = 0

    def error(self, msg: str) -> ParseError:
        col = self.toks[self.i][2] + 1 if self.i < len(self.toks) else len(self.text) + 1
        return ParseError(msg, 1, col)

    def peek(self) -> str:
        return self.toks[self.i][0] if self.i < len(self.toks) else ""

    def peek_val(self) -> str:
        return self.toks[self.i][1] if self.i < len(self.toks) else ""

    def take(self, kind: str) -> str:
        if self.peek() != kind:
            raise self.error(f"expected {kind}")
        val = self.toks[self.i][1]
        self.i += 1
        return val

    def parse(self) -> MuFormula:
        f = self.formula({})
        if self.i != len(self.toks):
            raise self.error("trailing input")
        return f

    def formula(self, env: dict[str, str]) -> MuFormula:
        f = self.conj(env)
        while self.peek() == "pipe":
            self.take("pipe")
            f = MuOr(f, self.conj(env))
        return f

    def conj(self, env: dict[str, str]) -> MuFormula:
        f = self.unary(env)
        while self.peek() == "amp":
            self.take("amp")
            f = MuAnd(f, self.unary(env))
        return f

    def role(self) -> Role:
        tok = self.take("ident")
        name = tok[:-1] if tok.endswith("-") else tok
        if name[0].isupper():
            raise self.error(f"role name {name!r} must start lowercase")
        return Role(name, tok.endswith("-"))

    def unary(self, env: dict[str, str]) -> MuFormula:
        kind = self.peek()
        if kind == "diaopen":
            self.take("diaopen")
            r = self.role()
            self.take("diaclose")
            return Dia(r, self.unary(env))
        if kind == "boxopen":
            self.take("boxopen")
            r = self.role()
            self.take("boxclose")
            return Box(r, self.unary(env))
        if kind == "bang":
            self.take("bang")
            if self.peek() == "at":
                self.take("at")
                return Nom(self.node_id(), False)
            name = self.take("ident")
            if not name[0].isupper() or name.endswith("-"):
                raise self.error("negation applies to concept or nominal literals")
            return Lit(name, False)
        if kind == "at":
            self.take("at")
            return Nom(self.node_id())
        if kind == "lpar":
            self.take("lpar")
            f = self.formula(env)
            self.take("rpar")
            return f
        if kind == "ident":
            tok = self.peek_val()
            if tok in ("mu", "nu"):
                return self.binder(env)
            self.take("ident")
            if tok.endswith("-"):
                raise self.error(f"unexpected token {tok!r}")
            if tok == "true":
                return top()
            if tok == "false":
                return bot()
            if tok in env:
                return Var(env[tok])
            if tok[0].isupper():
                return Lit(tok)
            raise self.error(f"unknown identifier {tok!r} (lowercase bare tokens "
                             "are neither concepts nor bound variables)")
        raise self.error("expected a formula")

    def node_id(self) -> str:
        if self.peek() in ("ident", "node"):
            tok = self.toks[self.i][1]
            self.i += 1
            if tok.endswith("-") and self.toks[self.i - 1][0] == "ident":
                raise self.error(f"bad node id {tok!r}")
            return tok
        raise self.error("expected a node id after '@'")

    def binder(self, env: dict[str, str]) -> MuFormula:
        op = self.take("ident")
        var = self.take("ident")
        if var.endswith("-"):
            raise self.error(f"bad variable name {var!r}")
        self.take("dot")
        # Shadowed binders are renamed apart so each variable has one binder.
        inner = var
        if var in env:
            self.rename_counter += 1
            inner = f"{var}__{self.rename_counter}"
        body = self.formula({**env, var: inner})
        return Mu(inner, body) if op == "mu" else Nu(inner, body)


def parse_mu(text: str) -> MuFormula:
    return _MuParser(text).parse()


def _ends_in_open_binder(f: MuFormula) -> bool:
    """Whether the rendering of ``f`` ends inside an unparenthesized
    binder scope (so appending ``& ...`` would be absorbed into it)."""
    if f in (top(), bot()):
        return False  # rendered as the words true/false
    if isinstance(f, (Mu, Nu)):
        return True
    if isinstance(f, (Box, Dia)):
        return _ends_in_open_binder(f.body)
    return False


def mu_to_text(f: MuFormula) -> str:
    """Canonical rendering; ``parse_mu`` round-trips it.

    Binder bodies and modal bodies are parenthesized when they are
    conjunctions or disjunctions; an operand of & or | that ends in an
    open binder scope is parenthesized unless it comes last, where it
    may extend to the end of the bracket level.  The derived constants
    are rendered back as ``true`` / ``false``.
    """
    if f == top():
        return "true"
    if f == bot():
        return "false"
    if isinstance(f, Lit):
        return f.name if f.positive else f"!{f.name}"
    if isinstance(f, Nom):
        return f"@{f.node}" if f.positive else f"!@{f.node}"
    if isinstance(f, Var):
        return f.name
    if isinstance(f, (MuAnd, MuOr)):
        sym = "&" if isinstance(f, MuAnd) else "|"
        # Flatten the left-associative spine of the same operator.
        parts: list[MuFormula] = []
        cur: MuFormula = f
        while isinstance(cur, type(f)):
            parts.append(cur.right)
            cur = cur.left
        parts.append(cur)
        parts.reverse()
        rendered = []
        for idx, p in enumerate(parts):
            last = idx == len(parts) - 1
            s = mu_to_text(p)
            if p in (top(), bot()):
                pass  # constants never need parentheses
            elif isinstance(p, (MuAnd, MuOr)):
                s = f"({s})"
            elif not last and _ends_in_open_binder(p):
                # a trailing binder would swallow the rest of the operand
                # list (its scope extends maximally), so close it off
                s = f"({s})"
            rendered.append(s)
        return f" {sym} ".join(rendered)
    if isinstance(f, (Box, Dia)):
        inner = mu_to_text(f.body)
        if isinstance(f.body, (MuAnd, MuOr)) and f.body not in (top(), bot()):
            inner = f"({inner})"
        bracket = f"[{f.role}]" if isinstance(f, Box) else f"<{f.role}>"
        return f"{bracket} {inner}"
    if isinstance(f, (Mu, Nu)):
        op = "mu" if isinstance(f, Mu) else "nu"
        inner = mu_to_text(f.body)
        if isinstance(f.body, (MuAnd, MuOr)) and f.body not in (top(), bot()):
            inner = f"({inner})"
        return f"{op} {f.var} . {inner}"
    raise TypeError(f"not a mu-calculus formula: {f!r}")
