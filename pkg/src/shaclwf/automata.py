"""Two-way alternating parity tree automata for shape and document checks.

The automaton for a (normalized) constraint set and a start shape accepts
tree encodings of graphs containing a node that validates the shape.
Acceptance is coBüchi: priorities are {0, 1}, with 1 exactly on the
positive-translation states, so positive facts must be derived in
finitely many unfolding steps while negative information may be deferred
forever — the automaton-side image of the well-founded fixpoint.

Tree encodings of a graph look like this: a root whose first l children
are *slots* holding the nominals (in sorted order), followed by one
*candidate* node (a chosen non-nominal element, the potential witness)
and padding children labeled ⊥, for exactly k root children.  Below
depth one, each tree node is an occurrence of a graph element tagged
with the role by which it hangs under its parent (the *arrival role*);
its children are all role-neighbours in both orientations, so the
unravelling is the full two-way unfolding of the graph.  Edges to
nominals are not tree edges: they appear as marker entries "→r a" inside
the node's own symbol, and nominal-to-nominal edges live in the slot
symbols and in the guess's connection relation.

A *guess* fixes the whole nominal configuration up front: which
subexpressions hold at each nominal (the guess list), how nominals are
interconnected, and which slot each nominal is identified with.  The
automaton is built per guess; satisfiability is the disjunction over
all guesses.

A quantifier that steps onto a marked nominal continues by *traveling*:
a goto state climbs to the root and descends into the nominal's slot,
where the quantified shape is checked for real.  Treating the guessed
claims as ground truth instead would let a positive claim justify
itself through a nominal cycle; with travel, such circular support
shows up as a game cycle through priority-1 states and is rejected,
exactly as the least-fixpoint semantics demands, while circular
negative support stays on priority 0 and is correctly accepted.

Emptiness is decided here only boundedly: enumerate small graphs, build
the finite parity-game arena of the automaton running over the graph's
encoding, and solve it.  The existential player (Eve) resolves
disjunctions and the universal player (Adam) resolves conjunctions and
upward moves, which may target any structure parent of an occurrence.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Union

from . import kernel
from .model import (
    And,
    BudgetExceeded,
    Concept,
    ConstraintSet,
    DataGraph,
    Document,
    Exists,
    ForAll,
    Nominal,
    NotShape,
    Or,
    Role,
    ShapeExpr,
    ShapeName,
    ShapeRef,
    TARGET_CLASS,
    TARGET_NODE,
    TARGET_ROLE,
    _is_normal,
    normalize,
    restrict_to,
    sub,
)
from .search import SearchOutcome, signature_of, signature_of_documents
from .syntax import expr_to_text

EVE = "eve"
ADAM = "adam"


# ---------------------------------------------------------------------------
# positive boolean formulas over (direction, state) atoms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PbfTrue:
    def __str__(self) -> str:
        return "true"


@dataclass(frozen=True)
class PbfFalse:
    def __str__(self) -> str:
        return "false"


@dataclass(frozen=True)
class PbfAtom:
    direction: int
    state: tuple

    def __str__(self) -> str:
        return f"({self.direction},{state_to_text(self.state)})"


@dataclass(frozen=True)
class PbfAnd:
    parts: tuple

    def __str__(self) -> str:
        return " & ".join(_pbf_part_text(p) for p in self.parts)


@dataclass(frozen=True)
class PbfOr:
    parts: tuple

    def __str__(self) -> str:
        return " | ".join(_pbf_part_text(p) for p in self.parts)


PositiveBoolFormula = Union[PbfTrue, PbfFalse, PbfAtom, PbfAnd, PbfOr]
TRUE = PbfTrue()
FALSE = PbfFalse()


def _pbf_part_text(p: PositiveBoolFormula) -> str:
    if isinstance(p, (PbfAnd, PbfOr)):
        return f"({p})"
    return str(p)


def pbf_to_text(f: PositiveBoolFormula) -> str:
    return str(f)


def atom(direction: int, state: tuple) -> PbfAtom:
    return PbfAtom(direction, state)


def pbf_and(parts) -> PositiveBoolFormula:
    flat: list = []
    for p in parts:
        if isinstance(p, PbfFalse):
            return FALSE
        if isinstance(p, PbfTrue):
            continue
        if isinstance(p, PbfAnd):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return PbfAnd(tuple(flat))


def pbf_or(parts) -> PositiveBoolFormula:
    flat: list = []
    for p in parts:
        if isinstance(p, PbfTrue):
            return TRUE
        if isinstance(p, PbfFalse):
            continue
        if isinstance(p, PbfOr):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return PbfOr(tuple(flat))


# ---------------------------------------------------------------------------
# states and symbols
# ---------------------------------------------------------------------------

# States are tagged tuples so they hash and sort cheaply:
#   ("bot",) ("qtilde",) ("q0",) ("q0p",) ("qi", i) ("q",) ("qp",) ("qpp",)
#   ("role", role_str) ("notrole", role_str) ("trp", expr) ("trn", expr)
ST_BOT = ("bot",)
ST_QTILDE = ("qtilde",)
ST_Q0 = ("q0",)
ST_Q0P = ("q0p",)
ST_Q = ("q",)
ST_QP = ("qp",)
ST_QPP = ("qpp",)

_PLUMBING_NAMES = {
    ST_BOT: "q_bot",
    ST_QTILDE: "q~",
    ST_Q0: "q0",
    ST_Q0P: "q0'",
    ST_Q: "q",
    ST_QP: "q'",
    ST_QPP: "q''",
}


def trp(e: ShapeExpr) -> tuple:
    return ("trp", e)


def trn(e: ShapeExpr) -> tuple:
    return ("trn", e)


def goto(slot: int, cont: tuple) -> tuple:
    """The travel state: climb to the root, then continue in state
    ``cont`` inside slot ``slot``.  Used to check a quantified shape at
    a nominal that a marker points to."""
    return ("goto", slot, cont)


def state_to_text(state: tuple) -> str:
    if state in _PLUMBING_NAMES:
        return _PLUMBING_NAMES[state]
    tag = state[0]
    if tag == "qi":
        return f"q_{state[1]}"
    if tag == "role":
        return f"role {state[1]}"
    if tag == "notrole":
        return f"not-role {state[1]}"
    if tag == "trp":
        return f"tr+({expr_to_text(state[1])})"
    if tag == "trn":
        return f"tr-({expr_to_text(state[1])})"
    if tag == "goto":
        return f"goto({state[1]}, {state_to_text(state[2])})"
    raise ValueError(f"unknown state {state!r}")


# Symbols: the two sentinels, or a sorted tuple of entry tuples
#   ("C", concept) ("N", nominal) ("R", role_str) ("M", role_str, nominal)
# where a bare role entry is the arrival role (parent --r--> node) and a
# marker ("M", r, a) records an edge node --r--> nominal a.
BOT_SYMBOL = ("bot",)
ROOT_SYMBOL = ("root",)


def make_symbol(entries) -> tuple:
    return tuple(sorted(set(entries)))


def parse_symbol_entry(text: str) -> tuple:
    """One entry of the CLI symbol syntax: A, @a, r, r-, or p->a."""
    text = text.strip()
    if "->" in text:
        role_part, _, nom = text.partition("->")
        return ("M", str(Role.parse(role_part.strip())), nom.strip())
    if text.startswith("@"):
        return ("N", text[1:])
    if text[:1].isupper():
        return ("C", text)
    return ("R", str(Role.parse(text)))


def parse_symbol(text: str) -> tuple:
    """CLI symbol syntax: 'root', 'bot', or a comma list of entries."""
    stripped = text.strip()
    if stripped == "root":
        return ROOT_SYMBOL
    if stripped in ("bot", ""):
        return BOT_SYMBOL
    return make_symbol(parse_symbol_entry(part) for part in stripped.split(","))


def symbol_to_text(sym: tuple) -> str:
    if sym == BOT_SYMBOL:
        return "bot"
    if sym == ROOT_SYMBOL:
        return "root"
    parts = []
    for e in sym:
        if e[0] == "C":
            parts.append(e[1])
        elif e[0] == "N":
            parts.append(f"@{e[1]}")
        elif e[0] == "R":
            parts.append(e[1])
        else:
            parts.append(f"{e[1]}->{e[2]}")
    return "{" + ", ".join(parts) + "}"


def _is_sentinel(sym: tuple) -> bool:
    return sym == BOT_SYMBOL or sym == ROOT_SYMBOL


def _entries(sym: tuple, tag: str):
    if _is_sentinel(sym):
        return ()
    return tuple(e for e in sym if e[0] == tag)


def _name_projection(sym: tuple) -> frozenset:
    """Concept and nominal entries of a symbol (the label projection)."""
    return frozenset(e for e in sym if not _is_sentinel(sym) and e[0] in ("C", "N"))


# ---------------------------------------------------------------------------
# guesses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Guess:
    """A fixed configuration of the nominals, enumerated outside the automaton.

    ``nominals`` lists the l nominal names in the automaton's slot order.
    ``gammas[i]`` is the guess for slot i+1: None (the ⊥ slot) or a
    frozenset of shape expressions asserted to hold at the nominals
    placed there.  ``mapping[j]`` is the 1-based slot of nominal j+1, and
    ``connections`` is the role relation among nominals, closed under
    inversion.
    """

    nominals: tuple[str, ...]
    gammas: tuple[Optional[frozenset], ...]
    connections: frozenset  # of (nominal, Role, nominal)
    mapping: tuple[int, ...]

    def __post_init__(self):
        l = len(self.nominals)
        if len(self.gammas) != l or len(self.mapping) != l:
            raise ValueError("guess list and mapping must have one entry per nominal")
        for j, a in enumerate(self.nominals):
            slot = self.mapping[j]
            if not 1 <= slot <= l:
                raise ValueError(f"mapping sends nominal {a!r} outside 1..{l}")
            for i, gamma in enumerate(self.gammas, start=1):
                holds = gamma is not None and Nominal(a) in gamma
                if holds != (i == slot):
                    raise ValueError(
                        f"nominal {a!r} must sit in slot {slot} and nowhere else")
        for i, gamma in enumerate(self.gammas, start=1):
            if gamma is not None and not any(isinstance(e, Nominal) for e in gamma):
                raise ValueError(f"slot {i} holds no nominal and must be ⊥")
        for (a, r, b) in self.connections:
            if (b, r.invert(), a) not in self.connections:
                raise ValueError("connections must be closed under role inversion")

    def slot_of(self, nominal: str) -> int:
        return self.mapping[self.nominals.index(nominal)]

    def gamma_of(self, nominal: str) -> Optional[frozenset]:
        return self.gammas[self.slot_of(nominal) - 1]


def guess_universe(c: ConstraintSet, extra_shapes=()) -> tuple[ShapeExpr, ...]:
    """Expressions a guess may assert at a nominal: the subexpression
    closure plus name-negations of every referenced shape (and of the
    extra shapes), excluding nominals, whose placement the mapping fixes."""
    base = set(sub(c))
    names = {e.name for e in base if isinstance(e, ShapeRef)}
    names |= set(extra_shapes)
    for t in names:
        base.add(ShapeRef(t))
        base.add(NotShape(t))
    pool = [e for e in base if not isinstance(e, Nominal)]
    pool.sort(key=expr_to_text)
    return tuple(pool)


def trivial_guess(c: ConstraintSet) -> Guess:
    """The unique guess of a nominal-free constraint set."""
    if c.nominals():
        raise ValueError("constraint set has nominals; enumerate guesses instead")
    return Guess((), (), frozenset(), ())


def enumerate_guesses(c: ConstraintSet, *, nominals=None, extra_shapes=(),
                      extra_roles=(),
                      max_guesses: Optional[int] = None) -> Iterator[Guess]:
    """All guesses for the nominals of ``c``, in a deterministic order.

    Enumerates identification maps, then per-slot subsets of the guess
    universe, then connection relations (generated by plain-role ordered
    pairs and closed under inversion).  ``nominals`` and ``extra_roles``
    widen the individual/role universe beyond what the constraint bodies
    mention (the document variant needs target individuals and roles).
    Raises BudgetExceeded after ``max_guesses`` emissions when a cap is
    given.
    """
    noms = tuple(sorted(set(c.nominals()) | set(nominals or ())))
    l = len(noms)
    pool = guess_universe(c, extra_shapes)
    roles = [Role(r) for r in sorted(set(c.role_names()) | set(extra_roles))]
    pairs = [(a, r, b) for a in noms for r in roles for b in noms]
    emitted = 0
    for mapping in itertools.product(range(1, l + 1), repeat=l):
        used_slots = set(mapping)
        slot_members = {i: frozenset(Nominal(noms[j]) for j in range(l)
                                     if mapping[j] == i)
                        for i in used_slots}
        per_slot_choices = []
        slot_order = sorted(used_slots)
        for i in slot_order:
            choices = []
            for bits in range(1 << len(pool)):
                extra = frozenset(pool[t] for t in range(len(pool))
                                  if (bits >> t) & 1)
                choices.append(slot_members[i] | extra)
            per_slot_choices.append(choices)
        for combo in itertools.product(*per_slot_choices):
            gammas: list = [None] * l
            for i, gamma in zip(slot_order, combo):
                gammas[i - 1] = gamma
            for bits in range(1 << len(pairs)):
                conns = set()
                for t, (a, r, b) in enumerate(pairs):
                    if (bits >> t) & 1:
                        conns.add((a, r, b))
                        conns.add((b, r.invert(), a))
                if max_guesses is not None and emitted >= max_guesses:
                    raise BudgetExceeded(
                        f"guess enumeration exceeded {max_guesses} guesses")
                emitted += 1
                yield Guess(noms, tuple(gammas), frozenset(conns), mapping)


def enumerate_doc_guesses(d: Document, *,
                          max_guesses: Optional[int] = None) -> Iterator[Guess]:
    """Guesses covering every individual, shape, and role the document
    mentions, including those appearing only in targets."""
    return enumerate_guesses(d.constraints,
                             nominals=d.individuals(),
                             extra_shapes=tuple(t.shape for t in d.targets),
                             extra_roles=d.role_names(),
                             max_guesses=max_guesses)


def canonical_guess(c: ConstraintSet, g: DataGraph, *, nominals=None,
                    extra_shapes=()) -> Guess:
    """The guess a validating graph induces: identity mapping, each
    nominal labeled with the universe expressions that are definitely
    true at it, connections read off the graph."""
    from .wf import Polarity, eval_expr, well_founded_model

    noms = tuple(sorted(set(c.nominals()) | set(nominals or ())))
    model = well_founded_model(g, c).model
    pool = guess_universe(c, extra_shapes)
    gammas = []
    for a in noms:
        members: set = {Nominal(a)}
        for e in pool:
            if a in eval_expr(e, g, model, Polarity.LOWER):
                members.add(e)
        gammas.append(frozenset(members))
    conns = set()
    for (r, u, v) in g.role_assertions:
        if u in noms and v in noms:
            conns.add((u, Role(r), v))
            conns.add((v, Role(r).invert(), u))
    return Guess(noms, tuple(gammas), frozenset(conns),
                 tuple(range(1, len(noms) + 1)))


# ---------------------------------------------------------------------------
# the automaton
# ---------------------------------------------------------------------------

def _check_normal(c: ConstraintSet) -> None:
    for name in c.names():
        if not _is_normal(c[name]):
            raise ValueError(
                f"constraint {name!r} is not in normal form; normalize first")


@dataclass(frozen=True)
class TwoATA:
    """A two-way alternating parity tree automaton over k-ary encodings.

    ``delta(state, symbol, dirs)`` yields the transition as a positive
    boolean formula over (direction, state) atoms with directions in
    {-1, 0, 1..dirs}; ``dirs`` defaults to k (the paper-table form) and
    is instantiated per node when running over a concrete structure.
    """

    states: tuple
    symbol_entries: tuple
    initial: tuple
    k: int
    l: int
    guess: Guess
    constraints: ConstraintSet
    delta: Callable[..., PositiveBoolFormula] = field(compare=False)
    start: Optional[ShapeName] = None
    doc: Optional[Document] = None

    def priority(self, state: tuple) -> int:
        return 1 if state[0] == "trp" else 0

    def priority_one_states(self) -> tuple:
        return tuple(s for s in self.states if self.priority(s) == 1)


class _AutomatonBuilder:
    """Shared construction for the shape automaton and its document variant."""

    def __init__(self, c: ConstraintSet, guess: Guess, *,
                 start: Optional[ShapeName] = None,
                 doc: Optional[Document] = None):
        _check_normal(c)
        self.c = c
        self.guess = guess
        self.start = start
        self.doc = doc
        self.noms = guess.nominals
        self.l = len(self.noms)
        quantified = [e for e in sub(c) if isinstance(e, (Exists, ForAll))]
        self.k = max(len(quantified), self.l) + 1
        self.concept_universe = (doc.concept_names() if doc is not None
                                 else c.concept_names())
        role_universe = doc.role_names() if doc is not None else c.role_names()
        self.role_strs = [str(Role(r)) for r in role_universe]
        self.role_strs += [str(Role(r).invert()) for r in role_universe]
        self._delta_cache: dict = {}
        self._state_idx: Optional[dict] = None

    def cached_delta(self, state: tuple, sym: tuple, dirs: Optional[int] = None
                     ) -> PositiveBoolFormula:
        key = (state, sym, dirs)
        hit = self._delta_cache.get(key)
        if hit is None:
            hit = self._delta_cache[key] = self.delta(state, sym, dirs)
        return hit

    # -- state space --------------------------------------------------------

    def states(self) -> tuple:
        exprs = set(sub(self.c))
        exprs |= {Nominal(a) for a in self.noms}
        names = {e.name for e in exprs if isinstance(e, ShapeRef)}
        if self.start is not None:
            names.add(self.start)
        if self.doc is not None:
            names |= {t.shape for t in self.doc.targets}
        for t in names:
            exprs.add(ShapeRef(t))
            exprs.add(NotShape(t))
        out = [ST_BOT, ST_QTILDE, ST_Q0, ST_Q0P, ST_Q, ST_QP, ST_QPP]
        out += [("qi", i) for i in range(1, self.l + 1)]
        out += [("role", r) for r in self.role_strs]
        out += [("notrole", r) for r in self.role_strs]
        ordered = sorted(exprs, key=expr_to_text)
        out += [trp(e) for e in ordered]
        out += [trn(e) for e in ordered]
        # travel states: quantifier bodies are shape references in normal
        # form, so those are the only continuations goto can carry
        refs = sorted(names)
        out += [goto(i, tr(ShapeRef(t)))
                for i in range(1, self.l + 1)
                for t in refs
                for tr in (trp, trn)]
        return tuple(out)

    def symbol_entries(self) -> tuple:
        entries = [("C", a) for a in self.concept_universe]
        entries += [("N", a) for a in self.noms]
        entries += [("R", r) for r in self.role_strs]
        entries += [("M", r, a) for r in self.role_strs for a in self.noms]
        return tuple(sorted(entries))

    # -- guess lookups ------------------------------------------------------

    def _gamma(self, nominal: str) -> Optional[frozenset]:
        return self.guess.gamma_of(nominal)

    def _gamma_proj(self, gamma: Optional[frozenset]) -> frozenset:
        if gamma is None:
            return frozenset()
        proj = set()
        for e in gamma:
            if isinstance(e, Concept):
                proj.add(("C", e.name))
            elif isinstance(e, Nominal):
                proj.add(("N", e.node))
        return frozenset(proj)

    # -- transition table ---------------------------------------------------

    def delta(self, state: tuple, sym: tuple, dirs: Optional[int] = None
              ) -> PositiveBoolFormula:
        dirs = self.k if dirs is None else dirs
        tag = state[0]
        # the ⊥ symbol admits only the sweep states and the ⊥ state itself
        if sym == BOT_SYMBOL and tag not in ("q0", "qi", "qpp", "q"):
            return TRUE if tag == "bot" else FALSE
        if tag == "bot":
            return FALSE
        if tag == "qtilde":
            if sym == ROOT_SYMBOL:
                return pbf_and([atom(0, ST_Q0), atom(0, ST_Q0P)])
            return FALSE
        if tag == "q0":
            if sym != ROOT_SYMBOL:
                return FALSE
            parts = [atom(i, ("qi", i)) for i in range(1, self.l + 1)]
            parts += [atom(i, ST_Q) for i in range(self.l + 1, self.k + 1)]
            parts += [atom(i, ST_QPP) for i in range(1, self.k + 1)]
            return pbf_and(parts)
        if tag == "qpp":
            return FALSE if _entries(sym, "R") else TRUE
        if tag == "qi":
            gamma = self.guess.gammas[state[1] - 1]
            if sym == ROOT_SYMBOL:
                return FALSE
            if self._gamma_proj(gamma) != _name_projection(sym):
                return FALSE
            # the slot's edges to nominals must be exactly the guessed
            # connections of the nominals placed here
            present = {e[1] for e in _entries(sym, "N")}
            licensed = {("M", str(r), b) for (a, r, b) in self.guess.connections
                        if a in present}
            if set(_entries(sym, "M")) != licensed:
                return FALSE
            return pbf_and([atom(j, ST_Q) for j in range(1, dirs + 1)])
        if tag == "q":
            if sym == ROOT_SYMBOL or _entries(sym, "N"):
                return FALSE
            return pbf_and([atom(j, ST_Q) for j in range(1, dirs + 1)])
        if tag == "goto":
            if sym == ROOT_SYMBOL:
                return atom(state[1], state[2])
            return atom(-1, state)
        if tag == "q0p":
            return self._delta_q0p(sym)
        if tag == "qp":
            return self._delta_qp(sym, dirs)
        if tag == "role":
            return TRUE if ("R", state[1]) in _entries(sym, "R") else FALSE
        if tag == "notrole":
            if sym == ROOT_SYMBOL:
                return FALSE
            return FALSE if ("R", state[1]) in _entries(sym, "R") else TRUE
        if tag == "trp":
            return self._tr(state[1], sym, dirs, positive=True)
        if tag == "trn":
            return self._tr(state[1], sym, dirs, positive=False)
        raise ValueError(f"unknown state {state!r}")

    def _delta_q0p(self, sym: tuple) -> PositiveBoolFormula:
        if sym != ROOT_SYMBOL:
            return FALSE
        parts: list = []
        for i, gamma in enumerate(self.guess.gammas, start=1):
            if gamma is None:
                parts.append(atom(i, ST_BOT))
            else:
                parts.extend(atom(i, trp(e)) for e in
                             sorted(gamma, key=expr_to_text))
        if self.doc is not None:
            # node targets attach at the slot of the named nominal, and
            # role targets whose subject side is pinned by a connection
            # launch the shape check at the subject's slot
            for t in self.doc.targets:
                if t.kind == TARGET_NODE and t.subject in self.noms:
                    parts.append(atom(self.guess.slot_of(t.subject),
                                      trp(ShapeRef(t.shape))))
                elif t.kind == TARGET_ROLE:
                    for (a, r, _b) in sorted(
                            self.guess.connections,
                            key=lambda con: (con[0], str(con[1]), con[2])):
                        if r == t.subject:
                            parts.append(atom(self.guess.slot_of(a),
                                              trp(ShapeRef(t.shape))))
        else:
            parts.append(pbf_or([atom(i, trp(ShapeRef(self.start)))
                                 for i in range(1, self.k + 1)]))
        parts += [pbf_or([atom(i, ST_QP), atom(i, ST_BOT)])
                  for i in range(1, self.k + 1)]
        return pbf_and(parts)

    def _delta_qp(self, sym: tuple, dirs: int) -> PositiveBoolFormula:
        if sym == ROOT_SYMBOL:
            return FALSE
        parts: list = []
        # obligations the nominals impose on their marked neighbours: a
        # marker node --r--> a makes the node an r⁻-successor of a
        for (_tag, rs, a) in _entries(sym, "M"):
            gamma = self._gamma(a)
            if gamma is None:
                continue
            back = Role.parse(rs).invert()
            for e in sorted(gamma, key=expr_to_text):
                if isinstance(e, ForAll) and e.role == back:
                    parts.append(atom(0, trp(e.body)))
                if isinstance(e, NotShape):
                    body = self.c[e.name] if e.name in self.c else None
                    if isinstance(body, Exists) and body.role == back:
                        parts.append(atom(0, trn(body.body)))
        if self.doc is not None:
            parts.extend(self._doc_target_obligations(sym))
        parts += [pbf_or([atom(j, ST_QP), atom(j, ST_BOT)])
                  for j in range(1, dirs + 1)]
        return pbf_and(parts)

    def _doc_target_obligations(self, sym: tuple) -> list:
        """Class and role target conjuncts of the document variant at q'."""
        parts: list = []
        arrivals = [Role.parse(e[1]) for e in _entries(sym, "R")]
        markers = [(Role.parse(e[1]), e[2]) for e in _entries(sym, "M")]
        for t in self.doc.targets:
            if t.kind == TARGET_CLASS:
                if ("C", t.subject) in sym:
                    parts.append(atom(0, trp(ShapeRef(t.shape))))
            elif t.kind == TARGET_ROLE:
                rho = t.subject
                check = trp(ShapeRef(t.shape))
                for arr in arrivals:
                    if arr == rho.invert():  # this node points at its parent by rho
                        parts.append(atom(0, check))
                    if arr == rho:           # the parent points here by rho
                        parts.append(atom(-1, check))
                for (mr, a) in markers:
                    if mr == rho:            # this node points at nominal a by rho
                        parts.append(atom(0, check))
                    if mr == rho.invert():   # nominal a points here by rho
                        gamma = self._gamma(a)
                        if gamma is None or ShapeRef(t.shape) not in gamma:
                            parts.append(FALSE)
        return parts

    def _tr(self, e: ShapeExpr, sym: tuple, dirs: int, *, positive: bool
            ) -> PositiveBoolFormula:
        if isinstance(e, Concept):
            holds = ("C", e.name) in sym and not _is_sentinel(sym)
            if positive:
                return TRUE if holds else FALSE
            return FALSE if (holds or sym == ROOT_SYMBOL) else TRUE
        if isinstance(e, Nominal):
            holds = ("N", e.node) in sym and not _is_sentinel(sym)
            if positive:
                return TRUE if holds else FALSE
            return FALSE if (holds or sym == ROOT_SYMBOL) else TRUE
        if isinstance(e, And):
            combine = pbf_and if positive else pbf_or
            return combine([atom(0, self._side(e.left, positive)),
                            atom(0, self._side(e.right, positive))])
        if isinstance(e, Or):
            combine = pbf_or if positive else pbf_and
            return combine([atom(0, self._side(e.left, positive)),
                            atom(0, self._side(e.right, positive))])
        if isinstance(e, NotShape):
            return atom(0, self._side(ShapeRef(e.name), not positive))
        if isinstance(e, ShapeRef):
            return atom(0, self._side(self.c[e.name], positive))
        if isinstance(e, Exists):
            return (self._diamond(e.role, e.body, sym, dirs) if positive
                    else self._box(e.role, e.body, sym, dirs, positive=False))
        if isinstance(e, ForAll):
            return (self._box(e.role, e.body, sym, dirs, positive=True) if positive
                    else self._diamond_negative(e.role, e.body, sym, dirs))
        raise ValueError(f"unexpected expression {e!r}")

    @staticmethod
    def _side(e: ShapeExpr, positive: bool) -> tuple:
        return trp(e) if positive else trn(e)

    def _marked(self, role: Role, sym: tuple):
        rs = str(role)
        return [e[2] for e in _entries(sym, "M") if e[1] == rs]

    def _diamond(self, role: Role, body: ShapeExpr, sym: tuple, dirs: int
                 ) -> PositiveBoolFormula:
        # tr⁺(∃r.s): discharged by a marked nominal (travel there and
        # check s), otherwise by some r-child satisfying s
        parts: list = [atom(0, goto(self.guess.slot_of(a), trp(body)))
                       for a in self._marked(role, sym)]
        parts += [pbf_and([atom(j, trp(body)),
                           atom(j, ("role", str(role)))])
                  for j in range(1, dirs + 1)]
        return pbf_or(parts)

    def _diamond_negative(self, role: Role, body: ShapeExpr, sym: tuple,
                          dirs: int) -> PositiveBoolFormula:
        # tr⁻(∀r.s): some r-successor fails s — travel to a marked
        # nominal and refute s there, or some r-child carries tr⁻(s)
        parts: list = [atom(0, goto(self.guess.slot_of(a), trn(body)))
                       for a in self._marked(role, sym)]
        parts += [pbf_and([atom(j, trn(body)),
                           atom(j, ("role", str(role)))])
                  for j in range(1, dirs + 1)]
        return pbf_or(parts)

    def _box(self, role: Role, body: ShapeExpr, sym: tuple, dirs: int, *,
             positive: bool) -> PositiveBoolFormula:
        # tr⁺(∀r.s) / tr⁻(∃r.s): every r-successor — marked nominals are
        # checked by traveling to their slots, the parent is covered
        # unless the arrival role rules it out, children are checked or
        # excused
        check = trp(body) if positive else trn(body)
        parts: list = [atom(0, goto(self.guess.slot_of(a), check))
                       for a in self._marked(role, sym)]
        parts.append(pbf_or([atom(-1, check),
                             atom(0, ("notrole", str(role.invert())))]))
        parts += [pbf_or([atom(j, check),
                          atom(j, ("notrole", str(role))),
                          atom(j, ST_BOT)])
                  for j in range(1, dirs + 1)]
        return pbf_and(parts)


def build_2ata(c: ConstraintSet, s: ShapeName, guess: Guess) -> TwoATA:
    """The automaton accepting encodings of graphs with a node validating s.

    ``c`` must be normalized and ``guess`` must cover exactly its
    nominals; acceptance is relative to the guess, so satisfiability is
    the disjunction of emptiness checks over all guesses.
    """
    if s not in c:
        c[s]  # raises UndefinedShape with a uniform message
    if set(guess.nominals) != set(c.nominals()):
        raise ValueError("guess must cover exactly the constraint set's nominals")
    b = _AutomatonBuilder(c, guess, start=s)
    return TwoATA(states=b.states(), symbol_entries=b.symbol_entries(),
                  initial=ST_QTILDE, k=b.k, l=b.l, guess=guess,
                  constraints=c, delta=b.cached_delta, start=s)


def build_doc_2ata(d: Document, guess: Guess) -> TwoATA:
    """The document variant: accepts encodings of graphs validating all
    targets.  The start-shape disjunct is replaced by target obligations
    attached to the slot checks and the traversal state."""
    if set(guess.nominals) != set(d.individuals()):
        raise ValueError("guess must cover exactly the document's individuals")
    b = _AutomatonBuilder(d.constraints, guess, doc=d)
    return TwoATA(states=b.states(), symbol_entries=b.symbol_entries(),
                  initial=ST_QTILDE, k=b.k, l=b.l, guess=guess,
                  constraints=d.constraints, delta=b.cached_delta, doc=d)


# ---------------------------------------------------------------------------
# tree encodings of graphs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Structure:
    """A finite rooted structure whose unravelling is the input tree.

    ``children`` maps each node key to an ordered tuple of child keys and
    ``symbols`` assigns each key an alphabet symbol.  The root must have
    exactly k children when fed to an automaton with branching k.
    """

    root: object
    symbols: dict
    children: dict

    def parents(self) -> dict:
        out: dict = {key: [] for key in self.children}
        for key, kids in self.children.items():
            for kid in kids:
                out[kid].append(key)
        return {key: tuple(dict.fromkeys(v)) for key, v in out.items()}


def encode_graph(g: DataGraph, nominals: tuple[str, ...],
                 candidates: tuple[str, ...], k: int) -> Structure:
    """Encode a graph: slots for the nominals, the candidate occurrences,
    ⊥ padding to k root children, and two-way unfolding below."""
    l = len(nominals)
    if l + len(candidates) > k:
        raise ValueError("branching k too small for the nominals plus candidates")
    nomset = set(nominals)

    adjacency: dict = {}
    for (r, u, v) in g.role_assertions:
        adjacency.setdefault(u, set()).add((str(Role(r)), v))
        adjacency.setdefault(v, set()).add((str(Role(r).invert()), u))
    adjacency = {x: sorted(out) for x, out in adjacency.items()}
    concept_map: dict = {}
    for (a, b) in g.concept_assertions:
        concept_map.setdefault(b, []).append(("C", a))

    def markers(x: str):
        return [("M", rs, y) for (rs, y) in adjacency.get(x, ()) if y in nomset]

    def occ_children(x: str):
        return tuple(("occ", y, rs) for (rs, y) in adjacency.get(x, ())
                     if y not in nomset)

    symbols: dict = {("root",): ROOT_SYMBOL, ("pad",): BOT_SYMBOL}
    children: dict = {("pad",): (("pad",),)}
    root_kids: list = []
    for i, a in enumerate(nominals, start=1):
        key = ("slot", i)
        symbols[key] = make_symbol([("N", a)] + concept_map.get(a, [])
                                   + markers(a))
        children[key] = occ_children(a)
        root_kids.append(key)
    for cand in candidates:
        key = ("cand", cand)
        symbols[key] = make_symbol(concept_map.get(cand, []) + markers(cand))
        children[key] = occ_children(cand)
        root_kids.append(key)
    root_kids += [("pad",)] * (k - len(root_kids))
    children[("root",)] = tuple(root_kids)
    # close the occurrence space reachable from the depth-one nodes
    queue = [kid for kid in root_kids if kid[0] in ("slot", "cand")]
    while queue:
        key = queue.pop()
        for kid in children.get(key, ()):
            if kid in symbols:
                continue
            _tag, y, rs = kid
            symbols[kid] = make_symbol(concept_map.get(y, []) + [("R", rs)]
                                       + markers(y))
            children[kid] = occ_children(y)
            queue.append(kid)
    return Structure(("root",), symbols, children)


# ---------------------------------------------------------------------------
# the parity game
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GameArena:
    """Positions map to (owner, priority, successors).  Dead ends lose
    for their owner.  Eve wins a play iff the maximum priority occurring
    infinitely often is even (with priorities {0,1}: iff priority-1
    positions occur only finitely often — the coBüchi condition).

    Arenas built by ``arena_from_structure`` use dense integer positions
    for speed; their ``index`` maps the structured descriptions —
    ("st", key, state), ("up", key, state), ("win", player) — back to
    the integers, for inspection and tests.  Hand-built arenas may use
    any hashable positions and leave ``index`` unset."""

    initial: object
    positions: dict
    index: Optional[dict] = field(default=None, compare=False, repr=False)


def _state_index(aut: TwoATA) -> dict:
    """State -> position in ``aut.states``, cached on the builder the
    automaton's transition function is bound to (one automaton serves
    many arenas during a search)."""
    owner = getattr(aut.delta, "__self__", None)
    if isinstance(owner, _AutomatonBuilder):
        if owner._state_idx is None:
            owner._state_idx = {s: i for i, s in enumerate(aut.states)}
        return owner._state_idx
    return {s: i for i, s in enumerate(aut.states)}


def arena_from_structure(aut: TwoATA, st: Structure) -> GameArena:
    """The parity game of the automaton running over the structure's
    unravelling: Eve resolves disjunctions and picks moves, Adam
    resolves conjunctions and chooses the parent at upward moves.

    Interns every reachable (node, state) pair once and then works in
    plain integers; the inner gates of a transition formula get fresh
    indices and atoms collapse into the position they point at."""
    sidx = _state_index(aut)
    nstates = len(sidx)
    states = aut.states
    keys = list(st.symbols)
    kidx = {key: i for i, key in enumerate(keys)}
    parents = st.parents()
    par_i = [tuple(kidx[p] for p in parents[key]) for key in keys]
    kids_i = [tuple(kidx[c] for c in st.children[key]) for key in keys]
    syms = [st.symbols[key] for key in keys]
    nkids = [len(t) for t in kids_i]
    root_i = kidx[st.root]
    prio_of = [aut.priority(s) for s in states]
    delta = aut.delta

    # positions 0 and 1 are the terminal wins, owned by the loser
    WIN_E, WIN_A = 0, 1
    owner_l: list = [ADAM, EVE]
    prio_l: list = [0, 0]
    succ_l: list = [(), ()]
    interned: dict = {}
    todo: list = []

    def st_pos(ki: int, si: int) -> int:
        code = (ki * nstates + si) * 2
        p = interned.get(code)
        if p is None:
            p = len(owner_l)
            interned[code] = p
            owner_l.append(EVE)
            prio_l.append(prio_of[si])
            succ_l.append(())
            todo.append((p, ki, si))
        return p

    def up_pos(ki: int, si: int) -> int:
        code = (ki * nstates + si) * 2 + 1
        p = interned.get(code)
        if p is None:
            p = len(owner_l)
            interned[code] = p
            owner_l.append(ADAM)
            prio_l.append(0)
            succ_l.append(())
            succ_l[p] = tuple(st_pos(pi, si) for pi in par_i[ki])
        return p

    def gate(ki: int, f: PositiveBoolFormula) -> int:
        t = type(f)
        if t is PbfAtom:
            d = f.direction
            si = sidx[f.state]
            if d == 0:
                return st_pos(ki, si)
            if d > 0:
                return st_pos(kids_i[ki][d - 1], si)
            if ki == root_i:
                return WIN_A
            return up_pos(ki, si)
        if t is PbfTrue:
            return WIN_E
        if t is PbfFalse:
            return WIN_A
        succs = tuple(gate(ki, part) for part in f.parts)
        p = len(owner_l)
        owner_l.append(ADAM if t is PbfAnd else EVE)
        prio_l.append(0)
        succ_l.append(succs)
        return p

    start = st_pos(root_i, sidx[aut.initial])
    while todo:
        p, ki, si = todo.pop()
        f = delta(states[si], syms[ki], nkids[ki])
        succ_l[p] = (gate(ki, f),)

    index = {("win", EVE): WIN_E, ("win", ADAM): WIN_A}
    for code, p in interned.items():
        half, upward = divmod(code, 2)
        ki, si = divmod(half, nstates)
        index[("up" if upward else "st", keys[ki], states[si])] = p
    positions = {i: (owner_l[i], prio_l[i], succ_l[i])
                 for i in range(len(owner_l))}
    return GameArena(start, positions, index)


def solve_cobuchi(arena: GameArena) -> dict:
    """Winner of every position under the coBüchi condition.

    Two-priority Zielonka, run iteratively: Adam's attractor to the
    priority-1 positions is carved away; what remains is a core where
    Eve can keep priority 1 out of the play forever, so she wins the
    core and her attractor to it.  Remove her winnings and repeat; when
    no core is left, Adam can force priority 1 again and again from
    everything that remains.  Positions are re-indexed to dense
    integers first, so the loops touch nothing but small ints.
    """
    keys = list(arena.positions)
    n = len(keys)
    idx = {key: i for i, key in enumerate(keys)}
    total = n + 2
    sink_e, sink_a = n, n + 1  # winning self-loops replacing dead ends
    adam_owned = bytearray(total)
    prio = bytearray(total)
    succs: list = [()] * total
    for i, key in enumerate(keys):
        o, p, ss = arena.positions[key]
        if p not in (0, 1):
            raise ValueError("coBüchi arenas carry priorities 0 and 1 only")
        adam_owned[i] = o == ADAM
        prio[i] = p
        if ss:
            succs[i] = tuple(idx[s] for s in ss)
        else:
            succs[i] = (sink_e,) if o == ADAM else (sink_a,)
    adam_owned[sink_e], prio[sink_e], succs[sink_e] = 0, 0, (sink_e,)
    adam_owned[sink_a], prio[sink_a], succs[sink_a] = 1, 1, (sink_a,)
    preds: list = [[] for _ in range(total)]
    for i in range(total):
        for s in succs[i]:
            preds[s].append(i)

    region = bytearray([1]) * total
    eve = bytearray(total)

    def attractor(for_adam: int, targets: list) -> bytearray:
        attr = bytearray(total)
        out = [0] * total
        for i in range(total):
            if region[i] and adam_owned[i] != for_adam:
                out[i] = sum(1 for s in succs[i] if region[s])
        stack = list(targets)
        for t in targets:
            attr[t] = 1
        while stack:
            cur = stack.pop()
            for pre in preds[cur]:
                if not region[pre] or attr[pre]:
                    continue
                if adam_owned[pre] == for_adam:
                    attr[pre] = 1
                    stack.append(pre)
                else:
                    out[pre] -= 1
                    if not out[pre]:
                        attr[pre] = 1
                        stack.append(pre)
        return attr

    while True:
        bad = [i for i in range(total) if region[i] and prio[i]]
        if not bad:
            for i in range(total):
                if region[i]:
                    eve[i] = 1
            break
        reach_bad = attractor(1, bad)
        core = [i for i in range(total) if region[i] and not reach_bad[i]]
        if not core:
            break  # Adam forces priority 1 forever in what remains
        won = attractor(0, core)
        for i in range(total):
            if won[i]:
                eve[i] = 1
                region[i] = 0

    return {key: (EVE if eve[idx[key]] else ADAM) for key in keys}


def accepts(aut: TwoATA, st: Structure) -> bool:
    """Does the automaton accept the tree this structure unravels to?"""
    arena = arena_from_structure(aut, st)
    return solve_cobuchi(arena)[arena.initial] == EVE


# ---------------------------------------------------------------------------
# bounded emptiness
# ---------------------------------------------------------------------------

def _encodings(g: DataGraph, aut: TwoATA) -> Iterator[Structure]:
    """Encodings that jointly put every non-nominal element at depth one:
    as many candidates per encoding as the branching leaves room for."""
    noms = aut.guess.nominals
    others = sorted(set(g.domain) - set(noms))
    if not others:
        yield encode_graph(g, noms, (), aut.k)
        return
    room = aut.k - aut.l
    for i in range(0, len(others), room):
        yield encode_graph(g, noms, tuple(others[i:i + room]), aut.k)


def bounded_emptiness(aut: TwoATA, max_structure_size: int, *,
                      budget_ms: Optional[float] = None,
                      budget_graphs: Optional[int] = None) -> SearchOutcome:
    """Search for a graph whose encoding the automaton accepts.

    Enumerates canonical graphs over the automaton's signature with the
    nominals pinned, tries every candidate placement, and solves the
    induced parity game.  Bounded and guess-relative: a Witness proves
    nonemptiness for this guess (its encoding is accepted, so its
    reachable substructure validates); NoWitnessUpTo rules out accepted
    encodings only up to the size bound.
    """
    sig = (signature_of_documents(aut.doc) if aut.doc is not None
           else signature_of(aut.constraints))
    start_t = time.monotonic()
    deadline = None if budget_ms is None else start_t + budget_ms / 1000.0
    examined = 0
    for n in range(len(sig.required), max_structure_size + 1):
        for code in kernel.iter_codes(n, sig):
            if budget_graphs is not None and examined >= budget_graphs:
                return SearchOutcome(None, n - 1, examined,
                                     (time.monotonic() - start_t) * 1000.0, False)
            if deadline is not None and time.monotonic() > deadline:
                return SearchOutcome(None, n - 1, examined,
                                     (time.monotonic() - start_t) * 1000.0, False)
            examined += 1
            g = kernel.code_to_graph(code, n, sig)
            if any(accepts(aut, st) for st in _encodings(g, aut)):
                return SearchOutcome(g, n, examined,
                                     (time.monotonic() - start_t) * 1000.0, False)
    return SearchOutcome(None, max_structure_size, examined,
                         (time.monotonic() - start_t) * 1000.0, True)


def shape_sat_via_automata(c: ConstraintSet, s: ShapeName, max_nodes: int, *,
                           budget_ms: Optional[float] = None,
                           max_guesses: Optional[int] = None) -> SearchOutcome:
    """Shape satisfiability through the automata route: normalize the
    closure of ``s``, build one automaton per guess, and report the
    first graph accepted under any guess.  The cross-check twin of
    ``search.shape_sat_bounded`` at matched bounds."""
    cn = normalize(restrict_to(c, s))
    sig = signature_of(cn)
    auts = [build_2ata(cn, s, guess)
            for guess in enumerate_guesses(cn, max_guesses=max_guesses)]
    start_t = time.monotonic()
    deadline = None if budget_ms is None else start_t + budget_ms / 1000.0
    examined = 0
    for n in range(len(sig.required), max_nodes + 1):
        for code in kernel.iter_codes(n, sig):
            if deadline is not None and time.monotonic() > deadline:
                return SearchOutcome(None, n - 1, examined,
                                     (time.monotonic() - start_t) * 1000.0, False)
            examined += 1
            g = kernel.code_to_graph(code, n, sig)
            for aut in auts:
                if any(accepts(aut, st) for st in _encodings(g, aut)):
                    return SearchOutcome(g, n, examined,
                                         (time.monotonic() - start_t) * 1000.0,
                                         False)
    return SearchOutcome(None, max_nodes, examined,
                         (time.monotonic() - start_t) * 1000.0, True)
