"""Shared fixtures and oracles for the test suite.

The random generators are seeded and deterministic: every test that uses
them derives its own ``random.Random`` from a literal seed, so failures
reproduce without any re-run flags.  The brute-force game oracle here is
deliberately independent of the production solver: it enumerates Eve's
positional strategies outright, which is hopeless in general but exact
on the tiny arenas the tests build.
"""

from __future__ import annotations

import itertools
import random
from pathlib import Path

import pytest

from shaclwf.automata import ADAM, EVE, GameArena
from shaclwf.model import (And, Concept, ConstraintSet, DataGraph, Document,
                           Exists, ForAll, Nominal, NotShape, Or, Role,
                           ShapeRef, normalize)
from shaclwf.syntax import parse_document, parse_graph

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


# ---------------------------------------------------------------------------
# fixture corpus
# ---------------------------------------------------------------------------

@pytest.fixture(scope="session")
def g1() -> DataGraph:
    return parse_graph(fixture_text("g1.graph"))


@pytest.fixture(scope="session")
def g2() -> DataGraph:
    return parse_graph(fixture_text("g2.graph"))


@pytest.fixture(scope="session")
def ex1_doc() -> Document:
    return parse_document(fixture_text("ex1.shacl"))


@pytest.fixture(scope="session")
def p10_doc() -> Document:
    return parse_document(fixture_text("no_finite_model.shacl"))


@pytest.fixture(scope="session")
def impl_a_doc() -> Document:
    return parse_document(fixture_text("impl_a.shacl"))


@pytest.fixture(scope="session")
def impl_b_doc() -> Document:
    return parse_document(fixture_text("impl_b.shacl"))


# ---------------------------------------------------------------------------
# seeded random generators
# ---------------------------------------------------------------------------

def random_graph(rng: random.Random, max_nodes: int = 4,
                 concepts=("A", "B"), roles=("r", "p"),
                 individuals=()) -> DataGraph:
    """A random graph over small node ids; individuals are always present."""
    n = rng.randint(max(1, len(individuals)), max(max_nodes, len(individuals)))
    nodes = sorted(set(individuals) | {str(i) for i in range(n - len(individuals))})
    cas = [(c, v) for c in concepts for v in nodes if rng.random() < 0.4]
    ras = [(r, v, w) for r in roles for v in nodes for w in nodes
           if rng.random() < min(0.9, 1.6 / len(nodes))]
    if not cas and not ras:
        cas = [(concepts[0], nodes[0])]
    return DataGraph.build(cas, ras)


def random_expr(rng: random.Random, depth: int, shapes, concepts=("A", "B"),
                roles=("r", "p"), nominals=(), *, positive_only=False,
                strict_shapes=None):
    """A random shape expression.

    ``shapes`` feeds plain references; ``strict_shapes`` (when given)
    feeds negated references, letting stratified generators draw the
    two pools from different layers.  ``positive_only`` suppresses
    negated references entirely.
    """
    neg_pool = shapes if strict_shapes is None else strict_shapes
    leaf_kinds = ["concept"]
    if shapes:
        leaf_kinds.append("ref")
    if neg_pool and not positive_only:
        leaf_kinds.append("notref")
    if nominals:
        leaf_kinds.append("nominal")
    if depth <= 0 or rng.random() < 0.3:
        kind = rng.choice(leaf_kinds)
        if kind == "concept":
            return Concept(rng.choice(concepts))
        if kind == "ref":
            return ShapeRef(rng.choice(shapes))
        if kind == "notref":
            return NotShape(rng.choice(neg_pool))
        return Nominal(rng.choice(nominals))
    kind = rng.choice(["and", "or", "exists", "forall"])
    if kind in ("and", "or"):
        left = random_expr(rng, depth - 1, shapes, concepts, roles, nominals,
                           positive_only=positive_only, strict_shapes=strict_shapes)
        right = random_expr(rng, depth - 1, shapes, concepts, roles, nominals,
                            positive_only=positive_only, strict_shapes=strict_shapes)
        return And(left, right) if kind == "and" else Or(left, right)
    role = Role(rng.choice(roles), inverted=rng.random() < 0.3)
    body = random_expr(rng, depth - 1, shapes, concepts, roles, nominals,
                       positive_only=positive_only, strict_shapes=strict_shapes)
    return Exists(role, body) if kind == "exists" else ForAll(role, body)


def random_constraint_set(rng: random.Random, n_shapes: int = 3,
                          depth: int = 3, concepts=("A", "B"),
                          roles=("r", "p"), nominals=(),
                          max_normalized_defs: int | None = None) -> ConstraintSet:
    """A random, possibly cyclic constraint set.

    When ``max_normalized_defs`` is set, regenerate until the normalized
    form stays within that many definitions (a size gate, not a bias on
    the shapes that fit).
    """
    names = [f"s{i}" for i in range(n_shapes)]
    while True:
        defs = [(name, random_expr(rng, depth, names, concepts, roles, nominals))
                for name in names]
        c = ConstraintSet(defs)
        if max_normalized_defs is None:
            return c
        if len(normalize(c).names()) <= max_normalized_defs:
            return c


def random_stratified_set(rng: random.Random, layers: int = 3,
                          per_layer: int = 2, depth: int = 2,
                          concepts=("A", "B"), roles=("r", "p")) -> ConstraintSet:
    """A random constraint set whose negative references all point to
    strictly lower layers (so a stratification exists by construction)."""
    defs = []
    below: list[str] = []
    for layer in range(layers):
        here = [f"t{layer}_{i}" for i in range(per_layer)]
        for name in here:
            body = random_expr(rng, depth, below + here, concepts, roles,
                               strict_shapes=below if below else None,
                               positive_only=not below)
            defs.append((name, body))
        below.extend(here)
    return ConstraintSet(defs)


# ---------------------------------------------------------------------------
# brute-force game oracle
# ---------------------------------------------------------------------------

def brute_force_cobuchi(arena: GameArena) -> dict:
    """Exact winners by enumerating Eve's positional strategies.

    Fixing a strategy leaves every remaining choice to Adam, so Eve wins
    a position exactly when some strategy makes every Adam walk safe:
    no reachable dead end she owns, and no reachable cycle through a
    priority-1 position (Adam would loop it forever).  Positional
    strategies suffice for parity games, so this is a complete check.
    """
    positions = arena.positions
    keys = list(positions)
    eve_options = {p: positions[p][2] for p in keys
                   if positions[p][0] == EVE and positions[p][2]}
    option_keys = list(eve_options)
    winners = {p: ADAM for p in keys}
    for combo in itertools.product(*(eve_options[k] for k in option_keys)):
        sigma = dict(zip(option_keys, combo))
        succ = {}
        for p in keys:
            owner, _prio, succs = positions[p]
            succ[p] = (sigma[p],) if p in sigma else (() if owner == EVE else succs)
        for p in keys:
            if winners[p] == EVE:
                continue
            reach = set()
            stack = [p]
            while stack:
                q = stack.pop()
                if q in reach:
                    continue
                reach.add(q)
                stack.extend(succ[q])
            safe = all(succ[q] or positions[q][0] == ADAM for q in reach)
            if safe:
                for q in reach:
                    if positions[q][1] == 1 and _reaches(succ, q, q):
                        safe = False
                        break
            if safe:
                winners[p] = EVE
    return winners


def _reaches(succ: dict, start, goal) -> bool:
    seen = set()
    stack = list(succ[start])
    while stack:
        q = stack.pop()
        if q == goal:
            return True
        if q in seen:
            continue
        seen.add(q)
        stack.extend(succ[q])
    return False


def random_arena(rng: random.Random, max_positions: int = 7) -> GameArena:
    """A small random two-priority arena, dead ends included."""
    n = rng.randint(2, max_positions)
    positions = {}
    for p in range(n):
        owner = rng.choice([EVE, ADAM])
        prio = 1 if rng.random() < 0.35 else 0
        out = rng.randint(0, 3)
        succs = tuple(rng.randrange(n) for _ in range(out))
        positions[p] = (owner, prio, succs)
    return GameArena(0, positions)
