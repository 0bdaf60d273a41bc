"""Three-valued validation: bound evaluation, the positive-consequence and
unfounded-set operators, the fixpoint iteration, and target checking."""

from __future__ import annotations

import itertools
import random

import pytest

from shaclwf.model import (Concept, ConstraintSet, DataGraph, Exists, ForAll,
                           NotShape, Or, Role, ShapeRef)
from shaclwf.syntax import parse_document
from shaclwf.wf import (EngineError, IncompatibleGraph, Polarity,
                        ShapeAssignment, eval_expr, format_trace,
                        greatest_unfounded, t_operator, validates,
                        w_operator, well_founded_model)

from conftest import random_constraint_set, random_graph


def brute_greatest_unfounded(g, c, assign):
    """Union of every self-consistent candidate set, by exhaustion.

    A set is unfounded when assuming all its members false already pushes
    each member outside its body's upper bound; the union of all such
    sets is the greatest one.  Exponential, so callers keep instances
    to a handful of atoms.
    """
    pairs = [(s, a) for s in c.names() for a in sorted(g.domain)]
    best = set()
    for k in range(len(pairs) + 1):
        for combo in itertools.combinations(pairs, k):
            x = frozenset(combo)
            ext = ShapeAssignment(assign.positive, assign.negative | x)
            if all(a not in eval_expr(c[s], g, ext, Polarity.UPPER)
                   for (s, a) in x):
                best |= x
    return frozenset(best)


# ---------------------------------------------------------------------------
# assignments
# ---------------------------------------------------------------------------

def test_make_rejects_overlapping_literals():
    with pytest.raises(EngineError):
        ShapeAssignment.make({("s", "a")}, {("s", "a")})


def test_literals_are_sorted_positives_first():
    a = ShapeAssignment.make({("s", "b"), ("s", "a")}, {("t", "a")})
    assert a.literals() == ["s(a)", "s(b)", "¬t(a)"]


def test_is_total_and_issubset():
    small = ShapeAssignment.make({("s", "a")}, set())
    big = ShapeAssignment.make({("s", "a")}, {("s", "b")})
    assert small.issubset(big) and not big.issubset(small)
    assert big.is_total(["s"], ["a", "b"])
    assert not small.is_total(["s"], ["a", "b"])


# ---------------------------------------------------------------------------
# bound evaluation
# ---------------------------------------------------------------------------

def test_reference_bounds_read_the_assignment():
    g = DataGraph.build([("A", "x"), ("A", "y")], [])
    assign = ShapeAssignment.make({("s", "x")}, {("s", "y")})
    assert eval_expr(ShapeRef("s"), g, assign, Polarity.LOWER) == {"x"}
    assert eval_expr(ShapeRef("s"), g, assign, Polarity.UPPER) == {"x"}
    assert eval_expr(NotShape("s"), g, assign, Polarity.LOWER) == {"y"}
    assert eval_expr(NotShape("s"), g, assign, Polarity.UPPER) == {"y"}


def test_undecided_references_split_the_bounds():
    g = DataGraph.build([("A", "x")], [])
    empty = ShapeAssignment.make()
    assert eval_expr(ShapeRef("s"), g, empty, Polarity.LOWER) == frozenset()
    assert eval_expr(ShapeRef("s"), g, empty, Polarity.UPPER) == {"x"}
    assert eval_expr(NotShape("s"), g, empty, Polarity.LOWER) == frozenset()
    assert eval_expr(NotShape("s"), g, empty, Polarity.UPPER) == {"x"}


def test_quantifiers_follow_role_orientation():
    g = DataGraph.build([("A", "y")], [("r", "x", "y")])
    empty = ShapeAssignment.make()
    assert eval_expr(Exists(Role("r"), Concept("A")), g, empty,
                     Polarity.LOWER) == {"x"}
    assert eval_expr(Exists(Role("r", True), Concept("A")), g, empty,
                     Polarity.LOWER) == frozenset()
    # no successors makes a universal vacuously true
    assert eval_expr(ForAll(Role("r"), Concept("A")), g, empty,
                     Polarity.LOWER) == {"x", "y"}


def test_lower_bound_is_below_upper_bound_randomized():
    rng = random.Random(41)
    for _ in range(30):
        c = random_constraint_set(rng, n_shapes=2, depth=2)
        g = random_graph(rng, max_nodes=3)
        model = well_founded_model(g, c).model
        for name in c.names():
            low = eval_expr(c[name], g, model, Polarity.LOWER)
            up = eval_expr(c[name], g, model, Polarity.UPPER)
            assert low <= up


# ---------------------------------------------------------------------------
# the two operator halves
# ---------------------------------------------------------------------------

def test_positive_consequences_need_established_support():
    c = ConstraintSet([("s", Or(Concept("A"), ShapeRef("t"))),
                       ("t", Concept("B"))])
    g = DataGraph.build([("A", "x"), ("B", "y")], [])
    empty = ShapeAssignment.make()
    assert t_operator(g, c, empty) == {("s", "x"), ("t", "y")}
    after = ShapeAssignment.make({("t", "y")}, set())
    assert ("s", "y") in t_operator(g, c, after)


def test_unfounded_atoms_with_no_possible_support():
    c = ConstraintSet([("s", Exists(Role("r"), ShapeRef("s")))])
    g = DataGraph.build([], [("r", "0", "0"), ("r", "0", "1")])
    u = greatest_unfounded(g, c, ShapeAssignment.make())
    assert u == {("s", "0"), ("s", "1")}


def test_mutual_negation_has_no_unfounded_atoms():
    c = ConstraintSet([("s", NotShape("t")), ("t", NotShape("s"))])
    g = DataGraph.build([("A", "x")], [])
    empty = ShapeAssignment.make()
    assert t_operator(g, c, empty) == frozenset()
    assert greatest_unfounded(g, c, empty) == frozenset()
    assert w_operator(g, c, empty) == ShapeAssignment()


def test_greatest_unfounded_matches_brute_force():
    rng = random.Random(5)
    for _ in range(40):
        c = random_constraint_set(rng, n_shapes=2, depth=2)
        g = random_graph(rng, max_nodes=2)
        trace = well_founded_model(g, c).trace
        for assign in [ShapeAssignment.make(), *trace[:2]]:
            assert (greatest_unfounded(g, c, assign)
                    == brute_greatest_unfounded(g, c, assign))


def test_w_operator_is_monotone_on_consistent_assignments():
    rng = random.Random(43)
    for _ in range(40):
        c = random_constraint_set(rng, n_shapes=2, depth=2)
        g = random_graph(rng, max_nodes=3)
        model = well_founded_model(g, c).model
        pos = sorted(model.positive)
        neg = sorted(model.negative)
        small = ShapeAssignment.make(
            {x for x in pos if rng.random() < 0.4},
            {x for x in neg if rng.random() < 0.4})
        grow = ShapeAssignment.make(
            set(small.positive) | {x for x in pos if rng.random() < 0.5},
            set(small.negative) | {x for x in neg if rng.random() < 0.5})
        assert w_operator(g, c, small).issubset(w_operator(g, c, grow))


# ---------------------------------------------------------------------------
# fixpoint iteration
# ---------------------------------------------------------------------------

def test_example_chain_first_four_iterates(g1, ex1_doc):
    res = well_founded_model(g1, ex1_doc.constraints)
    assert len(res.trace) == 14
    expected = [
        ({("s", "6")}, set()),
        ({("s", "6")}, {("t", "6")}),
        ({("s", "5"), ("s", "6")}, {("t", "6")}),
        ({("s", "5"), ("s", "6")}, {("t", "5"), ("t", "6")}),
    ]
    for it, (pos, neg) in zip(res.trace, expected):
        assert it.positive == frozenset(pos)
        assert it.negative == frozenset(neg)


def test_example_chain_trace_rendering(g1, ex1_doc):
    res = well_founded_model(g1, ex1_doc.constraints)
    lines = format_trace(res.trace).splitlines()
    assert lines[:4] == [
        "1: s(6)",
        "2: s(6) ¬t(6)",
        "3: s(5) s(6) ¬t(6)",
        "4: s(5) s(6) ¬t(5) ¬t(6)",
    ]
    assert len(lines) == 14


def test_example_chain_final_model(g1, ex1_doc):
    res = well_founded_model(g1, ex1_doc.constraints)
    assert ("s", "0") in res.model.positive
    assert res.model.is_total(ex1_doc.constraints.names(), g1.domain)
    assert res.trace[-1] == res.model


def test_two_cycle_graph_has_the_empty_model(g2, ex1_doc):
    res = well_founded_model(g2, ex1_doc.constraints)
    assert res.model == ShapeAssignment()
    assert res.trace == ()


def test_trace_is_strictly_increasing_randomized():
    rng = random.Random(47)
    for _ in range(30):
        c = random_constraint_set(rng, n_shapes=3, depth=3)
        g = random_graph(rng, max_nodes=3)
        res = well_founded_model(g, c)
        prev = ShapeAssignment()
        for it in res.trace:
            assert prev.issubset(it) and prev != it
            assert not (it.positive & it.negative)
            prev = it
        assert w_operator(g, c, res.model) == res.model


# ---------------------------------------------------------------------------
# targets
# ---------------------------------------------------------------------------

def test_validates_example_documents(g1, g2, ex1_doc):
    assert validates(g1, ex1_doc) is True
    assert validates(g2, ex1_doc) is False


def test_node_target_requires_a_positive_literal():
    d = parse_document("s <- A\ntarget node <x> s\n")
    assert validates(DataGraph.build([("A", "x")], []), d)
    assert not validates(DataGraph.build([("B", "x"), ("A", "y")], []), d)


def test_class_target_checks_every_member():
    d = parse_document("s <- B\ntarget class A s\n")
    g_ok = DataGraph.build([("A", "x"), ("B", "x"), ("A", "y"), ("B", "y")], [])
    g_bad = DataGraph.build([("A", "x"), ("B", "x"), ("A", "y")], [])
    assert validates(g_ok, d)
    assert not validates(g_bad, d)


def test_role_target_binds_edge_subjects():
    d = parse_document("s <- A\ntarget role r s\n")
    assert validates(DataGraph.build([("A", "x")], [("r", "x", "y")]), d)
    assert not validates(DataGraph.build([("A", "x")], [("r", "y", "x")]), d)


def test_inverted_role_target_binds_edge_objects():
    d = parse_document("s <- A\ntarget role r- s\n")
    assert validates(DataGraph.build([("A", "x")], [("r", "y", "x")]), d)
    assert not validates(DataGraph.build([("A", "x")], [("r", "x", "y")]), d)


def test_validates_accepts_a_precomputed_model(g1, ex1_doc):
    model = well_founded_model(g1, ex1_doc.constraints).model
    assert validates(g1, ex1_doc, model) is True


def test_validates_rejects_graphs_missing_target_individuals(ex1_doc):
    g = DataGraph.build([("A", "zz")], [])
    with pytest.raises(IncompatibleGraph, match="individuals not in the graph"):
        validates(g, ex1_doc)


def test_undefined_verdict_counts_as_non_validating():
    # a target whose literal stays undefined must not validate
    d = parse_document("s <- !t\nt <- !s\ntarget node <x> s\n")
    assert not validates(DataGraph.build([("A", "x")], []), d)
