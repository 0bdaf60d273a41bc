"""Core data model: graphs, roles, constraint sets, documents, normal form."""

from __future__ import annotations

import random

import pytest

from shaclwf.model import (And, Concept, ConstraintSet, DataGraph, Document,
                           Exists, ForAll, Nominal, NotShape, Or, ParseError,
                           Role, ShaclError, ShapeRef, Target, UndefinedShape,
                           TARGET_CLASS, TARGET_NODE, TARGET_ROLE,
                           normalize, restrict_to, shape_deps, sub)
from shaclwf.wf import well_founded_model

from conftest import random_constraint_set, random_graph


# ---------------------------------------------------------------------------
# roles
# ---------------------------------------------------------------------------

def test_role_parse_and_text():
    assert Role.parse("r") == Role("r", inverted=False)
    assert Role.parse("r-") == Role("r", inverted=True)
    assert str(Role("r")) == "r"
    assert str(Role("r", True)) == "r-"


def test_role_invert_is_involutive():
    r = Role("edge")
    assert r.invert() == Role("edge", True)
    assert r.invert().invert() == r


def test_roles_are_ordered():
    assert Role("r") < Role("r", True)
    assert sorted([Role("s"), Role("r", True), Role("r")]) == [
        Role("r"), Role("r", True), Role("s")]


# ---------------------------------------------------------------------------
# data graphs
# ---------------------------------------------------------------------------

def test_graph_domain_is_the_individuals_mentioned():
    g = DataGraph.build([("A", "x")], [("r", "x", "y")])
    assert g.domain == frozenset({"x", "y"})


def test_graph_domain_empty_graph():
    assert DataGraph.build([], []).domain == frozenset()


def test_graph_equality_is_structural():
    g1 = DataGraph.build([("A", "x")], [("r", "x", "y")])
    g2 = DataGraph.build([("A", "x")], [("r", "x", "y")])
    assert g1 == g2 and hash(g1) == hash(g2)


# ---------------------------------------------------------------------------
# constraint sets
# ---------------------------------------------------------------------------

def test_duplicate_heads_are_rejected():
    with pytest.raises(ShaclError, match="head of more than one"):
        ConstraintSet([("s", Concept("A")), ("s", Concept("B"))])


def test_lookup_of_undefined_shape():
    c = ConstraintSet([("s", Concept("A"))])
    assert c["s"] == Concept("A")
    with pytest.raises(UndefinedShape, match="'zz' has no defining constraint"):
        c["zz"]


def test_dangling_reference_is_caught_by_check_references():
    c = ConstraintSet([("s", ShapeRef("ghost"))])
    with pytest.raises(UndefinedShape, match="referenced from 's'"):
        c.check_references()


def test_names_preserve_definition_order():
    c = ConstraintSet([("b", Concept("A")), ("a", Concept("B"))])
    assert c.names() == ("b", "a")


# ---------------------------------------------------------------------------
# targets and documents
# ---------------------------------------------------------------------------

def test_role_target_requires_role_subject():
    with pytest.raises(ValueError, match="need a Role subject"):
        Target(TARGET_ROLE, "r", "s")
    Target(TARGET_ROLE, Role("r"), "s")  # fine


def test_document_rejects_target_on_undefined_shape():
    c = ConstraintSet([("s", Concept("A"))])
    with pytest.raises(UndefinedShape, match="target shape 'ghost'"):
        Document(c, (Target(TARGET_NODE, "a", "ghost"),))


def test_document_accepts_all_target_kinds():
    c = ConstraintSet([("s", Concept("A"))])
    d = Document(c, (Target(TARGET_NODE, "a", "s"),
                     Target(TARGET_CLASS, "A", "s"),
                     Target(TARGET_ROLE, Role("r", True), "s")))
    assert len(d.targets) == 3


# ---------------------------------------------------------------------------
# expression helpers
# ---------------------------------------------------------------------------

def test_sub_closure_includes_flipped_reference():
    parts = sub(NotShape("s"))
    assert NotShape("s") in parts and ShapeRef("s") in parts


def test_sub_closure_walks_the_whole_tree():
    e = And(Exists(Role("r"), Concept("A")), Or(Nominal("a"), ShapeRef("s")))
    parts = sub(e)
    assert Concept("A") in parts and Nominal("a") in parts
    assert Exists(Role("r"), Concept("A")) in parts


def test_shape_deps_reports_sign():
    e = Or(NotShape("s"), Exists(Role("r"), ShapeRef("t")))
    assert sorted(shape_deps(e)) == [("s", True), ("t", False)]


def test_shape_deps_is_empty_on_reference_free_bodies():
    assert list(shape_deps(And(Concept("A"), Nominal("a")))) == []


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------

def _is_atomic_or_flat(c: ConstraintSet, e) -> bool:
    """Normal form: every operand of a composite body is a literal or a
    (possibly negated) reference to another defined shape."""
    leaves = {Concept, Nominal, ShapeRef, NotShape}
    if type(e) in leaves:
        return True
    if isinstance(e, (And, Or)):
        return type(e.left) in leaves and type(e.right) in leaves
    if isinstance(e, (Exists, ForAll)):
        return type(e.body) in leaves
    return False


def test_normalize_flattens_nested_bodies():
    c = ConstraintSet([
        ("s", Or(Concept("A"), Exists(Role("p"), NotShape("t")))),
        ("t", Or(NotShape("s"), Exists(Role("r"), ShapeRef("t")))),
    ])
    n = normalize(c)
    assert set(n.names()) >= {"s", "t"}
    for name in n.names():
        assert _is_atomic_or_flat(n, n[name]), name
    n.check_references()


def test_normalize_fresh_names_carry_the_head():
    c = ConstraintSet([
        ("s", Or(Concept("A"), Exists(Role("p"), NotShape("t")))),
        ("t", Or(NotShape("s"), Exists(Role("r"), ShapeRef("t")))),
    ])
    fresh = [x for x in normalize(c).names() if "#" in x]
    assert fresh and all(x.split("#")[0] in ("s", "t") for x in fresh)


def test_normalize_is_idempotent():
    rng = random.Random(7)
    for _ in range(25):
        c = random_constraint_set(rng, n_shapes=3, depth=3)
        n = normalize(c)
        assert normalize(n) == n


def test_normalize_rewrites_aliases_without_indirection_chains():
    # an alias head must become a flat body over defined shapes, not a
    # bare reference that normal-form consumers would have to chase
    c = ConstraintSet([("s", ShapeRef("u")), ("u", Concept("A"))])
    n = normalize(c)
    assert n["s"] == Or(ShapeRef("u"), ShapeRef("u"))
    assert n["u"] == Concept("A")


def test_normalize_preserves_wf_verdicts():
    rng = random.Random(11)
    for _ in range(30):
        c = random_constraint_set(rng, n_shapes=3, depth=3)
        g = random_graph(rng, max_nodes=3)
        base = well_founded_model(g, c).model
        n = normalize(c)
        lifted = well_founded_model(g, n).model
        keep = set(c.names())
        assert {x for x in base.positive} == {
            x for x in lifted.positive if x[0] in keep}
        assert {x for x in base.negative} == {
            x for x in lifted.negative if x[0] in keep}


# ---------------------------------------------------------------------------
# restriction
# ---------------------------------------------------------------------------

def test_restrict_to_keeps_exactly_the_reachable_definitions():
    c = ConstraintSet([
        ("s", Exists(Role("r"), ShapeRef("t"))),
        ("t", Concept("A")),
        ("orphan", Concept("B")),
    ])
    r = restrict_to(c, "s")
    assert set(r.names()) == {"s", "t"}


def test_restrict_to_follows_negative_references():
    c = ConstraintSet([("s", NotShape("t")), ("t", Concept("A")),
                       ("u", Concept("B"))])
    assert set(restrict_to(c, "s").names()) == {"s", "t"}


def test_restrict_to_unknown_shape_raises():
    c = ConstraintSet([("s", Concept("A"))])
    with pytest.raises(UndefinedShape):
        restrict_to(c, "zz")


# ---------------------------------------------------------------------------
# error type
# ---------------------------------------------------------------------------

def test_parse_error_carries_position():
    e = ParseError("boom", 3, 7)
    assert str(e) == "line 3, column 7: boom"
    assert e.line == 3 and e.column == 7
