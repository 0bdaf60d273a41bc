"""Compilation of shape constraints into closed fixpoint formulas, the
per-node target formula, its propagated form, and the derived
satisfiability/implication formulas."""

from __future__ import annotations

import random

import pytest

from shaclwf import mu
from shaclwf.model import ConstraintSet, Concept, Document
from shaclwf.mu import cln, mu_to_text, parse_mu
from shaclwf.syntax import parse_document, parse_graph
from shaclwf.translate import (TranslationBudget, add_hub, doc_sat_formula,
                               fresh_role, implication_formula, lambda_,
                               theta, translate, variable_names)
from shaclwf.wf import well_founded_model

from conftest import fixture_text, random_constraint_set, random_graph


# ---------------------------------------------------------------------------
# variable naming
# ---------------------------------------------------------------------------

def test_variable_names_reflect_shape_and_sign():
    c = ConstraintSet([("s", Concept("A")), ("t", Concept("B"))])
    names = variable_names(c)
    assert names[("s", True)] == "X_s"
    assert names[("s", False)] == "X_not_s"


def test_variable_names_dodge_collisions():
    c = ConstraintSet([("t", Concept("A")), ("not_t", Concept("B"))])
    names = variable_names(c)
    assert names[("t", False)] == "X_not_t"
    assert names[("not_t", True)] == "X_not_t_2"
    assert len(set(names.values())) == len(names)


# ---------------------------------------------------------------------------
# the shape-to-formula translation
# ---------------------------------------------------------------------------

def test_translation_golden(ex1_doc):
    f = translate(ex1_doc.constraints, "s", clean=True)
    assert mu_to_text(f) == "mu X_s . (A | <p> nu X_not_t . (X_s & [r] X_not_t))"
    # already clean: the raw translation has no vacuous binder here
    assert translate(ex1_doc.constraints, "s") == f


def test_translation_golden_alternating(p10_doc):
    f = translate(p10_doc.constraints, "s", clean=True)
    assert mu_to_text(f) == "nu X_not_s1 . (<r> X_not_s1 & mu X_s2 . [r-] X_s2)"
    raw = translate(p10_doc.constraints, "s")
    assert mu_to_text(raw) == (
        "mu X_s . nu X_not_s1 . (<r> X_not_s1 & mu X_s2 . [r-] X_s2)")
    assert cln(raw) == f


def test_translation_matches_the_shipped_formula(ex1_doc):
    assert translate(ex1_doc.constraints, "s", clean=True) == parse_mu(
        fixture_text("example3.mu"))


def test_translation_evaluates_like_validation_on_the_example(g1, ex1_doc):
    f = translate(ex1_doc.constraints, "s", clean=True)
    assert mu.eval(f, g1, {}) == g1.domain


def test_translation_restricts_to_the_requested_shape():
    c = ConstraintSet([("s", Concept("A")), ("orphan", Concept("B"))])
    assert "B" not in mu_to_text(translate(c, "s", clean=True))


def test_translation_agrees_with_wf_positive_extension_randomized():
    rng = random.Random(71)
    for _ in range(40):
        c = random_constraint_set(rng, n_shapes=2, depth=2)
        g = random_graph(rng, max_nodes=3)
        model = well_founded_model(g, c).model
        for s in c.names():
            wf_ext = frozenset(a for name, a in model.positive if name == s)
            assert mu.eval(translate(c, s), g, {}) == wf_ext
            assert mu.eval(translate(c, s, clean=True), g, {}) == wf_ext


def test_translation_budget_is_enforced(ex1_doc):
    with pytest.raises(TranslationBudget, match="exceeds the 5-node budget"):
        translate(ex1_doc.constraints, "s", budget=5)


# ---------------------------------------------------------------------------
# target formulas
# ---------------------------------------------------------------------------

def test_node_target_formula(ex1_doc):
    assert mu_to_text(theta(ex1_doc)) == (
        "!@0 | mu X_s . (A | <p> nu X_not_t . (X_s & [r] X_not_t))")


def test_class_target_formula():
    d = parse_document("s <- B\ntarget class A s\n")
    assert mu_to_text(theta(d)) == "!A | mu X_s . B"


def test_role_target_formula_guards_edge_subjects():
    d = parse_document("s <- B\ntarget role r- s\n")
    assert mu_to_text(theta(d)) == "[r-] false | mu X_s . B"


def test_no_targets_means_no_obligations(ex1_doc):
    bare = Document(ex1_doc.constraints, ())
    assert mu_to_text(theta(bare)) == "true"


def test_propagated_target_formula_covers_all_roles_both_ways(ex1_doc):
    text = mu_to_text(lambda_(ex1_doc, "q"))
    assert text.startswith("nu X . ((!@0 | mu X_s . ")
    for box in ("[p] X", "[r] X", "[q] X", "[p-] X", "[r-] X", "[q-] X"):
        assert box in text


def test_theta_holds_exactly_where_targets_validate(g1, ex1_doc):
    # every node satisfies the target formula on the validating example
    assert mu.eval(theta(ex1_doc), g1, {}) == g1.domain


# ---------------------------------------------------------------------------
# the hub construction
# ---------------------------------------------------------------------------

def test_fresh_role_avoids_document_roles(ex1_doc):
    assert fresh_role(ex1_doc) == "__fresh_p0"
    coll = parse_document("s <- some __fresh_p0 . s\ntarget node <a> s\n")
    assert fresh_role(coll) == "__fresh_p1"


def test_add_hub_reaches_every_node():
    g = parse_graph("B(a)\nr(a,b)\n")
    h = add_hub(g, "q")
    assert h.domain == g.domain | {"__hub"}
    assert h.successors("__hub", mu.Role("q")) == g.domain | {"__hub"}
    # the fresh role's inverse leads back to the hub
    assert h.successors("a", mu.Role("q", True)) == {"__hub"}


# ---------------------------------------------------------------------------
# derived satisfiability and implication formulas
# ---------------------------------------------------------------------------

def test_implication_formula_golden(impl_a_doc, impl_b_doc):
    f = implication_formula(impl_a_doc, impl_b_doc)
    assert mu_to_text(f) == (
        "<__fresh_p0> (@a & nu X . ((!@a | mu X_s . (A | B)) & "
        "[__fresh_p0-] X & [__fresh_p0] X)) & "
        "<__fresh_p0> mu X . ((@a & nu X_s . !A) | <__fresh_p0-> X | <__fresh_p0> X)")


def test_implication_formula_detects_the_counterexample(impl_a_doc, impl_b_doc):
    g = parse_graph("B(a)\n")
    hub = add_hub(g, fresh_role(impl_a_doc, impl_b_doc))
    holds = implication_formula(impl_a_doc, impl_b_doc)
    assert "__hub" in mu.eval(holds, hub, {})
    # the reverse direction has no counterexample on this graph
    fails = implication_formula(impl_b_doc, impl_a_doc)
    assert mu.eval(fails, hub, {}) == frozenset()


def test_doc_sat_formula_is_satisfied_on_the_example(g1, ex1_doc):
    f = doc_sat_formula(ex1_doc)
    hub = add_hub(g1, fresh_role(ex1_doc))
    assert "__hub" in mu.eval(f, hub, {})


def test_doc_sat_formula_fails_on_a_violating_graph(g2, ex1_doc):
    f = doc_sat_formula(ex1_doc)
    hub = add_hub(g2, fresh_role(ex1_doc))
    assert "__hub" not in mu.eval(f, hub, {})
