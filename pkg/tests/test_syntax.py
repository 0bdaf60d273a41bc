"""Text formats: graphs, shape expressions, documents, round-trips."""

from __future__ import annotations

import random

import pytest

from shaclwf.model import (And, Concept, DataGraph, Exists, Nominal, Or,
                           ParseError, Role, ShaclError, ShapeRef, Target,
                           TARGET_CLASS, TARGET_NODE, TARGET_ROLE)
from shaclwf.syntax import (document_to_text, expr_to_text, graph_to_text,
                            parse_document, parse_expr, parse_graph)

from conftest import fixture_text, random_graph


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------

def test_parse_graph_assertions_and_comments():
    g = parse_graph("# a comment\nA(x)   # trailing comment\n\nr(x,y)\n")
    assert g == DataGraph.build([("A", "x")], [("r", "x", "y")])


def test_parse_graph_of_nothing_is_empty():
    assert parse_graph("  \n# only a comment\n").domain == frozenset()


def test_graph_text_is_sorted_and_round_trips():
    g = DataGraph.build([("B", "y"), ("A", "x")], [("r", "y", "x"), ("p", "x", "x")])
    text = graph_to_text(g)
    assert text == "A(x)\nB(y)\np(x,x)\nr(y,x)\n"
    assert parse_graph(text) == g


def test_graph_round_trip_randomized():
    rng = random.Random(3)
    for _ in range(40):
        g = random_graph(rng, max_nodes=4)
        assert parse_graph(graph_to_text(g)) == g


@pytest.mark.parametrize("text,fragment", [
    ("A(x", "not an assertion"),
    ("a(x)", "concept name 'a' must start uppercase"),
    ("R(x,y)", "role name 'R' must start lowercase"),
])
def test_parse_graph_errors(text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_graph(text + "\n")


def test_parse_graph_error_carries_line_number():
    with pytest.raises(ParseError) as err:
        parse_graph("A(x)\nB(y)\noops\n")
    assert err.value.line == 3 and err.value.column == 1


# ---------------------------------------------------------------------------
# shape expressions
# ---------------------------------------------------------------------------

def test_expression_grammar_shapes():
    e = parse_expr("A & !s | some r- . t", {"s", "t"})
    assert expr_to_text(e) == "A & !s | some r- . t"
    assert isinstance(e, Or) and isinstance(e.left, And)


def test_or_binds_loosest_and_binds_mid():
    e = parse_expr("A | B & Top", set())
    assert isinstance(e, Or) and isinstance(e.right, And)


def test_quantifier_grabs_one_atom():
    e = parse_expr("some r . A & B", set())
    assert e == And(Exists(Role("r"), Concept("A")), Concept("B"))


def test_parenthesized_quantifier_body():
    e = parse_expr("all r- . (A | B)", set())
    assert expr_to_text(e) == "all r- . (A | B)"
    assert parse_expr(expr_to_text(e), set()) == e


def test_nominals_and_top():
    e = parse_expr("<a> & Top", set())
    assert e == And(Nominal("a"), Concept("Top"))


def test_undeclared_lowercase_names_parse_as_references():
    # dangling references are a later check's job, not the parser's
    assert parse_expr("mystery", set()) == ShapeRef("mystery")


@pytest.mark.parametrize("text,fragment", [
    ("!A", "negation applies to shape names only"),
    ("some R . A", "role name 'R' must start lowercase"),
    ("A &", "expected an identifier"),
    ("(A", r"expected '\)'"),
    ("A | B)", "trailing input"),
])
def test_expression_errors(text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_expr(text, set())


# ---------------------------------------------------------------------------
# documents
# ---------------------------------------------------------------------------

def test_parse_document_constraints_and_targets():
    d = parse_document("s <- A | some p . !t\n"
                       "t <- !s | some r . t\n"
                       "target node <0> s\n"
                       "target class A s\n"
                       "target role p- t\n")
    assert d.constraints.names() == ("s", "t")
    assert d.targets == (Target(TARGET_NODE, "0", "s"),
                         Target(TARGET_CLASS, "A", "s"),
                         Target(TARGET_ROLE, Role("p", True), "t"))


def test_document_text_round_trips_the_corpus():
    for name in ("ex1.shacl", "no_finite_model.shacl", "impl_a.shacl",
                 "impl_b.shacl", "grid_c.shacl", "grid_cprime.shacl",
                 "grid_cprime_stable.shacl"):
        d = parse_document(fixture_text(name))
        assert parse_document(document_to_text(d)) == d


def test_ex1_document_round_trip_text():
    d = parse_document(fixture_text("ex1.shacl"))
    assert document_to_text(d) == ("s <- A | some p . !t\n"
                                   "t <- !s | some r . t\n"
                                   "target node <0> s\n")


@pytest.mark.parametrize("text,err,fragment", [
    ("s <- A\ntarget class a s\n", ParseError, "needs a concept name"),
    ("s <- A\ntarget role R s\n", ParseError, "needs a role name"),
    ("s <- A\ntarget node b s\n", ParseError, "bad target line"),
    ("junk\n", ParseError, "expected 's <- EXPR' or a target line"),
    ("s <- A\ns <- B\n", ShaclError, "head of more than one"),
])
def test_document_errors(text, err, fragment):
    with pytest.raises(err, match=fragment):
        parse_document(text)


def test_document_error_reports_the_offending_line():
    with pytest.raises(ParseError) as err:
        parse_document("s <- A\ntarget node b s\n")
    assert err.value.line == 2
