"""Supported-model semantics and stratification.

A total assignment is a supported model when the extension of every
defined shape equals the evaluation of its body.  Enumeration is
exhaustive over the 2^(shapes x nodes) total assignments, guarded by a
bit budget: refusing oversized instances is the honest option, since the
general decision problems behind this semantics are undecidable.

Stratification partitions the definitions into layers such that positive
references stay at or below their own layer and negative references go
strictly below.  Such a partition exists iff the dependency graph has no
cycle through a negative edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import networkx as nx

from .model import (BudgetExceeded, ConstraintSet, DataGraph, shape_deps)
from .wf import Polarity, ShapeAssignment, eval_expr

DEFAULT_ENUM_BITS = 20


def is_supported_model(g: DataGraph, c: ConstraintSet, assign: ShapeAssignment) -> bool:
    """True iff every shape's positive extension equals its body's evaluation.

    Requires a total assignment over (defined shapes x domain); on total
    assignments the lower and upper evaluations coincide, so the lower
    one is used.
    """
    if not assign.is_total(c.names(), g.domain):
        raise ValueError("supported-model check needs a total assignment")
    for s, body in c.items():
        ext = frozenset(a for name, a in assign.positive if name == s)
        if ext != eval_expr(body, g, assign, Polarity.LOWER):
            return False
    return True


def enumerate_supported_models(g: DataGraph, c: ConstraintSet,
                               budget_bits: int = DEFAULT_ENUM_BITS) -> list[ShapeAssignment]:
    """All supported models, in canonical order.

    The canonical order reads each total assignment as a big-endian bit
    vector over the sorted (shape, node) pairs (positive literal = 1) and
    enumerates ascending integers, so the all-negative assignment comes
    first.
    """
    pairs = sorted((s, a) for s in c.names() for a in g.domain)
    bits = len(pairs)
    if bits > budget_bits:
        raise BudgetExceeded(
            f"{bits} shape atoms exceed the enumeration budget of {budget_bits} bits")
    out: list[ShapeAssignment] = []
    for code in range(1 << bits):
        pos = frozenset(pairs[i] for i in range(bits) if code & (1 << (bits - 1 - i)))
        neg = frozenset(p for p in pairs if p not in pos)
        assign = ShapeAssignment(pos, neg)
        if is_supported_model(g, c, assign):
            out.append(assign)
    return out


@dataclass(frozen=True)
class Stratification:
    """An ordered partition of the defined shape names into layers."""

    layers: tuple[tuple[str, ...], ...]

    def layer_of(self, name: str) -> int:
        for i, layer in enumerate(self.layers):
            if name in layer:
                return i
        raise KeyError(name)


def stratify(c: ConstraintSet) -> Optional[Stratification]:
    """A valid stratification of the constraint set, or None.

    Builds the dependency graph with an edge s -> t for every reference
    to t in the body of s, marked strict when the reference is negated.
    A stratification exists iff no strongly connected component contains
    a strict edge; layers then come from longest-path weights over the
    condensation, counting strict edges as 1.
    """
    dg = nx.MultiDiGraph()
    dg.add_nodes_from(c.names())
    for s, body in c.items():
        for t, neg in set(shape_deps(body)):
            if t in c:
                dg.add_edge(s, t, strict=neg)
    comp_of: dict[str, int] = {}
    sccs = list(nx.strongly_connected_components(dg))
    for i, comp in enumerate(sccs):
        for n in comp:
            comp_of[n] = i
    for s, t, data in dg.edges(data=True):
        if data["strict"] and comp_of[s] == comp_of[t]:
            return None
    # Longest path over the condensation: layer(X) = max over edges X -> Y of
    # layer(Y) + strictness.  Process components in reverse topological order.
    cond = nx.DiGraph()
    cond.add_nodes_from(range(len(sccs)))
    weight: dict[tuple[int, int], int] = {}
    for s, t, data in dg.edges(data=True):
        cs, ct = comp_of[s], comp_of[t]
        if cs == ct:
            continue
        w = 1 if data["strict"] else 0
        key = (cs, ct)
        weight[key] = max(weight.get(key, 0), w)
        cond.add_edge(cs, ct)
    layer: dict[int, int] = {}
    for comp_idx in reversed(list(nx.topological_sort(cond))):
        layer[comp_idx] = max(
            (layer[t] + weight[(comp_idx, t)] for t in cond.successors(comp_idx)),
            default=0)
    if not layer:
        return Stratification(())
    height = max(layer.values())
    buckets: list[list[str]] = [[] for _ in range(height + 1)]
    for name in c.names():
        buckets[layer[comp_of[name]]].append(name)
    return Stratification(tuple(tuple(sorted(b)) for b in buckets))
