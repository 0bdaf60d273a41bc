"""Kernel dispatch and the formula-to-program compiler.

The bounded searches enumerate candidate graphs and evaluate fixpoint
formulas on each one.  That inner loop exists twice: a compiled Cython
extension (``shaclwf._kernels``) and a pure-Python twin
(``shaclwf._kernels_py``) with identical behaviour and order.  This
module picks the fastest available implementation and provides the
pieces shared by both: compiling a formula into the flat instruction
arrays the kernels execute, and converting between packed graph codes
and :class:`~shaclwf.model.DataGraph` values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import _kernels_py
from .model import DataGraph, NodeId, UnboundVariable
from .mu import Box, Dia, Lit, Mu, MuAnd, MuOr, MuFormula, Nom, Nu, Var

try:  # pragma: no cover - exercised only when the extension is built
    from . import _kernels as _impl

    HAVE_COMPILED = True
except ImportError:  # pragma: no cover
    _impl = _kernels_py
    HAVE_COMPILED = False

MODE_SAT = _kernels_py.MODE_SAT
MODE_VALID = _kernels_py.MODE_VALID
MODE_COUNTER = _kernels_py.MODE_COUNTER
MODE_COUNT = _kernels_py.MODE_COUNT

MAX_KERNEL_NODES = 8  # role matrices must fit in a 64-bit word
MAX_DECISION_BITS = 63  # compiled twin keeps per-node decisions in one word


def _pick(n: int, nc: int, nr: int):
    """The compiled twin, unless the decision word would overflow it."""
    if HAVE_COMPILED and nc + nr * n <= MAX_DECISION_BITS:
        return _impl
    return _kernels_py


@dataclass(frozen=True)
class Signature:
    """The vocabulary a bounded search enumerates graphs over."""

    concepts: tuple[str, ...]
    roles: tuple[str, ...]
    required: tuple[NodeId, ...]  # named nodes, pinned to indices 0..len-1

    def __post_init__(self) -> None:
        if len(set(self.concepts)) != len(self.concepts):
            raise ValueError("duplicate concept names in signature")
        if len(set(self.roles)) != len(self.roles):
            raise ValueError("duplicate role names in signature")
        if len(set(self.required)) != len(self.required):
            raise ValueError("duplicate required nodes in signature")

    def node_names(self, n: int) -> tuple[NodeId, ...]:
        """Display names for n nodes: required first, then fresh numerals."""
        names = list(self.required)
        used = set(names)
        counter = itertools.count()
        while len(names) < n:
            cand = str(next(counter))
            if cand not in used:
                names.append(cand)
                used.add(cand)
        return tuple(names)


def compile_mu(formula: MuFormula, sig: Signature) -> tuple:
    """Flatten a closed fixpoint formula into kernel instruction arrays.

    Concepts, roles, or nominals outside the signature get index -1,
    which the kernels treat as an empty extension (the enumerated graphs
    cannot mention them).  Returns the program tuple the kernels accept.
    """
    concept_idx = {name: i for i, name in enumerate(sig.concepts)}
    role_idx = {name: i for i, name in enumerate(sig.roles)}
    node_idx = {name: i for i, name in enumerate(sig.required)}
    ops: list[int] = []
    aa: list[int] = []
    bb: list[int] = []
    cc: list[int] = []
    slot_count = 0

    def emit(op: int, a: int = 0, b: int = 0, c: int = 0) -> int:
        ops.append(op)
        aa.append(a)
        bb.append(b)
        cc.append(c)
        return len(ops) - 1

    def go(f: MuFormula, env: dict[str, int]) -> int:
        nonlocal slot_count
        if isinstance(f, Lit):
            return emit(_kernels_py.OP_LITC, concept_idx.get(f.name, -1), int(f.positive))
        if isinstance(f, Nom):
            return emit(_kernels_py.OP_LITN, node_idx.get(f.node, -1), int(f.positive))
        if isinstance(f, Var):
            if f.name not in env:
                raise UnboundVariable(f"unbound variable {f.name!r}")
            return emit(_kernels_py.OP_VAR, env[f.name])
        if isinstance(f, MuAnd):
            return emit(_kernels_py.OP_AND, go(f.left, env), go(f.right, env))
        if isinstance(f, MuOr):
            return emit(_kernels_py.OP_OR, go(f.left, env), go(f.right, env))
        if isinstance(f, (Dia, Box)):
            op = _kernels_py.OP_DIA if isinstance(f, Dia) else _kernels_py.OP_BOX
            body = go(f.body, env)
            return emit(op, role_idx.get(f.role.name, -1), int(f.role.inverted), body)
        if isinstance(f, (Mu, Nu)):
            op = _kernels_py.OP_MU if isinstance(f, Mu) else _kernels_py.OP_NU
            slot = slot_count
            slot_count += 1
            body = go(f.body, {**env, f.var: slot})
            return emit(op, slot, 0, body)
        raise TypeError(f"not a fixpoint formula: {f!r}")

    root = go(formula, {})
    return (ops, aa, bb, cc, slot_count, root)


def code_to_graph(code: tuple[int, ...], n: int, sig: Signature) -> DataGraph:
    """Unpack a kernel code (concept masks then role matrices) into a graph."""
    names = sig.node_names(n)
    concepts = []
    roles = []
    for i, cname in enumerate(sig.concepts):
        mask = code[i]
        for v in range(n):
            if (mask >> v) & 1:
                concepts.append((cname, names[v]))
    for j, rname in enumerate(sig.roles):
        mat = code[len(sig.concepts) + j]
        for v in range(n):
            for w in range(n):
                if (mat >> (v * n + w)) & 1:
                    roles.append((rname, names[v], names[w]))
    return DataGraph.build(concepts, roles)


def iter_codes(n: int, sig: Signature):
    """All canonical codes with exactly n nodes, in kernel order (pure twin)."""
    nc, nr, nreq = len(sig.concepts), len(sig.roles), len(sig.required)
    for d in _kernels_py._iter_decisions(n, nreq, nc, nr):
        yield _kernels_py.decisions_to_code(d, n, nc, nr)


def scan(n: int, sig: Signature, prog, mode: int, prog2=None,
         limit_graphs: int = -1, deadline_ns: int = -1):
    """Run the fast kernel over all canonical n-node graphs for ``sig``."""
    if n > MAX_KERNEL_NODES:
        raise ValueError(f"kernel supports at most {MAX_KERNEL_NODES} nodes, got {n}")
    nc, nr = len(sig.concepts), len(sig.roles)
    return _pick(n, nc, nr).scan(n, len(sig.required), nc, nr,
                                 prog, mode, prog2, limit_graphs, deadline_ns)


def collect_codes(n: int, sig: Signature, max_count: int = -1, compiled: bool = False):
    """Canonical codes as a list; ``compiled=True`` requests the fast kernel
    (falling back to the pure twin when it is absent or the word is too wide)."""
    nc, nr = len(sig.concepts), len(sig.roles)
    impl = _pick(n, nc, nr) if compiled else _kernels_py
    return impl.collect_codes(n, len(sig.required), nc, nr, max_count)
