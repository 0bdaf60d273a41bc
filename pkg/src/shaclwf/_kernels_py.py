"""Pure-Python twin of the enumeration/evaluation kernel.

The compiled extension (`shaclwf._kernels`) implements exactly the same
two entry points with the same semantics and the same deterministic
order; `shaclwf.kernel` picks whichever is importable.  Keep the two in
lockstep: the test suite asserts sequence equality on small inputs.

A candidate graph over a signature of ``nc`` concepts and ``nr`` roles
on ``n`` nodes is a *decision sequence* d[0..n-1], where each d[v] packs
node v's concept bits (low ``nc`` bits) followed by one n-bit out-edge
row per role.  Nodes 0..n_req-1 are the pinned (named) nodes; the rest
are anonymous.  A sequence is emitted iff

  * every node occurs in some assertion (no isolated nodes: the domain
    of a graph is exactly the set of mentioned individuals), and
  * the sequence is the lexicographic minimum of its orbit under
    permutations of the anonymous block (isomorphism reduction that
    fixes named nodes pointwise).

The DFS prunes prefixes that an adjacent anonymous transposition would
strictly lower; a full minimality check runs on the completed sequence.
Emission order is ascending, which downstream code relies on for
"first witness" determinism.

Formula programs are flat instruction arrays produced by
``kernel.compile_mu``; ``scan`` evaluates them over node-set bitmasks.
"""

from __future__ import annotations

import time
from itertools import permutations
from typing import Iterator, Optional

# program opcodes (shared with the compiled twin and kernel.compile_mu)
OP_LITC = 0   # a = concept index (-1: empty extension), b = positive
OP_LITN = 1   # a = required-node index (-1: absent), b = positive
OP_VAR = 2    # a = slot
OP_AND = 3    # a, b = operand node ids
OP_OR = 4
OP_DIA = 5    # a = role index (-1: empty), b = inverted, c = body node id
OP_BOX = 6
OP_MU = 7     # a = slot, c = body node id
OP_NU = 8

MODE_SAT = 0      # some node satisfies prog
MODE_VALID = 1    # every node satisfies prog
MODE_COUNTER = 2  # every node satisfies prog, not every node satisfies prog2
MODE_COUNT = 3    # never matches; just exhaust and count


def _swap_cols(val: int, j: int, k: int, n: int, nc: int, nr: int) -> int:
    """Exchange the j-th and k-th column bit inside every role row of a decision."""
    for r in range(nr):
        base = nc + r * n
        bj = (val >> (base + j)) & 1
        bk = (val >> (base + k)) & 1
        if bj != bk:
            val ^= (1 << (base + j)) | (1 << (base + k))
    return val


def _permute_cols(val: int, perm: tuple[int, ...], n_req: int, n: int, nc: int, nr: int) -> int:
    """Rewire role-row columns: anonymous column n_req+i moves to perm[i]."""
    out = val
    for r in range(nr):
        base = nc + r * n
        seg = (val >> base) & ((1 << n) - 1)
        new_seg = seg & ((1 << n_req) - 1)
        for i in range(n - n_req):
            if seg & (1 << (n_req + i)):
                new_seg |= 1 << perm[i]
        out = (out & ~(((1 << n) - 1) << base)) | (new_seg << base)
    return out


def _iter_decisions(n: int, n_req: int, nc: int, nr: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    nbits = nc + nr * n
    maxd = 1 << nbits
    d = [0] * n
    anon_perms = [p for p in permutations(range(n_req, n)) if p != tuple(range(n_req, n))]

    def prefix_pruned(v: int) -> bool:
        # Would swapping some adjacent decided anonymous pair strictly lower
        # the decided prefix?  If so, no completion of d can be minimal.
        for j in range(n_req, v):
            for i in range(v + 1):
                if i == j:
                    orig = d[j + 1]
                elif i == j + 1:
                    orig = d[j]
                else:
                    orig = d[i]
                swapped = _swap_cols(orig, j, j + 1, n, nc, nr)
                if swapped < d[i]:
                    return True
                if swapped > d[i]:
                    break
        return False

    def is_minimal() -> bool:
        for p in anon_perms:
            # new position n_req+i holds old node p[i]; read off where each
            # old anonymous node lands so edge targets can be relabeled
            colmap = [0] * (n - n_req)
            for i, old in enumerate(p):
                colmap[old - n_req] = n_req + i
            for i in range(n):
                src = i if i < n_req else p[i - n_req]
                val = _permute_cols(d[src], colmap, n_req, n, nc, nr)
                if val < d[i]:
                    return False
                if val > d[i]:
                    break
        return True

    def occupied() -> bool:
        in_mask = 0
        for v in range(n):
            for r in range(nr):
                in_mask |= (d[v] >> (nc + r * n)) & ((1 << n) - 1)
        for v in range(n):
            if d[v] == 0 and not (in_mask >> v) & 1:
                return False
        return True

    def rec(v: int) -> Iterator[tuple[int, ...]]:
        if v == n:
            if occupied() and is_minimal():
                yield tuple(d)
            return
        for val in range(maxd):
            d[v] = val
            if v > n_req and prefix_pruned(v):
                continue
            yield from rec(v + 1)
        d[v] = 0

    yield from rec(0)


def decisions_to_code(d: tuple[int, ...], n: int, nc: int, nr: int) -> tuple[int, ...]:
    """Public code layout: per-concept node masks, then row-major role matrices."""
    out = []
    for c in range(nc):
        mask = 0
        for v in range(n):
            mask |= ((d[v] >> c) & 1) << v
        out.append(mask)
    for r in range(nr):
        mat = 0
        for v in range(n):
            row = (d[v] >> (nc + r * n)) & ((1 << n) - 1)
            mat |= row << (v * n)
        out.append(mat)
    return tuple(out)


def collect_codes(n: int, n_req: int, nc: int, nr: int,
                  max_count: int = -1) -> list[tuple[int, ...]]:
    out = []
    for d in _iter_decisions(n, n_req, nc, nr):
        out.append(decisions_to_code(d, n, nc, nr))
        if 0 <= max_count <= len(out):
            break
    return out


def _eval_prog(prog, d: tuple[int, ...], n: int, nc: int, nr: int) -> int:
    ops, aa, bb, cc, nslots, root = prog
    full = (1 << n) - 1
    rows = [[(d[v] >> (nc + r * n)) & full for v in range(n)] for r in range(nr)]
    cols = [[0] * n for _ in range(nr)]
    for r in range(nr):
        for v in range(n):
            row = rows[r][v]
            w = 0
            while row:
                if row & 1:
                    cols[r][w] |= 1 << v
                row >>= 1
                w += 1
    slots = [0] * max(nslots, 1)

    def ev(i: int) -> int:
        op = ops[i]
        if op == OP_LITC:
            mask = 0
            if aa[i] >= 0:
                for v in range(n):
                    mask |= ((d[v] >> aa[i]) & 1) << v
            return mask if bb[i] else full & ~mask
        if op == OP_LITN:
            mask = (1 << aa[i]) if 0 <= aa[i] < n else 0
            return mask if bb[i] else full & ~mask
        if op == OP_VAR:
            return slots[aa[i]]
        if op == OP_AND:
            return ev(aa[i]) & ev(bb[i])
        if op == OP_OR:
            return ev(aa[i]) | ev(bb[i])
        if op == OP_DIA or op == OP_BOX:
            body = ev(cc[i])
            adj = (cols if bb[i] else rows)[aa[i]] if aa[i] >= 0 else None
            mask = 0
            for v in range(n):
                succ = adj[v] if adj is not None else 0
                ok = (succ & body) != 0 if op == OP_DIA else (succ & ~body) == 0
                if ok:
                    mask |= 1 << v
            return mask
        if op == OP_MU or op == OP_NU:
            cur = 0 if op == OP_MU else full
            while True:
                slots[aa[i]] = cur
                nxt = ev(cc[i])
                if nxt == cur:
                    return cur
                cur = nxt
        raise ValueError(f"bad opcode {op}")

    return ev(root)


def scan(n: int, n_req: int, nc: int, nr: int, prog, mode: int, prog2=None,
         limit_graphs: int = -1, deadline_ns: int = -1
         ) -> tuple[Optional[tuple[int, ...]], int, bool]:
    """Enumerate canonical graphs, returning the first match per ``mode``.

    Returns (matching code or None, graphs examined, exhausted) where
    exhausted means the whole space was enumerated without hitting the
    graph-count or wall-clock budget.
    """
    full = (1 << n) - 1
    examined = 0
    for d in _iter_decisions(n, n_req, nc, nr):
        if limit_graphs >= 0 and examined >= limit_graphs:
            return None, examined, False
        if deadline_ns >= 0 and examined % 1024 == 0 and time.monotonic_ns() > deadline_ns:
            return None, examined, False
        examined += 1
        if mode == MODE_COUNT:
            continue
        mask = _eval_prog(prog, d, n, nc, nr)
        if mode == MODE_SAT:
            hit = mask != 0
        elif mode == MODE_VALID:
            hit = mask == full
        else:
            hit = mask == full and _eval_prog(prog2, d, n, nc, nr) != full
        if hit:
            return decisions_to_code(d, n, nc, nr), examined, False
    return None, examined, True
