# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of ``shaclwf._kernels_py``.

Same entry points, same semantics, same deterministic emission order;
the test suite asserts lockstep equality against the pure twin on small
inputs.  Decision values live in 64-bit words here, so the dispatch
module routes to this twin only when nc + nr*n <= 63 (the pure twin has
arbitrary-precision integers and no such limit).
"""

import time
from itertools import permutations

from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport free, malloc

OP_LITC = 0
OP_LITN = 1
OP_VAR = 2
OP_AND = 3
OP_OR = 4
OP_DIA = 5
OP_BOX = 6
OP_MU = 7
OP_NU = 8

MODE_SAT = 0
MODE_VALID = 1
MODE_COUNTER = 2
MODE_COUNT = 3

cdef uint64_t ONE = 1

# leaf actions
cdef int ACT_COLLECT = 0
cdef int ACT_SCAN = 1


cdef class _Walker:
    """DFS over decision sequences with canonicity pruning; the leaf
    action either collects codes or evaluates the compiled program."""

    cdef int n, n_req, nc, nr, nanon, nperms
    cdef uint64_t maxd, full
    cdef uint64_t* d
    cdef int* perm_nodes     # nperms * nanon: old node occupying each new slot
    cdef int* perm_colmaps   # nperms * nanon: new column of each old anon node
    cdef int action
    # collect state
    cdef list out
    cdef long max_count
    # scan state
    cdef int mode
    cdef long limit_graphs
    cdef long long deadline_ns
    cdef long examined
    cdef bint stopped
    cdef object hit
    cdef int* ops1
    cdef int* aa1
    cdef int* bb1
    cdef int* cc1
    cdef int root1
    cdef int* ops2
    cdef int* aa2
    cdef int* bb2
    cdef int* cc2
    cdef int root2
    cdef bint has2
    cdef uint64_t* slots
    cdef uint64_t* rows
    cdef uint64_t* cols

    def __cinit__(self, int n, int n_req, int nc, int nr):
        cdef int nbits = nc + nr * n
        if n > 0 and nbits > 63:
            raise ValueError("decision width exceeds 63 bits; use the pure twin")
        if n > 8:
            raise ValueError("the kernels support at most 8 nodes")
        self.n, self.n_req, self.nc, self.nr = n, n_req, nc, nr
        self.nanon = n - n_req
        self.maxd = ONE << nbits if n > 0 else 1
        self.full = (ONE << n) - 1 if n > 0 else 0
        self.d = <uint64_t*> malloc(sizeof(uint64_t) * (n if n > 0 else 1))
        perms = [p for p in permutations(range(n_req, n))
                 if p != tuple(range(n_req, n))]
        self.nperms = len(perms)
        cdef int cells = self.nperms * self.nanon
        self.perm_nodes = <int*> malloc(sizeof(int) * (cells if cells else 1))
        self.perm_colmaps = <int*> malloc(sizeof(int) * (cells if cells else 1))
        cdef int pi, i
        for pi, p in enumerate(perms):
            for i in range(self.nanon):
                self.perm_nodes[pi * self.nanon + i] = p[i]
                self.perm_colmaps[pi * self.nanon + (p[i] - n_req)] = n_req + i
        self.ops1 = self.aa1 = self.bb1 = self.cc1 = NULL
        self.ops2 = self.aa2 = self.bb2 = self.cc2 = NULL
        self.slots = self.rows = self.cols = NULL
        self.hit = None

    def __dealloc__(self):
        free(self.d)
        free(self.perm_nodes)
        free(self.perm_colmaps)
        free(self.ops1); free(self.aa1); free(self.bb1); free(self.cc1)
        free(self.ops2); free(self.aa2); free(self.bb2); free(self.cc2)
        free(self.slots)
        free(self.rows)
        free(self.cols)

    # -- canonicity ----------------------------------------------------------

    cdef uint64_t _swap_cols(self, uint64_t val, int j, int k) nogil:
        cdef int r, base
        cdef uint64_t bj, bk
        for r in range(self.nr):
            base = self.nc + r * self.n
            bj = (val >> (base + j)) & 1
            bk = (val >> (base + k)) & 1
            if bj != bk:
                val ^= (ONE << (base + j)) | (ONE << (base + k))
        return val

    cdef bint _prefix_pruned(self, int v) nogil:
        cdef int i, j
        cdef uint64_t orig, swapped
        for j in range(self.n_req, v):
            for i in range(v + 1):
                if i == j:
                    orig = self.d[j + 1]
                elif i == j + 1:
                    orig = self.d[j]
                else:
                    orig = self.d[i]
                swapped = self._swap_cols(orig, j, j + 1)
                if swapped < self.d[i]:
                    return True
                if swapped > self.d[i]:
                    break
        return False

    cdef uint64_t _permute_cols(self, uint64_t val, int* colmap) nogil:
        cdef int r, base, i
        cdef uint64_t seg, new_seg
        cdef uint64_t nmask = self.full
        cdef uint64_t out = val
        for r in range(self.nr):
            base = self.nc + r * self.n
            seg = (val >> base) & nmask
            new_seg = seg & ((ONE << self.n_req) - 1)
            for i in range(self.nanon):
                if seg & (ONE << (self.n_req + i)):
                    new_seg |= ONE << colmap[i]
            out = (out & ~(nmask << base)) | (new_seg << base)
        return out

    cdef bint _is_minimal(self) nogil:
        cdef int pi, i, src
        cdef uint64_t val
        cdef int* pnodes
        cdef int* colmap
        for pi in range(self.nperms):
            pnodes = self.perm_nodes + pi * self.nanon
            colmap = self.perm_colmaps + pi * self.nanon
            for i in range(self.n):
                src = i if i < self.n_req else pnodes[i - self.n_req]
                val = self._permute_cols(self.d[src], colmap)
                if val < self.d[i]:
                    return False
                if val > self.d[i]:
                    break
        return True

    cdef bint _occupied(self) nogil:
        cdef uint64_t in_mask = 0
        cdef int v, r
        for v in range(self.n):
            for r in range(self.nr):
                in_mask |= (self.d[v] >> (self.nc + r * self.n)) & self.full
        for v in range(self.n):
            if self.d[v] == 0 and not (in_mask >> v) & 1:
                return False
        return True

    # -- code extraction -----------------------------------------------------

    cdef tuple _code(self):
        cdef list out = []
        cdef int c, v, r
        cdef uint64_t mask, mat, row
        for c in range(self.nc):
            mask = 0
            for v in range(self.n):
                mask |= ((self.d[v] >> c) & 1) << v
            out.append(mask)
        for r in range(self.nr):
            mat = 0
            for v in range(self.n):
                row = (self.d[v] >> (self.nc + r * self.n)) & self.full
                mat |= row << (v * self.n)
            out.append(mat)
        return tuple(out)

    # -- program evaluation --------------------------------------------------

    cdef void _fill_adj(self):
        cdef int r, v, w
        cdef uint64_t row
        for r in range(self.nr):
            for v in range(self.n):
                self.rows[r * self.n + v] = \
                    (self.d[v] >> (self.nc + r * self.n)) & self.full
            for w in range(self.n):
                self.cols[r * self.n + w] = 0
            for v in range(self.n):
                row = self.rows[r * self.n + v]
                for w in range(self.n):
                    if (row >> w) & 1:
                        self.cols[r * self.n + w] |= ONE << v

    cdef uint64_t _ev(self, int* ops, int* aa, int* bb, int* cc, int i):
        cdef int op = ops[i], a = aa[i], b = bb[i]
        cdef uint64_t mask, body, succ, cur, nxt
        cdef int v
        cdef uint64_t full = self.full
        if op == 0:  # LITC
            mask = 0
            if a >= 0:
                for v in range(self.n):
                    mask |= ((self.d[v] >> a) & 1) << v
            return mask if b else full & ~mask
        if op == 1:  # LITN
            mask = (ONE << a) if 0 <= a < self.n else 0
            return mask if b else full & ~mask
        if op == 2:  # VAR
            return self.slots[a]
        if op == 3:  # AND
            return self._ev(ops, aa, bb, cc, a) & self._ev(ops, aa, bb, cc, b)
        if op == 4:  # OR
            return self._ev(ops, aa, bb, cc, a) | self._ev(ops, aa, bb, cc, b)
        if op == 5 or op == 6:  # DIA / BOX
            body = self._ev(ops, aa, bb, cc, cc[i])
            mask = 0
            for v in range(self.n):
                if a >= 0:
                    succ = (self.cols[a * self.n + v] if b
                            else self.rows[a * self.n + v])
                else:
                    succ = 0
                if op == 5:
                    if succ & body:
                        mask |= ONE << v
                elif not (succ & (full & ~body)):
                    mask |= ONE << v
            return mask
        # MU / NU
        cur = 0 if op == 7 else full
        while True:
            self.slots[a] = cur
            nxt = self._ev(ops, aa, bb, cc, cc[i])
            if nxt == cur:
                return cur
            cur = nxt

    cdef int* _copy_ints(self, seq):
        cdef int m = len(seq)
        cdef int* arr = <int*> malloc(sizeof(int) * (m if m else 1))
        cdef int i
        for i in range(m):
            arr[i] = seq[i]
        return arr

    # -- the walk ------------------------------------------------------------

    cdef int _leaf(self) except -1:
        if not (self._occupied() and self._is_minimal()):
            return 0
        if self.action == ACT_COLLECT:
            self.out.append(self._code())
            if 0 <= self.max_count <= len(self.out):
                return 1
            return 0
        if self.limit_graphs >= 0 and self.examined >= self.limit_graphs:
            self.stopped = True
            return 1
        if (self.deadline_ns >= 0 and self.examined % 1024 == 0
                and time.monotonic_ns() > self.deadline_ns):
            self.stopped = True
            return 1
        self.examined += 1
        if self.mode == 3:  # MODE_COUNT
            return 0
        self._fill_adj()
        cdef uint64_t mask = self._ev(self.ops1, self.aa1, self.bb1,
                                      self.cc1, self.root1)
        cdef bint hit
        if self.mode == 0:  # MODE_SAT
            hit = mask != 0
        elif self.mode == 1:  # MODE_VALID
            hit = mask == self.full
        else:  # MODE_COUNTER
            hit = mask == self.full and self._ev(
                self.ops2, self.aa2, self.bb2, self.cc2,
                self.root2) != self.full
        if hit:
            self.hit = self._code()
            return 1
        return 0

    cdef int _rec(self, int v) except -1:
        if v == self.n:
            return self._leaf()
        cdef uint64_t val = 0
        while True:
            self.d[v] = val
            if not (v > self.n_req and self._prefix_pruned(v)):
                if self._rec(v + 1):
                    return 1
            if val == self.maxd - 1:
                break
            val += 1
        self.d[v] = 0
        return 0

    # -- entry points --------------------------------------------------------

    def collect(self, long max_count):
        self.action = ACT_COLLECT
        self.out = []
        self.max_count = max_count
        self._rec(0)
        return self.out

    def run_scan(self, prog, int mode, prog2, long limit_graphs,
                 long long deadline_ns):
        ops, aa, bb, cc, nslots, root = prog
        self.ops1 = self._copy_ints(ops)
        self.aa1 = self._copy_ints(aa)
        self.bb1 = self._copy_ints(bb)
        self.cc1 = self._copy_ints(cc)
        self.root1 = root
        cdef int slot_count = nslots
        self.has2 = prog2 is not None
        if self.has2:
            ops, aa, bb, cc, nslots, root = prog2
            self.ops2 = self._copy_ints(ops)
            self.aa2 = self._copy_ints(aa)
            self.bb2 = self._copy_ints(bb)
            self.cc2 = self._copy_ints(cc)
            self.root2 = root
            if nslots > slot_count:
                slot_count = nslots
        if slot_count < 1:
            slot_count = 1
        self.slots = <uint64_t*> malloc(sizeof(uint64_t) * slot_count)
        cdef int cells = self.nr * self.n
        self.rows = <uint64_t*> malloc(sizeof(uint64_t) * (cells if cells else 1))
        self.cols = <uint64_t*> malloc(sizeof(uint64_t) * (cells if cells else 1))
        self.action = ACT_SCAN
        self.mode = mode
        self.limit_graphs = limit_graphs
        self.deadline_ns = deadline_ns
        self.examined = 0
        self.stopped = False
        self.hit = None
        self._rec(0)
        return self.hit, self.examined, self.hit is None and not self.stopped


def collect_codes(int n, int n_req, int nc, int nr, long max_count=-1):
    """Canonical codes for n nodes, ascending; mirrors the pure twin."""
    return _Walker(n, n_req, nc, nr).collect(max_count)


def scan(int n, int n_req, int nc, int nr, prog, int mode, prog2=None,
         long limit_graphs=-1, long long deadline_ns=-1):
    """Enumerate canonical graphs, returning the first match per ``mode``;
    mirrors the pure twin's return convention exactly."""
    return _Walker(n, n_req, nc, nr).run_scan(prog, mode, prog2,
                                              limit_graphs, deadline_ns)
