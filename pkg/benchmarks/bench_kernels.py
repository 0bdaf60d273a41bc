#!/usr/bin/env python3
"""Benchmark the compiled graph-enumeration kernel against the pure twin.

Runs the two workloads the bounded searches care about — canonical-code
collection and a full evaluate-every-graph scan — over increasing node
counts, and prints a table with the speedup.  The pure twin is skipped
above ``--pure-max-n`` so the table finishes in reasonable time.

Usage:  python3 benchmarks/bench_kernels.py [--max-n 5] [--pure-max-n 4]
"""

from __future__ import annotations

import argparse
import time

from shaclwf import _kernels_py as pure
from shaclwf import kernel
from shaclwf.kernel import Signature, compile_mu
from shaclwf.mu import parse_mu

try:
    from shaclwf import _kernels as fast
except ImportError:
    fast = None

SIG = Signature(concepts=("A",), roles=("r",), required=())
PROG = compile_mu(parse_mu("mu X . (A | <r> X)"), SIG)


def _time(fn) -> float:
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=5,
                    help="largest node count to benchmark (default 5)")
    ap.add_argument("--pure-max-n", type=int, default=4,
                    help="largest node count to run the pure twin at (default 4)")
    args = ap.parse_args()

    if fast is None:
        print("compiled kernel not built; showing pure twin only")
    nc, nr = len(SIG.concepts), len(SIG.roles)

    print(f"{'workload':<10} {'n':>2} {'graphs':>9} {'pure (s)':>9} "
          f"{'compiled (s)':>12} {'speedup':>8}")
    for n in range(1, args.max_n + 1):
        for label, run in [
            ("collect", lambda impl: impl.collect_codes(n, 0, nc, nr)),
            ("scan", lambda impl: impl.scan(n, 0, nc, nr, PROG,
                                            pure.MODE_COUNT)),
        ]:
            count = None
            tp = tc = None
            if n <= args.pure_max_n:
                tp = _time(lambda: run(pure))
            if fast is not None:
                t0 = time.perf_counter()
                out = run(fast)
                tc = time.perf_counter() - t0
                count = out[1] if label == "scan" else len(out)
            elif tp is not None:
                out = run(pure)
                count = out[1] if label == "scan" else len(out)
            cells = [
                f"{label:<10}", f"{n:>2}",
                f"{count if count is not None else '?':>9}",
                f"{tp:>9.3f}" if tp is not None else f"{'-':>9}",
                f"{tc:>12.3f}" if tc is not None else f"{'-':>12}",
            ]
            if tp is not None and tc is not None and tc > 0:
                cells.append(f"{tp / tc:>7.1f}x")
            print(" ".join(cells))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
