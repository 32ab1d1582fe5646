#!/usr/bin/env python3
"""Benchmark the compiled kernels against their NumPy fallbacks.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import importlib
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from fggcd._kernels import pure  # noqa: E402


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()

    try:
        fast = importlib.import_module("fggcd._kernels._fast")
    except ImportError:
        print("compiled kernels not built; run `pip install -e .` with a C toolchain")
        return 1

    rng = np.random.default_rng(0)
    cases = []
    for n, m, e in ((1_000, 20_000, 32), (5_000, 200_000, 32), (20_000, 500_000, 64)):
        z = np.ascontiguousarray(rng.normal(size=(n, e)))
        src = rng.integers(0, n, size=m).astype(np.int64)
        dst = rng.integers(0, n, size=m).astype(np.int64)
        rows = np.ascontiguousarray(rng.normal(size=(m, e)))
        cases.append((n, m, e, z, src, dst, rows))

    print(f"{'kernel':<26} {'size':<22} {'pure':>10} {'compiled':>10} {'speedup':>8}")
    for n, m, e, z, src, dst, rows in cases:
        size = f"n={n} m={m} e={e}"

        t_pure = timeit(lambda: pure.clipped_edge_dot_sums(z, src, dst, n), args.repeats)
        t_fast = timeit(lambda: fast.clipped_edge_dot_sums(z, src, dst, n), args.repeats)
        print(f"{'clipped_edge_dot_sums':<26} {size:<22} {t_pure:>9.4f}s {t_fast:>9.4f}s {t_pure / t_fast:>7.1f}x")

        def run_pure():
            pure.scatter_add_rows(np.zeros((n, e)), src, rows)

        def run_fast():
            fast.scatter_add_rows(np.zeros((n, e)), src, rows)

        t_pure = timeit(run_pure, args.repeats)
        t_fast = timeit(run_fast, args.repeats)
        print(f"{'scatter_add_rows':<26} {size:<22} {t_pure:>9.4f}s {t_fast:>9.4f}s {t_pure / t_fast:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
