#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure numpy/scipy backend.

Covers the two hot paths: graphlet orbit counting (unsigned 0-14 and signed
15-column) on sparse random graphs, and the lasso coordinate descent inside
glasso.  Results from both backends are checked for agreement before timing
is reported.

    python3 benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

import numpy as np

import netresample.kernels as kernels
from netresample.graphlets import random_signed_graph


def time_call(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_orbits(impls, n_nodes, n_edges, repeats):
    g = random_signed_graph(n_nodes, n_edges=n_edges, seed=1)
    rows = {}
    outputs = {}
    for name, impl in impls.items():
        def run_unsigned(impl=impl):
            counts = np.zeros((n_nodes, 15), dtype=np.int64)
            impl.unsigned_orbit_counts(
                g.indptr, g.indices, counts,
                np.zeros(len(g.indices), dtype=np.int64),
                np.zeros(n_nodes, dtype=np.int64),
                np.zeros(n_nodes, dtype=np.int64))
            return counts

        def run_signed(impl=impl):
            counts = np.zeros((n_nodes, 15), dtype=np.int64)
            impl.signed_orbit_counts(g.indptr, g.indices, g.signs, counts)
            return counts

        outputs[name] = (run_unsigned(), run_signed())
        rows[name] = (time_call(run_unsigned, repeats),
                      time_call(run_signed, repeats))

    names = list(impls)
    if len(names) == 2:
        for k in (0, 1):
            assert np.array_equal(outputs[names[0]][k], outputs[names[1]][k]), \
                "backends disagree on orbit counts"
    return rows


def bench_lasso(impls, p, repeats):
    rng = np.random.default_rng(3)
    a = rng.normal(size=(p, 3 * p))
    s = np.corrcoef(a)
    v = np.ascontiguousarray(s[1:, 1:])
    s12 = np.ascontiguousarray(s[1:, 0])
    rows = {}
    solutions = {}
    for name, impl in impls.items():
        def run(impl=impl):
            beta = np.zeros(p - 1)
            u = v @ beta
            impl.lasso_cd(v, s12, beta, u, 0.05, 1e-10, 10_000)
            return beta

        solutions[name] = run()
        rows[name] = time_call(run, repeats)
    names = list(impls)
    if len(names) == 2:
        assert np.allclose(solutions[names[0]], solutions[names[1]],
                           atol=1e-8), "backends disagree on lasso solution"
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true",
                        help="smaller sizes, single repeat")
    args = parser.parse_args()
    repeats = 1 if args.quick else 3

    impls = kernels.backends()
    print(f"active backend: {kernels.BACKEND}; "
          f"benchmarking: {', '.join(impls)}\n")

    sizes = [(2_000, 6_000), (20_000, 60_000)]
    if not args.quick:
        sizes.append((50_000, 200_000))
    print(f"{'graph':>22} {'backend':>9} {'unsigned':>10} {'signed':>10}")
    for n_nodes, n_edges in sizes:
        rows = bench_orbits(impls, n_nodes, n_edges, repeats)
        for name, (tu, ts) in rows.items():
            print(f"{f'p={n_nodes} m={n_edges}':>22} {name:>9} "
                  f"{tu * 1e3:9.1f}ms {ts * 1e3:9.1f}ms")
    print()

    print(f"{'lasso CD':>22} {'backend':>9} {'time':>10}")
    for p in (50, 200, 500):
        rows = bench_lasso(impls, p, repeats)
        for name, t in rows.items():
            print(f"{f'p={p}':>22} {name:>9} {t * 1e3:9.2f}ms")


if __name__ == "__main__":
    main()
