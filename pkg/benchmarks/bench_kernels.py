#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--steps N]

The hot paths are the per-step orbit/cocycle loops (dominating Lyapunov
sweeps at 1e6-1e7 steps per energy) and the Sturm pivot counts behind the
tridiagonal eigensolver.  Run after ``python setup.py build_ext --inplace``
to have both backends available.
"""

import argparse
import time

import numpy as np

from ietspec import kernels
from ietspec.iet import Iet
from ietspec.permutation import reversal


def timeit(fn, *args, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=2_000_000)
    ap.add_argument("--matrix", type=int, default=2000)
    args = ap.parse_args()

    backends = {}
    for name in kernels.available_backends():
        backends[name] = kernels.get_impl(name)
    if "cython" not in backends:
        print("note: compiled backend missing; run `python3 setup.py build_ext --inplace`")

    lam = [0.2 + 2 ** 0.5 * 1e-3, 0.3 + 3 ** 0.5 * 1e-3]
    t = Iet.make(reversal(3), lam + [1.0 - sum(lam)])
    lefts, offsets = kernels.iet_arrays(t)
    cos_a = np.array([1.0])
    cos_b = np.array([])

    n = args.steps
    # the python loops get a smaller workload, scaled back up in the report
    scale = {"cython": 1, "python": max(1, n // 100_000)}

    print(f"workload: {n:.0e} orbit/cocycle steps, {args.matrix}x{args.matrix} Sturm counts")
    print(f"{'kernel':<22}{'backend':<10}{'time':>10}{'rate':>16}")

    results = {}
    for name, impl in backends.items():
        n_eff = n // scale[name]
        out = np.empty(n_eff)
        dt, _ = timeit(impl.orbit_fill, lefts, offsets, 0.1234, out)
        results[("orbit_fill", name)] = dt / n_eff
        print(f"{'orbit_fill':<22}{name:<10}{dt:>9.3f}s{n_eff / dt:>13.2e}/s")

        out = np.empty(n_eff)
        dt, _ = timeit(impl.potential_fill, lefts, offsets, 1, cos_a, cos_b, 0.1234, out)
        results[("potential_fill", name)] = dt / n_eff
        print(f"{'potential_fill':<22}{name:<10}{dt:>9.3f}s{n_eff / dt:>13.2e}/s")

        dt, _ = timeit(impl.cocycle_accumulate, lefts, offsets, 1, cos_a, cos_b, 0.1234, 1.5, n_eff)
        results[("cocycle_accumulate", name)] = dt / n_eff
        print(f"{'cocycle_accumulate':<22}{name:<10}{dt:>9.3f}s{n_eff / dt:>13.2e}/s")

        m = args.matrix
        rng = np.random.default_rng(0)
        diag = rng.uniform(-2, 2, m)
        probes = np.linspace(-4, 4, m)
        dt, _ = timeit(impl.sturm_counts, diag, probes)
        results[("sturm_counts", name)] = dt / (m * m)
        print(f"{'sturm_counts':<22}{name:<10}{dt:>9.3f}s{m * m / dt:>13.2e}/s")

    if len(backends) == 2:
        print("\nspeedup (python time / cython time per element):")
        for op in ("orbit_fill", "potential_fill", "cocycle_accumulate", "sturm_counts"):
            ratio = results[(op, "python")] / results[(op, "cython")]
            print(f"  {op:<22}{ratio:>8.1f}x")

    # the two backends must agree on a shared workload
    if len(backends) == 2:
        nchk = 50_000
        rc = backends["cython"].cocycle_accumulate(lefts, offsets, 1, cos_a, cos_b, 0.1234, 1.5, nchk)
        rp = backends["python"].cocycle_accumulate(lefts, offsets, 1, cos_a, cos_b, 0.1234, 1.5, nchk)
        drift = abs(rc[0] - rp[0]) + max(abs(a - b) for a, b in zip(rc[1:], rp[1:]))
        print(f"\nbackend agreement on {nchk} cocycle steps: max drift {drift:.2e}")


if __name__ == "__main__":
    main()
