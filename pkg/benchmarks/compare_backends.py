#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the three hot paths (noise scan, dephasing RK4, dissipative RK4) on a
representative ensemble workload and prints a side-by-side table.  The same
comparison can be forced end to end by running anything in this package with
TRIQSD_DISABLE_NUMBA=1.

Usage: python benchmarks/compare_backends.py [--n-traj 512] [--total-time 2.0]
"""

import argparse
import time

import numpy as np

from triqsd import HAS_NUMBA, free_evolution, segment_grid, solve_dephasing, solve_dissipative
from triqsd.kernels import dephasing_rk4, dissipative_rk4, ou_scan
from triqsd.noise import sample_ou_block


def timeit(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n-traj", type=int, default=512)
    parser.add_argument("--total-time", type=float, default=2.0)
    parser.add_argument("--gamma", type=float, default=1.0)
    args = parser.parse_args()

    if not HAS_NUMBA:
        print("numba is not active in this process; only the numpy path can run.")
        print("Unset TRIQSD_DISABLE_NUMBA and install numba to compare.")
        return

    sched = free_evolution(args.total_time)
    grid = segment_grid(sched, 20, max_step=args.total_time / 2000.0)
    deph = solve_dephasing(sched, 1.0, args.gamma, grid)
    diss = solve_dissipative(sched, 1.0, args.gamma, grid)
    tau = deph.times
    n = args.n_traj

    rng = np.random.default_rng(0)
    normals = rng.standard_normal((n, len(tau), 2))
    dt = np.diff(tau)
    decay = np.exp(-args.gamma * dt)
    stddev = np.sqrt(0.25 * args.gamma * (1.0 - decay**2))
    zvals = sample_ou_block(tau, args.gamma, 0, list(range(n)))
    psi0 = np.broadcast_to(np.ones(3, dtype=complex) / np.sqrt(3.0), (n, 3)).copy()
    h = np.diff(grid)
    ones = np.ones(len(h))
    zeros = np.zeros(len(h))
    out_idx = np.arange(0, len(grid), 10, dtype=np.int64)

    cases = {
        "ou_scan": lambda use: ou_scan(normals, decay, stddev, 0.5, use_numba=use),
        "dephasing_rk4": lambda use: dephasing_rk4(
            psi0, zvals, ones, deph.f, h, 1.0, out_idx, use_numba=use
        ),
        "dissipative_rk4": lambda use: dissipative_rk4(
            psi0, zvals, ones, ones, zeros, diss.f1, diss.f2, diss.f3, diss.f4,
            h, 1.0, out_idx, use_numba=use,
        ),
    }

    print(
        "workload: %d trajectories, %d steps (%d half-grid nodes)"
        % (n, len(h), len(tau))
    )
    print("%-18s %12s %12s %9s" % ("kernel", "numba [s]", "numpy [s]", "speedup"))
    for name, fn in cases.items():
        fn(True)  # warm the jit before timing
        t_nb = timeit(lambda: fn(True))
        t_np = timeit(lambda: fn(False))
        print("%-18s %12.4f %12.4f %8.1fx" % (name, t_nb, t_np, t_np / t_nb))


if __name__ == "__main__":
    main()
