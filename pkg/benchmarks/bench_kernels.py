"""Benchmark the compiled integration kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--steps N]

Times the RK4 stepping loop on closed-loop-sized problems.  The compiled
kernel mainly wins at small state dimensions, where per-step Python and
BLAS-dispatch overhead dominates the O(d^2) matvec work.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from syncgain import _kernels_py

try:
    from syncgain import _kernels_cy
except ImportError:
    _kernels_cy = None


def stable_system(rng, d):
    m = rng.normal(size=(d, d))
    m -= (np.linalg.eigvals(m).real.max() + 0.5) * np.eye(d)
    m *= 1.0 / np.linalg.norm(m, 2)
    return np.ascontiguousarray(m), rng.uniform(-1.0, 1.0, d)


def time_kernel(fn, m, x0, h, steps, repeats=5):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        _, bad = fn(m, x0, h, steps, steps)  # record only the endpoint
        best = min(best, time.perf_counter() - start)
        assert bad == -1
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=20000, help="RK4 steps per run")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    h = 1e-3
    print(f"RK4 stepping, {args.steps} steps, best of 5 runs")
    print(f"{'dim':>5} {'numpy':>12} {'cython':>12} {'speedup':>9}")
    for d in (4, 16, 64, 256):
        m, x0 = stable_system(rng, d)
        t_py = time_kernel(_kernels_py.rk4_path, m, x0, h, args.steps)
        if _kernels_cy is None:
            print(f"{d:>5} {t_py * 1e3:>10.1f}ms {'n/a':>12} {'n/a':>9}")
            continue
        t_cy = time_kernel(_kernels_cy.rk4_path, m, x0, h, args.steps)
        print(f"{d:>5} {t_py * 1e3:>10.1f}ms {t_cy * 1e3:>10.1f}ms {t_py / t_cy:>8.1f}x")
    if _kernels_cy is None:
        print("compiled kernels not built; showing fallback only")


if __name__ == "__main__":
    main()
