"""Benchmark the compiled kernels against the pure NumPy fallback.

Times the two hot loops (the scalar RK4 for the squeezing/thermal-photon
equations and the Fock-basis Lindblad RK4) on both backends and checks
that they produce the same numbers.

Usage:
    python benchmarks/bench_backends.py [--dims 64 128 256] [--steps 500]
"""

import argparse
import sys
import time

import numpy as np

from squeezecav import _kernels_py

try:
    from squeezecav import _kernels_cy
except ImportError:
    _kernels_cy = None


def best_of(fn, repeat=3):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def bench_sts(backend, n_steps):
    def run():
        return backend.sts_evolve(0.0, 0.0, 0.9, 1e-3, n_steps, n_steps)

    return best_of(run)


def bench_lindblad(backend, dim, n_steps):
    rho0 = np.zeros((dim, dim), complex)
    rho0[0, 0] = 1.0

    def run():
        rho = rho0.copy()
        backend.lindblad_evolve(rho, 1.0, 1e-3, n_steps)
        return rho

    return best_of(run)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dims", type=int, nargs="+", default=[64, 128, 256])
    parser.add_argument("--steps", type=int, default=500, help="Lindblad RK4 steps")
    parser.add_argument("--sts-steps", type=int, default=200_000)
    args = parser.parse_args(argv)

    if _kernels_cy is None:
        print("compiled extension not built; timing the NumPy backend only")

    header = f"{'kernel':<22}{'python [s]':>12}{'compiled [s]':>14}{'speedup':>9}{'max|diff|':>12}"
    print(header)
    print("-" * len(header))

    t_py, (u_py, n_py, _) = bench_sts(_kernels_py, args.sts_steps)
    row = f"{'sts_evolve %.0e' % args.sts_steps:<22}{t_py:>12.4f}"
    if _kernels_cy is not None:
        t_cy, (u_cy, n_cy, _) = bench_sts(_kernels_cy, args.sts_steps)
        diff = max(abs(u_py[-1] - u_cy[-1]), abs(n_py[-1] - n_cy[-1]))
        row += f"{t_cy:>14.4f}{t_py / t_cy:>9.1f}{diff:>12.2e}"
    print(row)

    for dim in args.dims:
        t_py, rho_py = bench_lindblad(_kernels_py, dim, args.steps)
        row = f"{'lindblad dim=%d' % dim:<22}{t_py:>12.4f}"
        if _kernels_cy is not None:
            t_cy, rho_cy = bench_lindblad(_kernels_cy, dim, args.steps)
            diff = np.abs(rho_py - rho_cy).max()
            row += f"{t_cy:>14.4f}{t_py / t_cy:>9.1f}{diff:>12.2e}"
        print(row)
    return 0


if __name__ == "__main__":
    sys.exit(main())
