"""Benchmark the compiled RK4 delay kernel against the pure-Python twin.

Runs the same modal integration workload through both kernels and reports
wall time per kernel plus the speedup.  The two kernels are bitwise
equivalent (covered by the test suite); this script only measures speed.

Usage: python3 benchmarks/bench_stepper.py [--steps N] [--modes M]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from thermodelay import _stepper_py

try:
    from thermodelay import _stepper as _stepper_ext
except ImportError:
    _stepper_ext = None


def run_workload(kernel, n_modes: int, nsteps: int, m: int) -> float:
    tau, dt = 1.0, 1.0 / m
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    for j in range(1, n_modes + 1):
        mu = float(j**4)
        y0 = np.ascontiguousarray(rng.standard_normal(3) * 0.1, dtype=complex)
        hist_grid = np.zeros(m + 1, dtype=complex)
        hist_mid = np.zeros(m, dtype=complex)
        states = np.empty((nsteps + 1, 3), dtype=complex)
        tr = np.empty(nsteps + 1, dtype=complex)
        trp = np.empty(nsteps + 1, dtype=complex)
        kernel.run_mode(
            1, mu, 0.5, 0.5, 2.0, 1.0, tau, dt, nsteps, m,
            y0, hist_grid, hist_mid, states, tr, trp,
        )
    return time.perf_counter() - t0


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=20_000, help="steps per mode")
    parser.add_argument("--modes", type=int, default=12, help="number of modes")
    parser.add_argument("--m", type=int, default=512, help="steps per delay")
    args = parser.parse_args()

    total = args.steps * args.modes
    print(f"workload: {args.modes} modes x {args.steps} RK4 steps "
          f"(m = {args.m} steps per delay, {total} steps total)")

    t_py = run_workload(_stepper_py, args.modes, args.steps, args.m)
    print(f"python   kernel: {t_py:8.3f} s  ({total / t_py:,.0f} steps/s)")

    if _stepper_ext is None:
        print("compiled kernel: not built (pip install -e . with Cython)")
        return
    t_ext = run_workload(_stepper_ext, args.modes, args.steps, args.m)
    print(f"compiled kernel: {t_ext:8.3f} s  ({total / t_ext:,.0f} steps/s)")
    print(f"speedup: {t_py / t_ext:.1f}x")


if __name__ == "__main__":
    main()
