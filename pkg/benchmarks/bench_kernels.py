"""Numba vs numpy timings for the two hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both backends are run on the same inputs and checked for identical output
before timing.
"""
import argparse
import time

import numpy as np

from faultysearch._accel import HAVE_NUMBA
from faultysearch._kernels import crossing_times, first_successes
from faultysearch.trajectory import GeometricMonotone, _arrival_times


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def crossings_case(n_d=2000, k=120):
    pts = GeometricMonotone(1.5).positions(160)
    times = _arrival_times(pts)
    ds = np.geomspace(1.0, 1e6, n_d) * (1 + 1e-9)
    return lambda nb: crossing_times(pts, times, ds, k, use_numba=nb)


def mc_case(n=1_000_000, p=0.3):
    return lambda nb: first_successes(42, n, p, 200, use_numba=nb)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        print("numba not installed; nothing to compare")
        return
    cases = {"crossing_times": crossings_case(), "first_successes": mc_case()}
    print(f"{'kernel':<18}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for name, run in cases.items():
        a, b = run(True), run(False)  # also warms the jit
        assert all(np.array_equal(x, y, equal_nan=True) for x, y in zip(a, b)), name
        t_nb = best_of(lambda: run(True), args.repeat)
        t_np = best_of(lambda: run(False), args.repeat)
        print(f"{name:<18}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
