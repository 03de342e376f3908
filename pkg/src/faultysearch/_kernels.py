"""Hot loops: trajectory crossing times and Monte Carlo first successes.

Each kernel exists twice, a numba loop and a vectorised numpy version.
`crossing_times` and `first_successes` dispatch on the backend flag.
"""
import numpy as np

from ._accel import USE_NUMBA, njit

# SplitMix64 constants (Steele, Lea, Flood 2014).
GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
U53 = 1.0 / 9007199254740992.0


def segment_starts(points, ds):
    """Index of the first segment end that lies beyond each d."""
    cm = np.maximum.accumulate(points)
    return np.maximum(np.searchsorted(cm, ds, side="right"), 1).astype(np.int64)


@njit
def _crossings_loop(points, times, ds, starts, k, out):
    n = points.shape[0]
    counts = np.zeros(ds.shape[0], np.int64)
    for a in range(ds.shape[0]):
        d = ds[a]
        c = 0
        j = starts[a]
        while j < n and c < k:
            x0 = points[j - 1]
            x1 = points[j]
            if (x0 < d and d < x1) or (x1 < d and d < x0):
                out[a, c] = times[j - 1] + abs(d - x0)
                c += 1
            j += 1
        counts[a] = c
    return counts


def _crossings_numpy(points, times, ds, starts, k, out):
    lo = np.minimum(points[:-1], points[1:])
    hi = np.maximum(points[:-1], points[1:])
    counts = np.zeros(ds.shape[0], np.int64)
    for a in range(ds.shape[0]):
        d = ds[a]
        s = starts[a] - 1
        seg = s + np.flatnonzero((lo[s:] < d) & (d < hi[s:]))[:k]
        out[a, :seg.size] = times[seg] + np.abs(d - points[seg])
        counts[a] = seg.size
    return counts


def crossing_times(points, times, ds, k, use_numba=USE_NUMBA):
    """First k times at which the walk through `points` crosses each d.

    points[0] is the start; times[j] is the arrival time at points[j].
    Returns (out, counts); out[a, :counts[a]] are the crossing times.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    times = np.ascontiguousarray(times, dtype=np.float64)
    ds = np.ascontiguousarray(np.atleast_1d(ds), dtype=np.float64)
    starts = segment_starts(points, ds)
    out = np.full((ds.shape[0], k), np.nan)
    fn = _crossings_loop if use_numba else _crossings_numpy
    counts = fn(points, times, ds, starts, int(k), out)
    return out, counts


@njit
def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * MIX1
    z = (z ^ (z >> np.uint64(27))) * MIX2
    return z ^ (z >> np.uint64(31))


@njit
def _first_loop(seed, n, p, max_k, idx):
    censored = 0
    for trial in range(n):
        base = _mix(seed + GOLDEN * np.uint64(trial + 1))
        idx[trial] = -1
        for j in range(max_k):
            z = _mix(base + GOLDEN * np.uint64(j + 1))
            u = float(z >> np.uint64(11)) * U53
            if u < p:
                idx[trial] = j
                break
        if idx[trial] < 0:
            censored += 1
    return censored


def _mix_np(z):
    z = (z ^ (z >> np.uint64(30))) * MIX1
    z = (z ^ (z >> np.uint64(27))) * MIX2
    return z ^ (z >> np.uint64(31))


def _first_numpy(seed, n, p, max_k, idx):
    with np.errstate(over="ignore"):
        trial = np.arange(1, n + 1, dtype=np.uint64)
        base = _mix_np(np.uint64(seed) + GOLDEN * trial)
        idx[:] = -1
        active = np.arange(n)
        for j in range(max_k):
            z = _mix_np(base[active] + GOLDEN * np.uint64(j + 1))
            u = (z >> np.uint64(11)).astype(np.float64) * U53
            hit = u < p
            idx[active[hit]] = j
            active = active[~hit]
            if active.size == 0:
                break
    return int(active.size)


def first_successes(seed, n, p, max_k, use_numba=USE_NUMBA):
    """Index of the first Bernoulli(p) success for each of n trials.

    Draw j of trial i is the SplitMix64 output for counter
    mix(seed + G*(i+1)) + G*(j+1), so any subset of trials can be
    reproduced independently.  Returns (idx, censored) with idx = -1 for
    trials that saw no success within max_k draws.
    """
    idx = np.empty(n, np.int64)
    fn = _first_loop if use_numba else _first_numpy
    censored = fn(np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF), int(n), float(p), int(max_k), idx)
    return idx, int(censored)
