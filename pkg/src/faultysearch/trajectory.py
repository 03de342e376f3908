"""Search trajectories on the half-line and their detection-time costs.

A trajectory is the polyline through its turning points, starting at the
origin at time 0 and moving at unit speed.  The treasure at distance d is
detected on each pass with probability p, independently, so the expected
detection time is sum_i (1-p)^(i-1) g_i over the gaps g_i between passes.
Gaps come from walking the polyline; closed forms live in the tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from ._kernels import crossing_times
from .errors import ConvergenceError, DivergenceError, DomainError, TurningPointError
from .numerics import tail_bound_terms
from .submonotone import SubMonotoneParams

OUT, IN = "out", "in"


@dataclass(frozen=True)
class GeometricMonotone:
    """Monotone strategy with turning points x_i = b^i."""

    b: float

    def __post_init__(self):
        if not self.b > 1:
            raise DomainError(f"geometric base must exceed 1, got {self.b}")

    @property
    def growth(self) -> float:
        return float(self.b)

    def anchors(self, n: int) -> np.ndarray:
        return float(self.b) ** np.arange(1, n + 1, dtype=float)

    def round_offsets(self) -> tuple:
        return (1.0,)

    def positions(self, rounds: int) -> np.ndarray:
        return _monotone_positions(self.anchors(rounds))


@dataclass(frozen=True)
class ExplicitMonotone:
    """Monotone strategy with a given increasing sequence x_1 < x_2 < ...

    `x` is a finite sequence or a callable i -> x_i (1-based).  `growth`
    bounds x_{i+1}/x_i and drives the truncation bounds; for a finite
    sequence it defaults to the largest consecutive ratio.
    """

    x: Union[Sequence[float], Callable[[int], float]]
    growth: float | None = None

    def __post_init__(self):
        if callable(self.x):
            if self.growth is None:
                raise DomainError("a callable x-sequence needs an explicit growth bound")
        else:
            xs = np.asarray(self.x, dtype=float)
            if xs.ndim != 1 or xs.size < 2:
                raise DomainError("x-sequence needs at least two terms")
            if xs[0] <= 0 or np.any(np.diff(xs) <= 0):
                raise DomainError("x-sequence must be positive and strictly increasing")
            object.__setattr__(self, "x", tuple(xs.tolist()))
            if self.growth is None:
                object.__setattr__(self, "growth", float(np.max(xs[1:] / xs[:-1])))
        if not self.growth >= 1:
            raise DomainError("growth must be at least 1")

    def anchors(self, n: int) -> np.ndarray:
        if callable(self.x):
            return np.array([float(self.x(i)) for i in range(1, n + 1)])
        if n > len(self.x):
            raise DomainError(
                f"x-sequence has {len(self.x)} terms, evaluation needs {n}")
        return np.asarray(self.x[:n], dtype=float)

    def round_offsets(self) -> tuple:
        return (1.0,)

    def positions(self, rounds: int) -> np.ndarray:
        return _monotone_positions(self.anchors(rounds))


@dataclass(frozen=True)
class SubMonotone:
    """t-sub-monotone strategy: anchors x_r = beta^r joined by t-hops.

    Between x_r and x_{r+1} the searcher sweeps each sub-interval
    [gamma_{j-1} x_r, gamma_j x_r] out, back and out again, then continues
    to x_{r+1} and returns to the origin.
    """

    params: SubMonotoneParams

    @property
    def growth(self) -> float:
        return float(self.params.beta)

    def anchors(self, n: int) -> np.ndarray:
        return self.growth ** np.arange(1, n + 1, dtype=float)

    def round_offsets(self) -> tuple:
        return tuple(float(g) for g in self.params.chain[:-1])

    def positions(self, rounds: int) -> np.ndarray:
        x = self.anchors(rounds)
        g = np.array([float(v) for v in self.params.chain])
        t = self.params.t
        hop = np.empty(2 * t)
        hop[0::2] = g[1:t + 1]
        hop[1::2] = g[0:t]
        body = np.empty((rounds - 1, 2 * t + 2))
        body[:, :2 * t] = x[:-1, None] * hop[None, :]
        body[:, 2 * t] = x[1:]
        body[:, 2 * t + 1] = 0.0
        return np.concatenate([[0.0, x[0], 0.0], body.ravel()])


Strategy = Union[GeometricMonotone, ExplicitMonotone, SubMonotone]


def _monotone_positions(x: np.ndarray) -> np.ndarray:
    out = np.zeros(2 * x.size + 1)
    out[1::2] = x
    return out


def _arrival_times(points: np.ndarray) -> np.ndarray:
    return np.concatenate([[0.0], np.cumsum(np.abs(np.diff(points)))])


def _rounds_to_pass(s: Strategy, d: float) -> int:
    """Smallest r with x_r > d."""
    g = s.growth
    if isinstance(s, ExplicitMonotone) and not callable(s.x):
        r = int(np.searchsorted(np.asarray(s.x), d, side="right")) + 1
        return r
    x1 = float(s.anchors(1)[0])
    if d < x1:
        return 1
    if g == 1:
        raise DomainError("growth 1 never passes beyond x_1")
    r = int(math.floor(math.log(d / x1) / math.log(g))) + 2
    while r > 1 and float(s.anchors(r - 1)[-1]) > d:
        r -= 1
    while float(s.anchors(r)[-1]) <= d:
        r += 1
    return r


def _check_p(p: float):
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p}")


def _check_growth(s: Strategy, p: float):
    q = 1.0 - p
    if s.growth * q * q >= 1:
        raise DivergenceError(
            f"growth {s.growth:g} >= 1/(1-p)^2 = {1 / (q * q):.6g}: expected time diverges")


def turning_points(s: Strategy, n: int) -> list:
    """First n turning points (after the start at the origin), each paired
    with the direction of the movement that follows it."""
    if n < 1:
        raise DomainError("n must be positive")
    per_round = 2 * (len(s.round_offsets()) - 1) + 2
    rounds = n // per_round + 3
    pts = s.positions(rounds)
    out = []
    for j in range(1, n + 1):
        out.append((float(pts[j]), OUT if pts[j + 1] > pts[j] else IN))
    return out


@dataclass(frozen=True)
class GapSchedule:
    gaps: np.ndarray
    cumulative: np.ndarray


def _walk(s: Strategy, d: float, k: int):
    """Crossing times of the first k passes over d."""
    r_d = _rounds_to_pass(s, d)
    rounds = r_d + (k + 1) // 2 + 2
    pts = s.positions(rounds)
    if not np.all(np.isfinite(pts)):
        raise DomainError("trajectory overflows double precision at the required depth")
    if np.any(pts == d):
        raise TurningPointError(f"d={d!r} coincides with a turning point")
    times = _arrival_times(pts)
    out, counts = crossing_times(pts, times, np.array([d]), k)
    if counts[0] < k:  # pragma: no cover - rounds above always suffice
        raise DomainError("trajectory too short for the requested number of passes")
    return out[0]


def _check_placement(d: float):
    if not d >= 1:
        raise DomainError(f"placement must satisfy d >= 1, got {d}")


def gap_schedule(s: Strategy, d: float, k: int) -> GapSchedule:
    """Gaps g_1..g_k between consecutive passes over d."""
    _check_placement(d)
    if k < 1:
        raise DomainError("k must be positive")
    f = _walk(s, float(d), int(k))
    g = np.diff(np.concatenate([[0.0], f]))
    return GapSchedule(gaps=g, cumulative=f)


def _terms_needed(s: Strategy, p: float, d: float, eps: float) -> int:
    # A gap spans at most two rounds of travel, and every round after the
    # first pass crosses d at least twice, so g_i <= 8 beta x_{r_d+1} beta^(i/2).
    r_d = _rounds_to_pass(s, d)
    scale = 8.0 * s.growth * float(s.anchors(r_d + 1)[-1])
    return tail_bound_terms(p, s.growth, eps * (1.0 - p) / scale)


def expected_detection_time(s: Strategy, p: float, d: float, eps: float = 1e-12) -> float:
    """Expected time to detect a treasure at d, truncation error below eps."""
    _check_p(p)
    _check_placement(d)
    _check_growth(s, p)
    if not eps > 0:
        raise DomainError("eps must be positive")
    d = float(d)
    k = _terms_needed(s, p, d, eps)
    f = _walk(s, d, k)
    return _discounted(f, 1.0 - p)


def _discounted(f: np.ndarray, q: float) -> float:
    g = np.diff(np.concatenate([[0.0], f]))
    w = q ** np.arange(g.size, dtype=float)
    return float(np.dot(w, g))


@dataclass(frozen=True)
class CrSample:
    d: float
    expected_time: float
    ratio: float


def competitive_ratio_at(s: Strategy, p: float, d: float, eps: float = 1e-12) -> CrSample:
    e = expected_detection_time(s, p, d, eps)
    return CrSample(d=float(d), expected_time=e, ratio=p * e / d)


def _ratios(s: Strategy, p: float, ds: np.ndarray, eps: float) -> np.ndarray:
    """p E[T](d) / d for many placements at once."""
    ds = np.asarray(ds, dtype=float)
    dmax = float(ds.max())
    k = _terms_needed(s, p, dmax, eps)
    r_d = _rounds_to_pass(s, dmax)
    pts = s.positions(r_d + (k + 1) // 2 + 2)
    if not np.all(np.isfinite(pts)):
        raise DomainError("trajectory overflows double precision at the required depth")
    times = _arrival_times(pts)
    out, counts = crossing_times(pts, times, ds, k)
    if np.any(counts < k):  # pragma: no cover
        raise DomainError("trajectory too short for the requested number of passes")
    g = np.diff(np.concatenate([np.zeros((ds.size, 1)), out], axis=1), axis=1)
    w = (1.0 - p) ** np.arange(k, dtype=float)
    return p * (g @ w) / ds


@dataclass(frozen=True)
class SupReport:
    value: float
    round: int
    interval: int
    d: float
    rounds_used: int
    round_change: float
    richardson_change: float

    def __float__(self):
        return self.value


def competitive_ratio_sup(s: Strategy, p: float, r_max: int | None = None,
                          delta: float = 1e-9, tol: float = 1e-9,
                          eps: float = 1e-12, chunk: int = 16) -> SupReport:
    """Numeric sup over d >= 1 of p E[T](d)/d.

    Worst placements sit just beyond turning points, so each round r
    contributes the candidates d = x_r gamma_j (1 + delta).  Placements in
    [1, x_1) are not candidates: the trajectory has no scale below x_1 and
    the analysed ratio is the limit over rounds.  Rounds are
    added until the per-round maximum changes by less than tol; the best
    candidate is then re-evaluated at delta/10 and must agree within 1e-6.
    """
    _check_p(p)
    _check_growth(s, p)
    if not 0 < delta < 1e-3:
        raise DomainError("delta must be small and positive")
    g = s.growth
    if r_max is None:
        r_max = int(60 + 30 / max(math.log10(g), 1e-6))
    if r_max < 2:
        raise DomainError("r_max must be at least 2")
    offsets = np.asarray(s.round_offsets(), dtype=float)
    best = (-math.inf, 0, 0, 1.0)
    prev = None
    change = math.inf
    r = 1
    while r <= r_max:
        hi = min(r + chunk - 1, r_max)
        x = s.anchors(hi)[r - 1:]
        z = (x[:, None] * offsets[None, :]).ravel()
        ds = z * (1.0 + delta)
        keep = ds >= 1.0
        vals = np.full(ds.size, -math.inf)
        if np.any(keep):
            vals[keep] = _ratios(s, p, ds[keep], eps)
        vals = vals.reshape(x.size, offsets.size)
        for row in range(x.size):
            rr = r + row
            j = int(np.argmax(vals[row]))
            m = float(vals[row, j])
            if m > best[0]:
                best = (m, rr, j, float(ds[row * offsets.size + j]))
            if prev is not None and math.isfinite(m) and math.isfinite(prev):
                change = abs(m - prev)
                if change < tol:
                    rich = _richardson(s, p, best, delta, eps)
                    return SupReport(best[0], best[1], best[2] + 1, best[3], rr, change, rich)
            prev = m
        r = hi + 1
    raise ConvergenceError(
        f"sup not converged by r_max={r_max}: last round change {change:.3g}")


def _richardson(s, p, best, delta, eps) -> float:
    v, _, _, d = best
    z = d / (1.0 + delta)
    v2 = float(_ratios(s, p, np.array([z * (1.0 + delta / 10)]), eps)[0])
    change = abs(v2 - v)
    if change > 1e-6:
        raise ConvergenceError(
            f"one-sided limit unstable: delta and delta/10 differ by {change:.3g}")
    return change
