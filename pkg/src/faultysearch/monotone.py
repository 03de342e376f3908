"""Monotone strategies: the optimal geometric strategy and a numeric
certificate that no monotone strategy does better.

A monotone strategy returns to the origin after every turning point.  The
lower bound comes from the linear system A f = a that the turning points
f_1..f_ell of a strategy with ratio c must satisfy with equality; the
strategy is realisable only if the solution is positive and increasing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DivergenceError, DomainError, NoRootError
from .numerics import PIVOT_TOL, Poly, high_precision, mpf, quadratic_roots, solve_linear, tail_bound_terms


def _check_p(p):
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p}")


def optimal_base(p: float) -> float:
    """Expansion factor b_p = 1 / (sqrt(1-p) (2 - p - sqrt(1-p)))."""
    _check_p(p)
    s = math.sqrt(1 - p)
    b = 1.0 / (s * (2 - p - s))
    assert 1 < b < 1 / (1 - p) ** 2
    return b


def monotone_cr_formula(p: float, b: float) -> float:
    """Competitive ratio of the geometric strategy x_i = b^i."""
    _check_p(p)
    q = 1 - p
    if not 1 < b < 1 / (q * q):
        raise DomainError(f"need 1 < b < 1/(1-p)^2, got b={b}")
    return p * 2 * b / (b - 1) + p * 2 * b * q / (1 - b * q * q) + p * p / (2 - p)


def optimal_monotone_cr(p: float) -> float:
    """(4 + 4 sqrt(1-p)) / (2-p) - p."""
    _check_p(p)
    return (4 + 4 * math.sqrt(1 - p)) / (2 - p) - p


def lower_bound_poly(p: float) -> Poly:
    """g(c) whose larger root is the best monotone ratio."""
    return Poly([
        p * p * ((p - 4) * p + 12) / 4,
        2 * ((p - 2) * p + 4) * (p - 2) / 4,
        (2 - p) ** 2 / 4,
    ])


def worst_case_cr_interval(x: Union[Sequence[float], Callable[[int], float]], p: float,
                           r: int, growth: float | None = None, eps: float = 1e-12) -> float:
    """Ratio as d approaches x_r from the right, for monotone turning points x.

    x is a sequence (x[0] = x_1) or a callable i -> x_i with a growth bound.
    """
    _check_p(p)
    if r < 1:
        raise DomainError("r must be at least 1")
    q = 1 - p
    if callable(x):
        if growth is None:
            raise DomainError("callable x needs a growth bound")
        get = lambda i: float(x(i))
    else:
        xs = np.asarray(x, dtype=float)
        if np.any(np.diff(xs) <= 0):
            raise DomainError("x must be strictly increasing")
        if growth is None:
            growth = float(np.max(xs[1:] / xs[:-1]))
        get = lambda i: float(xs[i - 1])
    if growth * q * q >= 1:
        raise DivergenceError(f"growth {growth:g} >= 1/(1-p)^2: series diverges")
    xr = get(r)
    head = sum(get(i) for i in range(1, r + 1))
    # terms q^(2i-1) x_{r+i} <= x_r (q^2 growth)^i / q; reuse the two-step tail bound
    k = tail_bound_terms(p, growth, eps * q / (2 * p)) // 2 + 2
    tail = math.fsum(q ** (2 * i - 1) * get(r + i) for i in range(1, k + 1))
    return 2 * p / xr * head + 2 * p / xr * tail + p * p / (2 - p)


@dataclass(frozen=True)
class LowerBoundSystem:
    ell: int
    p: float
    c: float
    matrix: np.ndarray
    rhs: np.ndarray
    alpha: float


@dataclass(frozen=True)
class LowerBoundVerdict:
    c: float
    ell: int
    monotone: bool
    f: np.ndarray


def _fill(p, c, ell, one):
    """Matrix and right-hand side in the number type of `one`."""
    p = one * p
    c = one * c
    q = one - p
    a = one / 2 + one / (2 - p) - c / (2 * p)
    A = np.empty((ell, ell), dtype=object)
    qpow = [one]
    for _ in range(2 * ell + 2):
        qpow.append(qpow[-1] * q)
    for k in range(ell):
        for i in range(1, ell + 1):
            if i < k:
                A[k, i - 1] = one
            elif i == k:
                A[k, i - 1] = a
            else:
                A[k, i - 1] = qpow[2 * (i - k) - 1]
        A[k, ell - 1] = A[k, ell - 1] + qpow[2 * (ell - k) + 1] / (p * (2 - p))
    b = np.array([-a] + [-one] * (ell - 1), dtype=object)
    return A, b, a


def lower_bound_system(p: float, c: float, ell: int) -> LowerBoundSystem:
    """The ell x ell system A f = a in double precision.

    Row k = 0..ell-1, column i = 1..ell: 1 below the diagonal (i < k),
    alpha on it, (1-p)^(2(i-k)-1) above, and (1-p)^(2(ell-k)+1)/(p(2-p))
    added to the last column.
    """
    _check_p(p)
    if not c > 0:
        raise DomainError("c must be positive")
    if int(ell) != ell or ell < 2:
        raise DomainError(f"ell must be an integer >= 2, got {ell}")
    A, b, a = _fill(p, c, int(ell), 1.0)
    return LowerBoundSystem(int(ell), p, c, A.astype(float), b.astype(float), float(a))


def default_digits(p: float, ell: int) -> int:
    """Working precision for the lower-bound solve.

    The solution grows geometrically (up to 1/(1-p)^2 per step) while the
    entries shrink like (1-p)^(2 ell), so the digits needed grow linearly
    in ell.  Double precision is not enough beyond moderate p and ell.
    """
    return int(30 + ell * (2 * math.log10(1 / (1 - p)) + 1.5))


def lower_bound_verdict(p: float, c: float, ell: int, digits: int | None = None) -> LowerBoundVerdict:
    """Solve A f = a with f_0 = 1 prepended and test whether f is positive
    and strictly increasing."""
    sys_ = lower_bound_system(p, c, ell)  # validates arguments
    digits = digits or default_digits(p, ell)
    with high_precision(digits):
        A, b, _ = _fill(p, c, sys_.ell, mpf(1))
        # keep the pivot threshold at the same distance from unit roundoff
        f = solve_linear(A, b, pivot_tol=PIVOT_TOL * 10.0 ** (16 - digits))
        f = np.concatenate([[mpf(1)], f])
        ok = all(v > 0 for v in f) and all(f[i + 1] > f[i] for i in range(f.size - 1))
    return LowerBoundVerdict(float(c), sys_.ell, bool(ok), f.astype(float))


def lower_bound_threshold(p: float, ell: int, tol: float = 1e-4,
                          lo: float = 3.0, hi: float = 8.0, digits: int | None = None) -> float:
    """Smallest c (to within tol) on [lo, hi] for which the ell-system admits
    a monotone solution.  Ties resolve toward the monotone side."""
    if not tol > 0:
        raise DomainError("tol must be positive")
    v = lambda c: lower_bound_verdict(p, c, ell, digits).monotone
    if not v(hi) or v(lo):
        raise NoRootError(f"monotone verdict does not change on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if v(mid):
            hi = mid
        else:
            lo = mid
    return hi


def lower_bound_roots(p: float) -> tuple:
    """Both real roots of g(c); the larger is the best monotone ratio."""
    return quadratic_roots(lower_bound_poly(p))
