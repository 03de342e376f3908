"""Small numeric toolbox: brackets and bisection, dense solves, quadratic
roots and geometric tail bounds.

The routines are written against plain arithmetic operators so they work
on Python floats and on gmpy2 mpfr numbers alike.  That matters for the
lower-bound linear systems and for the characteristic polynomial at
small p, where double precision runs out of digits.
"""
from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import gmpy2
import numpy as np

from .errors import DivergenceError, DomainError, ResidualError, SingularMatrixError

PIVOT_TOL = 1e-13
RESIDUAL_TOL = 1e-9


@contextlib.contextmanager
def high_precision(digits: int):
    """Run a block with gmpy2 arithmetic at `digits` decimal digits.

    gmpy2 contexts are thread-local, so concurrent callers never see each
    other's precision.
    """
    bits = int(math.ceil(digits * 3.3219280948873626)) + 8
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        yield


def mpf(x):
    """Convert to an mpfr at the current context precision."""
    return gmpy2.mpfr(x)


@dataclass(frozen=True)
class Poly:
    """Real polynomial, coefficients lowest degree first."""

    coeffs: tuple

    def __init__(self, coeffs: Sequence):
        c = list(coeffs)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if not c:
            c = [0.0]
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __mul__(self, other: "Poly") -> "Poly":
        out = [0.0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out)

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0.0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0.0] * (n - len(other.coeffs))
        return Poly([u + v for u, v in zip(a, b)])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + Poly([-c for c in other.coeffs])

    def scale(self, k) -> "Poly":
        return Poly([k * c for c in self.coeffs])


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.f_lo * self.f_hi > 0:
            raise DomainError("bracket endpoints have the same sign")


def scan_brackets(f: Callable, lo: float, hi: float, steps: int) -> list[Bracket]:
    """Every consecutive grid pair on [lo, hi] where f changes sign.

    Non-finite grid values are skipped.  An exact zero on the grid is
    reported once, as the right end of a bracket.
    """
    if not lo < hi:
        raise DomainError("scan needs lo < hi")
    if steps < 1:
        raise DomainError("steps must be positive")
    xs = np.linspace(lo, hi, steps + 1)
    out = []
    prev = None
    for x in xs:
        v = float(f(float(x)))
        if not math.isfinite(v):
            prev = None
            continue
        if prev is not None:
            px, pv = prev
            if pv != 0 and pv * v <= 0:
                out.append(Bracket(px, float(x), pv, v))
        prev = (float(x), v)
    return out


def scan_brackets_vec(fv: Callable, lo: float, hi: float, steps: int) -> list[Bracket]:
    """Same as scan_brackets for an f that accepts a whole grid array."""
    xs = np.linspace(lo, hi, steps + 1)
    with np.errstate(all="ignore"):
        vs = np.asarray(fv(xs), dtype=float)
    out = []
    prev = None
    for x, v in zip(xs, vs):
        if not math.isfinite(v):
            prev = None
            continue
        if prev is not None and prev[1] != 0 and prev[1] * v <= 0:
            out.append(Bracket(prev[0], float(x), prev[1], float(v)))
        prev = (float(x), float(v))
    return out


def _sign(v) -> int:
    return int(v > 0) - int(v < 0)


def bisect(bracket: Bracket, f: Callable, tol: float = 1e-12, max_iter: int = 400):
    """Bisection on a valid bracket.  Returns the midpoint of the final
    interval, whose width is at most tol (or no longer splittable)."""
    if not tol > 0:
        raise DomainError("tol must be positive")
    if not isinstance(bracket, Bracket):
        raise DomainError("bisect needs a Bracket")
    lo, hi = bracket.lo, bracket.hi
    s_lo = _sign(f(lo))
    if s_lo == 0:
        return lo
    if _sign(f(hi)) == 0:
        return hi
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = (lo + hi) / 2
        if mid == lo or mid == hi:
            break
        s = _sign(f(mid))
        if s == 0:
            return mid
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def _inf_norm(v) -> float:
    return max((abs(x) for x in v), default=0)


def solve_linear(A, b, pivot_tol: float = PIVOT_TOL, check: bool = True):
    """Gaussian elimination with partial pivoting.

    Works on float arrays and on object arrays of gmpy2 mpfr numbers.  A pivot
    smaller than pivot_tol in magnitude raises SingularMatrixError carrying
    the elimination step.  When check is set, the residual must satisfy
    ||Ax - b||_inf <= 1e-9 ||b||_inf, otherwise ResidualError.
    """
    A0 = np.array(A, dtype=object if _is_object(A) else float)
    b0 = np.array(b, dtype=A0.dtype)
    n = A0.shape[0]
    if A0.ndim != 2 or A0.shape[1] != n or b0.shape != (n,):
        raise DomainError("solve_linear needs a square matrix and matching vector")
    M = A0.copy()
    rhs = b0.copy()
    for k in range(n):
        col = np.abs(M[k:, k])
        piv = k + int(np.argmax(col))
        if not abs(M[piv, k]) >= pivot_tol:
            raise SingularMatrixError(k, M[piv, k])
        if piv != k:
            M[[k, piv]] = M[[piv, k]]
            rhs[[k, piv]] = rhs[[piv, k]]
        if k + 1 < n:
            m = M[k + 1:, k] / M[k, k]
            M[k + 1:, k + 1:] -= np.outer(m, M[k, k + 1:])
            rhs[k + 1:] -= m * rhs[k]
    x = rhs.copy()
    for k in range(n - 1, -1, -1):
        acc = x[k]
        if k + 1 < n:
            acc = acc - np.dot(M[k, k + 1:], x[k + 1:])
        x[k] = acc / M[k, k]
    if check:
        r = A0.dot(x) - b0
        bound = RESIDUAL_TOL * _inf_norm(b0)
        if _inf_norm(r) > bound:
            raise ResidualError(
                f"residual {float(_inf_norm(r)):.3g} exceeds {float(bound):.3g}")
    return x


def _is_object(A) -> bool:
    arr = np.asarray(A)
    return arr.dtype == object


def quadratic_roots(poly: Poly) -> tuple:
    """Real roots of a degree-2 polynomial, increasing; () if complex.

    Uses the cancellation-free form q = -(b + sign(b) sqrt(disc)) / 2.
    """
    c = list(poly.coeffs) + [0.0] * (3 - len(poly.coeffs))
    if len(c) > 3 or c[2] == 0:
        raise DomainError("quadratic_roots needs degree exactly 2")
    c0, c1, c2 = c
    disc = c1 * c1 - 4 * c2 * c0
    if disc < 0:
        return ()
    sq = disc ** 0.5
    if disc == 0:
        return (-c1 / (2 * c2),)
    q = -(c1 + sq) / 2 if c1 >= 0 else -(c1 - sq) / 2
    r1, r2 = q / c2, c0 / q
    return (r1, r2) if r1 <= r2 else (r2, r1)


def tail_bound_terms(p: float, growth: float, eps: float) -> int:
    """Terms k of sum (1-p)^(i-1) g_i needed so the dropped tail is < eps.

    The gaps are taken to grow at most by `growth` every two terms, with
    g_1 normalised to 1, so g_i <= sqrt(growth)^i and the tail after k terms
    is bounded by sqrt(growth) rho^k / (1 - rho), rho = (1-p) sqrt(growth).
    Callers rescale eps by the actual gap magnitude.
    """
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    if not eps > 0:
        raise DomainError("eps must be positive")
    if growth < 1:
        raise DomainError("growth must be at least 1")
    q = 1.0 - p
    if growth * q * q >= 1:
        raise DivergenceError(
            f"growth {growth} >= 1/(1-p)^2 = {1 / (q * q):.6g}: series diverges")
    s = math.sqrt(growth)
    rho = q * s
    k = math.ceil(math.log(eps * (1 - rho) / s) / math.log(rho))
    k = max(k, 1)
    while s * rho ** k / (1 - rho) >= eps:
        k += 1
    return k
