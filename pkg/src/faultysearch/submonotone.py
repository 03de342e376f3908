"""t-sub-monotone strategies.

Between consecutive anchors x_r = beta^r the searcher performs a t-hop:
each sub-interval [gamma_{j-1} x_r, gamma_j x_r] is swept out, back and
out again before moving on.  With coefficients A..F the worst-case ratio
of interval i is R_i = p((A g_i + B g_t + C)/g_{i-1} + D) for i <= t and
R_{t+1} = p(E/g_t + F).  Equalising all of them pins the gammas down to
a linear recurrence g_i = x g_{i-1} - y, and consistency of its endpoint
with g_t = E/(R/p - F) is the quadratic q0 + q1 beta + q2 beta^2 = 0.
The solver takes the smallest R >= 3 where that quadratic has a double
root.  This is a construction, and its optimality within the family is
a conjecture, not a theorem.

Float64 is not enough across the whole range: near p = 0.01 the factor
x^t reaches 1e23 at t = 10 and the feasibility margin x - y - 1 drops to
1e-23.  Roots are bracketed in double precision and then refined and
certified with gmpy2 at a precision scaled to x^t.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DomainError, InfeasiblePairError, NoRootError, ResidualError
from .numerics import Bracket, Poly, bisect, high_precision, mpf, scan_brackets_vec

P_MIN, P_MAX = 0.01, 0.99
T_MAX = 12
R_LO, R_HI, R_STEPS = 3.0, 8.0, 2000
RESIDUAL_MAX = 1e-8


@dataclass(frozen=True)
class SubMonotoneParams:
    """Expansion factor beta and hop points 1 < gamma_1 < ... < gamma_t < beta.

    gamma_0 = 1 and gamma_{t+1} = beta are implicit.  When p is given the
    convergence bound beta < 1/(1-p)^2 is checked as well.  Values are kept
    as given, so solver output may carry extended-precision gammas whose
    gaps to their neighbours are below double resolution.
    """

    t: int
    beta: float
    gammas: tuple = ()
    p: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "gammas", tuple(self.gammas))
        if int(self.t) != self.t or self.t < 0:
            raise DomainError(f"t must be a non-negative integer, got {self.t}")
        object.__setattr__(self, "t", int(self.t))
        if len(self.gammas) != self.t:
            raise DomainError(f"expected {self.t} gammas, got {len(self.gammas)}")
        chain = self.chain
        if any(not a < b for a, b in zip(chain, chain[1:])):
            raise DomainError(
                "need 1 < gamma_1 < ... < gamma_t < beta, got "
                + str(tuple(float(c) for c in chain)))
        if self.p is not None:
            if not 0 < self.p < 1:
                raise DomainError(f"p must lie in (0, 1), got {self.p}")
            if self.beta * (1 - self.p) ** 2 >= 1:
                raise DomainError(f"beta={float(self.beta)} violates beta < 1/(1-p)^2")

    @property
    def chain(self) -> tuple:
        """(gamma_0, ..., gamma_{t+1}) = (1, gamma_1, ..., gamma_t, beta)."""
        return (1,) + self.gammas + (self.beta,)


@dataclass(frozen=True)
class CoefficientSet:
    A: float
    B: float
    C: float
    D: float
    E: float
    F: float


def _D(p):
    return (-2 * p ** 4 + 12 * p ** 3 - 26 * p ** 2 + 23 * p - 4) / (2 - p)


def _coef(p, b):
    q = 1 - p
    u = 1 - b * q * q
    A = 2 * q
    B = 2 / (b - 1) + 2 * q ** 3 / u
    C = 2 * p * q ** 3 * (2 - p) * b / u
    E = 2 * p * q * (2 - p) * b / u
    F = p * (2 * (b * q + 1) / ((b - 1) * u) + (5 - 2 * p) / (2 - p))
    return CoefficientSet(A, B, C, _D(p), E, F)


def _check_p(p):
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p}")


def _check_beta(p, beta):
    if not 1 < beta < 1 / (1 - p) ** 2:
        raise DomainError(f"need 1 < beta < 1/(1-p)^2, got beta={float(beta)}")


def coefficients(p: float, beta: float) -> CoefficientSet:
    """The six coefficients A..F of the interval ratios."""
    _check_p(p)
    _check_beta(p, beta)
    return _coef(p, beta)


@dataclass(frozen=True)
class RatioReport:
    per_interval: tuple
    overall: float
    feasible: bool
    residual13: float
    margin1: float = math.nan
    margin2: float = math.nan


def _interval_values(p, c: CoefficientSet, chain):
    t = len(chain) - 2
    gt = chain[t]
    out = [p * ((c.A * chain[i] + c.B * gt + c.C) / chain[i - 1] + c.D) for i in range(1, t + 1)]
    out.append(p * (c.E / gt + c.F))
    return out


def residual13(p, R, beta, t):
    """(1 - y/(x-1)) x^t + y/(x-1) - E/(R/p - F)."""
    c = _coef(p, beta)
    x = (R / p - c.D) / c.A
    G = c.E / (R / p - c.F)
    y = (c.B * G + c.C) / c.A
    return (1 - y / (x - 1)) * x ** t + y / (x - 1) - G


def _margins(p, R, beta, t):
    """(x - y - 1, beta - E/(R/p - F)) for a pair (beta, R)."""
    c = _coef(p, beta)
    x = (R / p - c.D) / c.A
    G = c.E / (R / p - c.F)
    y = (c.B * G + c.C) / c.A
    return x - y - 1, beta - G


def interval_ratios(params: SubMonotoneParams, p: float) -> RatioReport:
    """Worst-case ratio of each interval of a t-hop, R_1..R_{t+1}."""
    _check_p(p)
    _check_beta(p, params.beta)
    c = _coef(p, params.beta)
    vals = _interval_values(p, c, params.chain)
    m1, m2 = _margins(p, max(vals), params.beta, params.t)
    res = residual13(p, max(vals), params.beta, params.t)
    return RatioReport(
        per_interval=tuple(float(v) for v in vals),
        overall=float(max(vals)),
        feasible=bool(m1 > 0 and m2 > 0),
        residual13=float(res),
        margin1=float(m1),
        margin2=float(m2),
    )


@dataclass(frozen=True)
class CharPoly:
    q0: float
    q1: float
    q2: float
    x: float
    y: Callable = field(repr=False, compare=False)

    @property
    def poly(self) -> Poly:
        return Poly([self.q0, self.q1, self.q2])

    @property
    def discriminant(self):
        return self.q1 * self.q1 - 4 * self.q0 * self.q2


def _q0_core(p, R):
    # The transcription of this factor pair carries the opposite overall
    # sign; with it flipped, q0 + q1 beta + q2 beta^2 is proportional to
    # the residual numerator and the t = 0 discriminant factors correctly.
    return -(p ** 2 * (2 * p * ((p - 6) * p + 12) - 17) - (p - 2) * R) * (p ** 2 + (p - 2) * R)


def _q1_parts(p, R):
    const = 2 * (p - 2) ** 4 * (p - 1) * p ** 3 * (R - p)
    lead = ((p * (p * (2 * p * (p * (2 * p - 19) + 74) - 297) + 308) - 134) * p ** 4
            - 2 * (p - 2) * (p * (p * ((p - 8) * p + 25) - 35) + 20) * p ** 2 * R
            - (p - 2) ** 2 * ((p - 2) * p + 2) * R ** 2)
    return const, lead


def _q2_parts(p, R):
    const = (p - 1) * 2 * (p - 2) ** 4 * p ** 3 * (3 * p - R)
    lead = -(p - 1) ** 2 * (p ** 2 * (2 * p - 5) - (p - 2) * R) * ((2 * (p - 4) * p + 9) * p ** 2 + (p - 2) * R)
    return const, lead


def _x_of(p, R):
    return (R / p - _D(p)) / (2 * (1 - p))


def _qs(p, R, t):
    xt = _x_of(p, R) ** t
    c1, l1 = _q1_parts(p, R)
    c2, l2 = _q2_parts(p, R)
    return _q0_core(p, R) * xt, c1 + l1 * xt, c2 + l2 * xt


def discriminant(p, R, t):
    """q1^2 - 4 q0 q2 of the t-characteristic polynomial; R may be an array."""
    q0, q1, q2 = _qs(p, R, t)
    return q1 * q1 - 4 * q0 * q2


def char_poly(p: float, R: float, t: int) -> CharPoly:
    """Coefficients of the quadratic in beta for the pair (p, R)."""
    _check_p(p)
    if int(t) != t or t < 0:
        raise DomainError("t must be a non-negative integer")
    q0, q1, q2 = _qs(p, R, int(t))

    def y(beta):
        c = _coef(p, beta)
        return (c.B * c.E / (R / p - c.F) + c.C) / c.A

    return CharPoly(q0, q1, q2, _x_of(p, R), y)


def limit_char_poly(p, R):
    """(q0bar, q1bar, q2bar): the x^t-coefficients, dominant as t grows."""
    return _q0_core(p, R), _q1_parts(p, R)[1], _q2_parts(p, R)[1]


def gammas_from(x, y, t: int) -> list:
    """gamma_i = (1 - y/(x-1)) x^i + y/(x-1), i = 1..t."""
    if not x > 1:
        raise DomainError(f"need x > 1, got {x}")
    s = y / (x - 1)
    return [(1 - s) * x ** i + s for i in range(1, t + 1)]


def _gammas_stable(x, G, t):
    # Same gammas with gamma_t = G imposed; avoids the cancellation in
    # (1 - y/(x-1)) when x - y - 1 is tiny.
    xt = x ** t
    return [1 + (G - 1) * (x ** i - 1) / (xt - 1) for i in range(1, t + 1)]


def check_feasible(p: float, beta: float, R: float, t: int | None = None) -> tuple:
    """Both strict inequalities x - y - 1 > 0 and beta - E/(R/p-F) > 0.

    With t given and t >= 1, x - y - 1 is evaluated in the equivalent form
    (G-1)(x-1)/(x^t-1), G = E/(R/p-F), valid when the endpoint constraint
    holds and free of cancellation.
    """
    _check_p(p)
    _check_beta(p, beta)
    c = _coef(p, beta)
    x = (R / p - c.D) / c.A
    G = c.E / (R / p - c.F)
    y = (c.B * G + c.C) / c.A
    if t is not None and t >= 1:
        m1 = (G - 1) * (x - 1) / (x ** t - 1)
    else:
        m1 = x - y - 1
    m2 = beta - G
    details = {"margin1": m1, "margin2": m2, "x": x, "y": y, "G": G}
    return bool(m1 > 0 and m2 > 0), details


@dataclass(frozen=True)
class Solution:
    """Solver output.  R_exact keeps the extended-precision root; ratio
    differences between consecutive t fall below double resolution at
    small p, so comparisons should use it."""

    R: float
    params: SubMonotoneParams
    report: RatioReport
    beta: float
    x: float
    digits: int
    rejected: tuple = ()
    R_exact: object = None

    def __iter__(self):
        return iter((self.R, self.params, self.report))


def solver_digits(p: float, t: int) -> int:
    x = _x_of(p, 4.0)
    return int(40 + 2 * t * math.log10(max(x, 2.0)))


def _check_solver_domain(p, t):
    if not P_MIN <= p <= P_MAX:
        raise DomainError(f"solver supports p in [{P_MIN}, {P_MAX}], got {p}")
    if int(t) != t or not 0 <= t <= T_MAX:
        raise DomainError(f"solver supports integer t in [0, {T_MAX}], got {t}")


def solve_optimal(p: float, t: int, tol: float = 1e-12, digits: int | None = None) -> Solution:
    """Smallest feasible R >= 3 with a zero-discriminant characteristic
    polynomial, and the strategy it induces.

    Candidate roots are scanned on [3, 8] in double precision, then refined
    by bisection in extended precision to within min(tol, 10^(15 - digits));
    the endpoint residual amplifies errors in R by x^t.  A root
    is accepted when beta = -q1/(2 q2) lies in (1, 1/(1-p)^2), both
    feasibility margins are positive and the endpoint residual is below
    1e-8.  Rejected roots are listed in `rejected`.
    """
    _check_solver_domain(p, t)
    if not tol > 0:
        raise DomainError("tol must be positive")
    return _solve_cached(float(p), int(t), float(tol), digits)


@lru_cache(maxsize=4096)
def _solve_cached(p, t, tol, digits):
    digits = digits or solver_digits(p, t)
    brackets = scan_brackets_vec(lambda R: discriminant(p, R, t), R_LO, R_HI, R_STEPS)
    if not brackets:
        raise NoRootError(f"discriminant has no sign change on [{R_LO}, {R_HI}] (p={p}, t={t})")
    rejected = []
    with high_precision(digits):
        P = mpf(p)
        f = lambda R: discriminant(P, R, t)
        for br in brackets:
            lo, hi = mpf(br.lo), mpf(br.hi)
            flo, fhi = f(lo), f(hi)
            if flo * fhi > 0:
                # a root sitting on a grid point can flip sign between the
                # two precisions; widen by one grid step and retry
                step = mpf((R_HI - R_LO) / R_STEPS)
                lo, hi = lo - step, hi + step
                flo, fhi = f(lo), f(hi)
            if flo * fhi > 0:
                rejected.append((br.lo, "sign change not confirmed in extended precision"))
                continue
            R = bisect(Bracket(lo, hi, flo, fhi), f, tol=min(tol, 10.0 ** (15 - digits)))
            verdict = _certify(P, R, t)
            if isinstance(verdict, str):
                rejected.append((float(R), verdict))
                continue
            return _package(P, R, t, digits, verdict, tuple(rejected))
    failed = [r for r in rejected]
    if any("margin" in why for _, why in failed):
        raise InfeasiblePairError(
            f"no feasible root for p={p}, t={t}: {failed}", failed=[w for _, w in failed])
    raise NoRootError(f"no qualifying root for p={p}, t={t}: {failed}")


def _certify(P, R, t):
    q0, q1, q2 = _qs(P, R, t)
    beta = -q1 / (2 * q2)
    if not 1 < beta < 1 / (1 - P) ** 2:
        return f"beta={float(beta):.6g} outside (1, 1/(1-p)^2)"
    ok, det = check_feasible(P, beta, R, t)
    if not det["x"] > 1:
        return "x <= 1"
    fails = []
    if not det["margin1"] > 0:
        fails.append("margin (11) x-y-1 <= 0")
    if not det["margin2"] > 0:
        fails.append("margin (12) beta-E/(R/p-F) <= 0")
    if fails:
        return "; ".join(fails)
    res = residual13(P, R, beta, t)
    if not abs(res) <= RESIDUAL_MAX:
        return f"residual {float(res):.3g} above {RESIDUAL_MAX}"
    return beta, det, res


def _package(P, R, t, digits, verdict, rejected):
    beta, det, res = verdict
    gam = _gammas_stable(det["x"], det["G"], t)
    params = SubMonotoneParams(t, beta, tuple(gam), float(P))
    c = _coef(P, beta)
    vals = _interval_values(P, c, params.chain)
    spread = max(vals) - min(vals)
    if spread > 1e-8 * max(vals):
        raise ResidualError(f"intervals not equalised: spread {float(spread):.3g}")
    report = RatioReport(
        per_interval=tuple(float(v) for v in vals),
        overall=float(max(vals)),
        feasible=True,
        residual13=float(res),
        margin1=float(det["margin1"]),
        margin2=float(det["margin2"]),
    )
    return Solution(R=float(R), params=params, report=report, beta=float(beta),
                    x=float(det["x"]), digits=digits, rejected=rejected, R_exact=R)


@dataclass(frozen=True)
class Heuristic:
    R: float
    params: SubMonotoneParams
    report: RatioReport

    def __iter__(self):
        return iter((self.R, self.params))


def heuristic_t1(p: float) -> Heuristic:
    """1-sub-monotone strategy with beta = 1/(1-p) and a closed-form ratio."""
    _check_p(p)
    R = math.sqrt((p - 2) * (p - 1) * (p * (p * (4 * p - 3) + 5) + 2)) + 4 / (2 - p) - (2 - p) * p
    beta = 1 / (1 - p)
    c = _coef(p, beta)
    g1 = c.E / (R / p - c.F)
    if not (1 < g1 < beta and g1 * (1 - p) <= 1):
        raise DomainError(f"gamma_1 degenerates in double precision at p={p}")
    params = SubMonotoneParams(1, beta, (g1,), p)
    return Heuristic(R, params, interval_ratios(params, p))


def heuristic_t1_constraint(p, R):
    """Endpoint constraint for t = 1 at beta = 1/(1-p), as a function of R."""
    return 0.5 * (R / (p - p * p) + (p - 4) / (p * p - 3 * p + 2)
                  - 4 * ((p - 1) * p + 2) * (p - 2) ** 2
                  / (p * (p * (2 * p - 9) - R + 12) + 2 * (R - 4)))


def heuristic_t2_constraint(p, R):
    """Endpoint constraint for t = 2 at beta = 1/(1-p), as a function of R."""
    return 0.25 * (R ** 2 / ((p - 1) ** 2 * p ** 2)
                   - 8 * ((p * ((p - 5) * p + 10) - 7) * p ** 2 + 4) * (p - 2) ** 2
                   / (p * (p * (p * (2 * p - 9) - R + 12) + 2 * (R - 4)))
                   - 4 * p ** 2
                   + (p * (p * (-4 * (p - 7) * p - 71) + 72) - 16) / (p ** 2 - 3 * p + 2) ** 2
                   - 2 * (p * ((p - 6) * p + 13) - 11) * R / ((p - 2) * (p - 1) ** 2)
                   + 10 * p - 16 / p)


def heuristic_t2_cubic(p: float) -> Poly:
    """4 x den(R) x constraint, a cubic in R."""
    den = Poly([p * (2 * p ** 3 - 9 * p ** 2 + 12 * p - 8), p * (2 - p)])
    rest = Poly([
        -4 * p ** 2 + (p * (p * (-4 * (p - 7) * p - 71) + 72) - 16) / (p ** 2 - 3 * p + 2) ** 2
        + 10 * p - 16 / p,
        -2 * (p * ((p - 6) * p + 13) - 11) / ((p - 2) * (p - 1) ** 2),
        1 / ((p - 1) ** 2 * p ** 2),
    ])
    num = -8 * ((p * ((p - 5) * p + 10) - 7) * p ** 2 + 4) * (p - 2) ** 2
    return rest * den + Poly([num])


def heuristic_t2(p: float) -> Heuristic:
    """2-sub-monotone strategy with beta = 1/(1-p); R is the real root of a
    cubic that lies in [3, 8]."""
    _check_p(p)
    cubic = heuristic_t2_cubic(p)
    roots = np.roots(list(reversed(cubic.coeffs)))
    real = sorted(r.real for r in roots if abs(r.imag) <= 1e-9 * max(1.0, abs(r)) and R_LO <= r.real <= R_HI)
    if len(real) != 1:
        raise NoRootError(f"cubic for p={p} has {len(real)} real roots in [{R_LO}, {R_HI}]")
    r0 = real[0]
    w = 1e-6 * r0
    br = Bracket(r0 - w, r0 + w, cubic(r0 - w), cubic(r0 + w))
    R = bisect(br, cubic, tol=1e-15)
    beta = 1 / (1 - p)
    c = _coef(p, beta)
    x = (R / p - c.D) / c.A
    y = (c.B * c.E / (R / p - c.F) + c.C) / c.A
    params = SubMonotoneParams(2, beta, tuple(gammas_from(x, y, 2)), p)
    return Heuristic(R, params, interval_ratios(params, p))


@dataclass(frozen=True)
class LimitResult:
    R: float
    beta: float
    x: float
    margin2: float
    roots: tuple
    R_exact: object = None


def limit_quartic(p: float) -> Poly:
    """q1bar^2 - 4 q0bar q2bar as a polynomial in R."""
    a = Poly([-(p ** 2) * (2 * p * ((p - 6) * p + 12) - 17), (p - 2)])
    b = Poly([p ** 2, (p - 2)])
    q0 = a * b
    q1 = Poly([
        (p * (p * (2 * p * (p * (2 * p - 19) + 74) - 297) + 308) - 134) * p ** 4,
        -2 * (p - 2) * (p * (p * ((p - 8) * p + 25) - 35) + 20) * p ** 2,
        -(p - 2) ** 2 * ((p - 2) * p + 2),
    ])
    d = Poly([p ** 2 * (2 * p - 5), -(p - 2)])
    e = Poly([(2 * (p - 4) * p + 9) * p ** 2, (p - 2)])
    q2 = (d * e).scale(-(p - 1) ** 2)
    return q1 * q1 - (q0 * q2).scale(4)


def limit_ratio(p: float) -> LimitResult:
    """The t -> infinity ratio: the smallest root >= 3 of the limit quartic
    whose pair (beta, R) is feasible.

    For p above roughly 0.885 a second real root exceeds 3; it comes with
    a negative beta and is skipped, as in solve_optimal.
    """
    _check_p(p)
    quart = limit_quartic(p)
    roots = np.roots(list(reversed(quart.coeffs)))
    cand = sorted(r.real for r in roots if abs(r.imag) <= 1e-9 * max(1.0, abs(r)) and r.real >= R_LO)
    why = []
    with high_precision(80):
        P = mpf(p)
        fq = lambda R: discriminant_limit(P, R)
        for c0 in cand:
            r0 = mpf(c0)
            w = r0 * mpf("1e-8")
            br = Bracket(r0 - w, r0 + w, fq(r0 - w), fq(r0 + w))
            R = bisect(br, fq, tol=mpf("1e-70"))
            q0, q1, q2 = limit_char_poly(P, R)
            beta = -q1 / (2 * q2)
            x = _x_of(P, R)
            if not 1 < beta < 1 / (1 - P) ** 2:
                why.append(f"R={float(R):.9g}: beta={float(beta):.6g} out of range")
                continue
            c = _coef(P, beta)
            m2 = beta - c.E / (R / P - c.F)
            if not m2 > 0:
                why.append(f"R={float(R):.9g}: violates (12)")
                continue
            if not x > 1:
                why.append(f"R={float(R):.9g}: x <= 1")
                continue
            return LimitResult(float(R), float(beta), float(x), float(m2),
                               tuple(complex(r) for r in roots), R_exact=R)
    if why:
        raise InfeasiblePairError(f"no feasible limit root for p={p}: {why}", why)
    raise NoRootError(f"limit quartic for p={p} has no real root >= {R_LO}")


def discriminant_limit(p, R):
    q0, q1, q2 = limit_char_poly(p, R)
    return q1 * q1 - 4 * q0 * q2
