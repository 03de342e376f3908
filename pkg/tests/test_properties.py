"""Property-based checks of the numerical invariants."""
import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from faultysearch._accel import HAVE_NUMBA
from faultysearch._kernels import first_successes
from faultysearch.monotone import lower_bound_system, monotone_cr_formula, optimal_monotone_cr
from faultysearch.numerics import Bracket, Poly, bisect, quadratic_roots, solve_linear
from faultysearch.submonotone import (
    SubMonotoneParams, _coef, char_poly, gammas_from, interval_ratios, residual13,
)
from faultysearch.trajectory import (
    GeometricMonotone, SubMonotone, expected_detection_time, gap_schedule,
)
from oracles import geometric_gaps, series, submonotone_gaps

probs = st.floats(0.05, 0.95)


@st.composite
def sub_params(draw, max_t=4):
    t = draw(st.integers(0, max_t))
    beta = draw(st.floats(1.3, 4.0))
    cuts = sorted(draw(st.lists(st.floats(0.05, 0.95), min_size=t, max_size=t, unique=True)))
    gam = tuple(1 + c * (beta - 1) for c in cuts)
    assume(all(b - a > 1e-3 for a, b in zip((1.0,) + gam, gam + (beta,))))
    return SubMonotoneParams(t, beta, gam)


def _off_turning_points(params, d):
    chain = [float(c) for c in params.chain]
    for m in range(0, 60):
        for c in chain:
            if abs(d - c * params.beta ** m) < 1e-7 * d:
                return False
    return True


@given(st.floats(1.1, 3.5), st.floats(1.0, 500.0))
def test_geometric_gaps_match_closed_form(b, d):
    assume(all(abs(d - b ** i) > 1e-7 * d for i in range(0, 80)))
    g = gap_schedule(GeometricMonotone(b), d, 12).gaps
    assert np.allclose(g, geometric_gaps(b, d, 12), rtol=1e-11, atol=1e-9)


@given(sub_params(), st.floats(1.0, 300.0))
def test_submonotone_gaps_match_closed_form(params, d):
    assume(_off_turning_points(params, d))
    g = gap_schedule(SubMonotone(params), d, 14).gaps
    ref = submonotone_gaps(float(params.beta), [float(x) for x in params.gammas], d, 14)
    assert np.allclose(g, ref, rtol=1e-11, atol=1e-8)


@given(sub_params(max_t=3), st.floats(1.0, 100.0), probs)
def test_series_matches_closed_form_sum(params, d, p):
    assume(params.beta * (1 - p) ** 2 < 0.9)
    assume(_off_turning_points(params, d))
    e = expected_detection_time(SubMonotone(params), p, d)
    ref = series(submonotone_gaps(float(params.beta), [float(x) for x in params.gammas], d, 600), p)
    assert e == pytest.approx(ref, rel=1e-10)


@given(st.integers(2, 8), st.integers(0, 2 ** 32 - 1))
def test_solve_linear_round_trip(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n)) + n * np.eye(n)
    x = rng.normal(size=n)
    assert np.allclose(solve_linear(A, A @ x), x, atol=1e-10)


@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(0.1, 10), st.booleans())
def test_quadratic_roots_recovered(r1, r2, a, neg):
    assume(abs(r1 - r2) > 1e-3)
    a = -a if neg else a
    poly = Poly([a * r1 * r2, -a * (r1 + r2), a])
    lo, hi = quadratic_roots(poly)
    scale = max(1.0, abs(r1), abs(r2))
    assert lo == pytest.approx(min(r1, r2), abs=1e-9 * scale)
    assert hi == pytest.approx(max(r1, r2), abs=1e-9 * scale)


@given(st.floats(-5, 5), st.floats(1e-14, 1e-6))
def test_bisect_tolerance(root, tol):
    f = lambda x: (x - root) ** 3 + (x - root)
    br = Bracket(root - 3.0, root + 7.0, f(root - 3.0), f(root + 7.0))
    assert abs(bisect(br, f, tol) - root) <= max(tol, 4e-15 * max(1, abs(root)))


@given(st.floats(1.05, 5.0), st.floats(-3.0, 3.0), st.integers(2, 8))
def test_gammas_solve_recurrence(x, y, t):
    g = [1.0] + gammas_from(x, y, t)
    for i in range(1, t):
        assert g[i + 1] == pytest.approx(x * g[i] - y, rel=1e-12, abs=1e-9)


@given(probs, st.floats(0.001, 0.999))
def test_monotone_formula_above_optimum(p, frac):
    b = 1 + frac * (1 / (1 - p) ** 2 - 1)
    assert monotone_cr_formula(p, b) >= optimal_monotone_cr(p) - 1e-12


@given(probs, st.floats(0.01, 5.0), st.integers(2, 6))
def test_alpha_sign(p, extra, ell):
    c = p + 2 * p / (2 - p) + extra
    assert lower_bound_system(p, c, ell).alpha < 0


@given(sub_params(max_t=3), probs)
def test_constructed_ratio_floor(params, p):
    assume(params.beta * (1 - p) ** 2 < 0.98)
    rep = interval_ratios(params, p)
    assert rep.overall >= max(3.0, 4.0 - p) - 1e-6


@given(probs, st.floats(3.0, 6.0), st.integers(0, 3), st.lists(st.floats(0.02, 0.98), min_size=3, max_size=3, unique=True))
def test_residual_proportional_to_char_poly(p, R, t, fracs):
    q = 1 - p
    cp = char_poly(p, R, t)
    ks = []
    for f in fracs:
        b = 1 + f * (1 / q ** 2 - 1)
        c = _coef(p, b)
        den = cp.q0 + cp.q1 * b + cp.q2 * b * b
        assume(abs(den) > 1e-9 * (abs(cp.q0) + abs(cp.q1) * b + abs(cp.q2) * b * b))
        ks.append(residual13(p, R, b, t) * (R / p - c.F) * (b - 1) * (1 - b * q * q) / den)
    ks = np.array(ks)
    assert np.ptp(ks) <= 1e-6 * np.max(np.abs(ks))


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")
@given(st.integers(0, 2 ** 64 - 1), st.floats(0.01, 0.99), st.integers(1, 300))
def test_backends_agree(seed, p, n):
    a = first_successes(seed, n, p, 400, use_numba=True)
    b = first_successes(seed, n, p, 400, use_numba=False)
    assert np.array_equal(a[0], b[0]) and a[1] == b[1]
