import math

import numpy as np
import pytest

from faultysearch.errors import ConvergenceError, DivergenceError, DomainError, TurningPointError
from faultysearch.monotone import optimal_base, optimal_monotone_cr
from faultysearch.submonotone import SubMonotoneParams, heuristic_t1
from faultysearch.trajectory import (
    ExplicitMonotone, GeometricMonotone, SubMonotone, competitive_ratio_at,
    competitive_ratio_sup, expected_detection_time, gap_schedule, turning_points,
)
from oracles import CR_OPT_HALF, R1_HEURISTIC_HALF, geometric_gaps, series, submonotone_gaps


def test_geometric_turning_points():
    tp = turning_points(GeometricMonotone(2), 8)
    assert [x for x, _ in tp] == [2, 0, 4, 0, 8, 0, 16, 0]
    assert [k for _, k in tp[:2]] == ["in", "out"]


def test_submonotone_round_trace():
    s = SubMonotone(SubMonotoneParams(1, 2.0, (1.5,)))
    pts = s.positions(3)
    # 0 -> 2 -> 0, then round 1: out to 3, back to 2, on to 4, home
    assert list(pts[:7]) == [0, 2, 0, 3, 2, 4, 0]
    assert list(pts[7:11]) == [6, 4, 8, 0]


def test_zero_hop_is_monotone():
    b = 1.9
    a = GeometricMonotone(b).positions(10)
    s = SubMonotone(SubMonotoneParams(0, b)).positions(10)
    assert np.array_equal(a, s)


def test_explicit_matches_geometric():
    xs = [2.0 ** i for i in range(1, 60)]
    e = ExplicitMonotone(xs)
    assert e.growth == 2.0
    assert expected_detection_time(e, 0.5, 3) == pytest.approx(13.0, abs=1e-10)
    f = ExplicitMonotone(lambda i: 2.0 ** i, growth=2.0)
    assert expected_detection_time(f, 0.5, 3) == pytest.approx(13.0, abs=1e-10)


def test_explicit_validation():
    with pytest.raises(DomainError):
        ExplicitMonotone([1.0, 1.0, 2.0])
    with pytest.raises(DomainError):
        ExplicitMonotone(lambda i: i)


def test_explicit_too_short():
    with pytest.raises(DomainError):
        expected_detection_time(ExplicitMonotone([2.0, 4.0, 8.0]), 0.5, 3)


def test_gap_schedule_example():
    g = gap_schedule(GeometricMonotone(2), 3, 6)
    assert list(g.gaps) == [7, 2, 6, 10, 6, 26]
    assert list(g.cumulative) == [7, 9, 15, 25, 31, 57]


def test_odd_gaps_are_round_trips():
    d = 5.3
    g = gap_schedule(GeometricMonotone(1.7), d, 21).gaps
    assert np.allclose(g[2::2], 2 * d)


def test_last_interval_second_gap():
    # d in the last interval (gamma_t x_r, x_{r+1}): g_2 = 2 beta^(r+1) - 2d
    beta, gam = 2.5, (1.3, 1.9)
    s = SubMonotone(SubMonotoneParams(2, beta, gam))
    r, d = 2, 1.95 * beta ** 2
    g = gap_schedule(s, d, 4).gaps
    assert g[1] == pytest.approx(2 * beta ** (r + 1) - 2 * d, rel=1e-13)


@pytest.mark.parametrize("d", [1.2, 2.3, 3.2, 5.9, 7.3, 40.0, 123.4])
def test_submonotone_gaps_closed_form(d):
    beta, gam = 3.0, (1.4, 2.2)
    g = gap_schedule(SubMonotone(SubMonotoneParams(2, beta, gam)), d, 15).gaps
    assert np.allclose(g, submonotone_gaps(beta, gam, d, 15), rtol=1e-12, atol=1e-9)


def test_turning_point_placement_rejected():
    with pytest.raises(TurningPointError):
        gap_schedule(GeometricMonotone(2), 4, 3)


def test_expected_time_example():
    assert expected_detection_time(GeometricMonotone(2), 0.5, 3) == pytest.approx(13.0, abs=1e-10)
    assert series(geometric_gaps(2, 3, 200), 0.5) == pytest.approx(13.0, abs=1e-12)


def test_near_certain_detection_is_first_passage():
    e = expected_detection_time(GeometricMonotone(2), 1 - 1e-12, 3)
    assert e == pytest.approx(7.0, abs=1e-9)


def test_eps_contract():
    s = GeometricMonotone(1.8)
    a = expected_detection_time(s, 0.3, 4.1, eps=1e-6)
    b = expected_detection_time(s, 0.3, 4.1, eps=1e-12)
    assert abs(a - b) < 1e-6


def test_divergent_growth():
    with pytest.raises(DivergenceError):
        expected_detection_time(GeometricMonotone(5), 0.5, 3)
    with pytest.raises(DivergenceError):
        expected_detection_time(GeometricMonotone(4), 0.5, 3)


def test_bad_arguments():
    s = GeometricMonotone(2)
    for p in (0, 1, -0.1, 1.5):
        with pytest.raises(DomainError):
            expected_detection_time(s, p, 3)
    with pytest.raises(DomainError):
        expected_detection_time(s, 0.5, 0.5)
    with pytest.raises(DomainError):
        GeometricMonotone(1.0)


def test_ratio_example():
    cr = competitive_ratio_at(GeometricMonotone(2), 0.5, 3)
    assert cr.ratio == pytest.approx(0.5 * 13 / 3, abs=1e-12)
    assert round(cr.ratio, 6) == 2.166667


def test_single_visit_limit():
    # p -> 1: ratio -> (2 sum_{i<=r} x_i + d)/d just past x_r
    d = 8 * (1 + 1e-9)
    cr = competitive_ratio_at(GeometricMonotone(2), 1 - 1e-12, d)
    assert cr.ratio == pytest.approx((2 * (2 + 4 + 8) + d) / d, rel=1e-9)


def test_worst_case_at_left_endpoint():
    s = GeometricMonotone(2)
    left = competitive_ratio_at(s, 0.5, 8 * (1 + 1e-9)).ratio
    mid = competitive_ratio_at(s, 0.5, 12).ratio
    assert left > mid


def test_sup_optimal_monotone():
    rep = competitive_ratio_sup(GeometricMonotone(optimal_base(0.5)), 0.5, r_max=60)
    assert abs(rep.value - CR_OPT_HALF) < 1e-6
    assert rep.round_change < 1e-9
    assert rep.richardson_change < 1e-6


def test_sup_heuristic_t1():
    h = heuristic_t1(0.5)
    rep = competitive_ratio_sup(SubMonotone(h.params), 0.5)
    assert abs(rep.value - R1_HEURISTIC_HALF) < 1e-5


def test_sup_converges_in_rounds():
    s = GeometricMonotone(optimal_base(0.3))
    a = competitive_ratio_sup(s, 0.3)
    assert a.rounds_used > 60
    assert float(a) == pytest.approx(optimal_monotone_cr(0.3), abs=1e-6)


def test_sup_budget_exhausted():
    with pytest.raises(ConvergenceError):
        competitive_ratio_sup(GeometricMonotone(1.01), 0.01, r_max=3, tol=1e-15)
