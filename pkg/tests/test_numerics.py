import math

import numpy as np
import pytest

from faultysearch.errors import DivergenceError, DomainError, ResidualError, SingularMatrixError
from faultysearch.monotone import lower_bound_system, optimal_monotone_cr
from faultysearch.numerics import (
    Bracket, Poly, bisect, high_precision, mpf, quadratic_roots, scan_brackets,
    scan_brackets_vec, solve_linear, tail_bound_terms,
)
from faultysearch.submonotone import discriminant, heuristic_t1


def test_scan_finds_single_root():
    br = scan_brackets(lambda x: x * x - 1, 0, 2, 100)
    assert len(br) == 1
    assert br[0].lo <= 1.0 <= br[0].hi


def test_scan_no_root():
    assert scan_brackets(lambda x: x * x + 1, 0, 2, 100) == []


def test_scan_vec_matches_scalar():
    f = lambda x: np.cos(3 * x) if isinstance(x, np.ndarray) else math.cos(3 * x)
    a = scan_brackets(f, 0, 5, 200)
    b = scan_brackets_vec(f, 0, 5, 200)
    assert [(x.lo, x.hi) for x in a] == [(x.lo, x.hi) for x in b]
    assert len(a) == 5


def test_scan_discriminant_t1_below_heuristic():
    br = scan_brackets(lambda R: discriminant(0.5, R, 1), 3, 6, 600)
    assert br
    lo = br[0]
    assert 3.69 < lo.lo < 3.71
    assert lo.hi < heuristic_t1(0.5).R + 0.01


def test_scan_rejects_bad_range():
    with pytest.raises(DomainError):
        scan_brackets(lambda x: x, 1, 0, 10)


def test_bracket_validation():
    with pytest.raises(DomainError):
        Bracket(0, 1, 1.0, 2.0)
    with pytest.raises(DomainError):
        Bracket(1, 1, -1.0, 2.0)


def test_bisect_linear():
    f = lambda x: x - 2
    assert abs(bisect(Bracket(0, 4, f(0), f(4)), f, 1e-12) - 2.0) <= 1e-12


def test_bisect_sqrt2():
    f = lambda x: x * x - 2
    assert abs(bisect(Bracket(1, 2, f(1), f(2)), f, 1e-12) - math.sqrt(2)) <= 1e-12


def test_bisect_discriminant_t0():
    f = lambda R: discriminant(0.5, R, 0)
    br = scan_brackets(f, 3, 8, 2000)[0]
    R = bisect(br, f)
    assert abs(R - optimal_monotone_cr(0.5)) < 1e-10
    assert abs(R - 4.0522847) < 1e-7


def test_bisect_high_precision():
    with high_precision(60):
        f = lambda x: x * x - 2
        one, two = mpf(1), mpf(2)
        r = bisect(Bracket(one, two, f(one), f(two)), f, tol=mpf("1e-50"))
        assert abs(r - gmpy2_sqrt2()) < mpf("1e-49")


def gmpy2_sqrt2():
    import gmpy2
    return gmpy2.sqrt(mpf(2))


def test_solve_identity_and_diagonal():
    assert np.allclose(solve_linear(np.eye(2), [3, 7]), [3, 7])
    assert np.allclose(solve_linear([[2, 0], [0, 4]], [2, 8]), [1, 2])


def test_solve_needs_pivoting():
    A = [[0.0, 1.0], [1.0, 0.0]]
    assert np.allclose(solve_linear(A, [2, 3]), [3, 2])


def test_solve_singular():
    with pytest.raises(SingularMatrixError) as ei:
        solve_linear([[1.0, 2.0], [2.0, 4.0]], [1, 2])
    assert ei.value.pivot_index == 1


def test_solve_residual_check():
    # nearly singular: x is huge, so rounding leaves a residual far above 1e-9 |b|
    A = [[1.0, 1.0], [1.0, 1.0 + 3e-16]]
    with pytest.raises(ResidualError):
        solve_linear(A, [1.0, 0.3], pivot_tol=1e-20)
    solve_linear(A, [1.0, 0.3], pivot_tol=1e-20, check=False)


def test_solve_lower_bound_ell3_increasing():
    sys_ = lower_bound_system(0.5, 4.06, 3)
    f = np.concatenate([[1.0], solve_linear(sys_.matrix, sys_.rhs)])
    assert np.all(f > 0) and np.all(np.diff(f) > 0)


def test_solve_object_arrays():
    with high_precision(50):
        A = np.array([[mpf(2), mpf(1)], [mpf(1), mpf(3)]], dtype=object)
        x = solve_linear(A, np.array([mpf(3), mpf(4)], dtype=object))
        assert abs(x[0] - 1) < mpf("1e-45") and abs(x[1] - 1) < mpf("1e-45")


def test_solve_shape_mismatch():
    with pytest.raises(DomainError):
        solve_linear(np.eye(2), [1, 2, 3])


def test_quadratic_roots():
    assert quadratic_roots(Poly([2, -3, 1])) == (1.0, 2.0)
    assert quadratic_roots(Poly([1, 0, 1])) == ()
    assert quadratic_roots(Poly([1, -2, 1])) == (1.0,)


def test_quadratic_roots_needs_degree_two():
    with pytest.raises(DomainError):
        quadratic_roots(Poly([1, 2]))


def test_quadratic_cancellation():
    # roots 1e-9 and 1e9: the textbook formula loses the small one
    r = quadratic_roots(Poly([1.0, -(1e9 + 1e-9), 1.0]))
    assert abs(r[0] - 1e-9) < 1e-22 and abs(r[1] - 1e9) < 1e-3


def test_poly_arithmetic():
    a, b = Poly([1, 1]), Poly([-1, 1])
    assert (a * b).coeffs == (-1, 0, 1)
    assert (a + b).coeffs == (0, 2)
    assert (a - a).degree == 0
    assert a.scale(3)(2) == 9


def test_tail_terms_constant_gap():
    k5, k9 = tail_bound_terms(0.5, 1.0, 1e-12), tail_bound_terms(0.9, 1.0, 1e-12)
    assert 38 <= k5 <= 45
    assert k9 < k5


def test_tail_terms_optimal_growth_series():
    # gaps of the b=2 example: 7, then 2d and 2(x_{r+i}-d) alternating
    k = tail_bound_terms(0.5, 1.7836, 1e-10)
    assert k < 200
    gaps = [7.0]
    i = 1
    while len(gaps) < 400:
        gaps += [2 * (2.0 ** (1 + i) - 3), 6.0]
        i += 1
    full = sum(0.5 ** j * g for j, g in enumerate(gaps))
    kk = tail_bound_terms(0.5, 2.0, 1e-10 / 8)
    part = sum(0.5 ** j * g for j, g in enumerate(gaps[:kk]))
    assert abs(full - 13.0) < 1e-10
    assert abs(part - 13.0) < 1e-10


def test_tail_terms_divergent():
    with pytest.raises(DivergenceError):
        tail_bound_terms(0.5, 4.0, 1e-12)
