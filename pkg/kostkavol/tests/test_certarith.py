from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from kostkavol.core.base.errors import InputError, PreconditionError
from kostkavol.core.certarith.certified import (
    CertifiedValue,
    as_fraction,
    ceil_log2,
    ceil_sqrt,
    certified_pi,
    pi_bracket,
    sqrt_bounds,
)
from kostkavol.core.certarith.matrix import det_certified, det_exact, det_integer, null_vector, rank, solve
from kostkavol.core.certarith.series import (
    exp_bounds,
    exp_neg_approx,
    log1m_exp_bound,
    log_approx,
    log_bounds,
    series_length,
)

mpmath.mp.dps = 80


def mp(q):
    q = Fraction(q)
    return mpmath.mpf(q.numerator) / q.denominator


def test_as_fraction_rejects_floats():
    assert as_fraction(3) == Fraction(3)
    with pytest.raises(InputError):
        as_fraction(0.5)
    with pytest.raises(InputError):
        as_fraction(True)


@pytest.mark.parametrize(
    "q, expected",
    [(1, 0), (2, 1), (3, 2), (Fraction(1, 2), -1), (Fraction(3, 8), -1), (Fraction(1, 4), -2), (1024, 10)],
)
def test_ceil_log2(q, expected):
    assert ceil_log2(q) == expected


def test_ceil_sqrt():
    assert ceil_sqrt(14) == 4
    assert ceil_sqrt(16) == 4
    assert ceil_sqrt(Fraction(1, 4)) == 1
    assert ceil_sqrt(0) == 0


@given(st.fractions(min_value=0, max_value=10 ** 6, max_denominator=10 ** 6))
def test_sqrt_bounds_enclose(q):
    lo, hi = sqrt_bounds(q, 64)
    assert lo * lo <= q <= hi * hi
    if q > 0:
        assert hi - lo <= hi * Fraction(1, 1 << 63)


def test_sqrt_bounds_exact_square():
    assert sqrt_bounds(Fraction(9, 4)) == (Fraction(3, 2), Fraction(3, 2))


def test_pi_bracket_contains_pi():
    lo, hi = pi_bracket(60)
    assert mp(lo) <= mpmath.pi <= mp(hi)
    assert hi - lo < Fraction(1, 10 ** 55)
    pi = certified_pi(30)
    assert mp(pi.lower) <= mpmath.pi <= mp(pi.upper)
    assert pi.width < Fraction(1, 10 ** 25)


def test_certified_value_arithmetic_encloses():
    a = CertifiedValue.from_bounds(1, 2)
    b = CertifiedValue.from_bounds(-1, 3)
    assert (a + b).bounds() == (Fraction(0), Fraction(5))
    assert (a - b).bounds() == (Fraction(-2), Fraction(3))
    assert (a * b).bounds() == (Fraction(-2), Fraction(6))
    assert (a / 2).bounds() == (Fraction(1, 2), Fraction(1))
    with pytest.raises(InputError):
        a / b


def test_certified_value_comparisons():
    a = CertifiedValue.from_bounds(1, 2)
    assert a.certainly_le(2)
    assert not a.certainly_lt(2)
    assert a.overlaps(CertifiedValue.exact(Fraction(3, 2)))
    with pytest.raises(InputError):
        CertifiedValue.from_bounds(2, 1)


def test_multiplicative_bounds_cover_both_readings():
    value = CertifiedValue(Fraction(10), Fraction(1, 10), "multiplicative")
    lo, hi = value.bounds()
    assert lo == Fraction(100, 11)
    assert hi == Fraction(100, 9)


# -- series kernels -----------------------------------------------------------------------


@settings(max_examples=100, deadline=None)
@given(st.fractions(min_value=0, max_value=50, max_denominator=1000))
def test_exp_neg_approx_relative_bound(x):
    delta = Fraction(1, 10 ** 12)
    t = exp_neg_approx(x, delta)
    exact = mpmath.exp(-mp(x))
    assert abs(exact - mp(t)) <= mp(delta) * exact
    assert abs(1 / exact - 1 / mp(t)) <= mp(delta) / exact


def test_exp_neg_approx_edge_cases():
    assert exp_neg_approx(0, Fraction(1, 100)) == 1
    with pytest.raises(PreconditionError):
        exp_neg_approx(-1, Fraction(1, 100))
    with pytest.raises(InputError):
        exp_neg_approx(1, 0)
    assert series_length(Fraction(1, 2), Fraction(1, 2)) >= 2 * (1 + 1)


@settings(max_examples=100, deadline=None)
@given(st.fractions(min_value=Fraction(1, 1000), max_value=1000, max_denominator=10 ** 6))
def test_log_approx_additive_bound(x):
    delta = Fraction(1, 10 ** 15)
    t = log_approx(x, delta)
    assert abs(mpmath.log(mp(x)) - mp(t)) <= mp(delta)


def test_log_approx_tiny_and_huge():
    delta = Fraction(1, 10 ** 10)
    for x in (Fraction(1, 10 ** 40), Fraction(10 ** 40), Fraction(3, 7) ** 50):
        assert abs(mpmath.log(mp(x)) - mp(log_approx(x, delta))) <= mp(delta)
    assert log_approx(1, delta) == 0
    with pytest.raises(InputError):
        log_approx(0, delta)


@given(st.fractions(min_value=-30, max_value=30, max_denominator=100))
def test_exp_and_log_bounds_enclose(q):
    lo, hi = exp_bounds(q)
    assert mp(lo) <= mpmath.exp(mp(q)) <= mp(hi)
    if q > 0:
        lo, hi = log_bounds(q)
        assert mp(lo) <= mpmath.log(mp(q)) <= mp(hi)


@pytest.mark.parametrize("z", [Fraction(1, 10 ** 6), Fraction(1, 3), Fraction(1), Fraction(5)])
def test_log1m_exp_bound(z):
    bound = log1m_exp_bound(z)
    assert abs(mpmath.log(1 - mpmath.exp(-mp(z)))) <= mp(bound)
    assert bound >= 1


# -- exact linear algebra -------------------------------------------------------------------


def test_det_exact_hilbert():
    hilbert = [[Fraction(1, i + j + 1) for j in range(3)] for i in range(3)]
    assert det_exact(hilbert) == Fraction(1, 2160)


def test_det_integer_needs_pivoting():
    assert det_integer([[0, 1], [1, 0]]) == -1
    assert det_integer([[1, 2], [2, 4]]) == 0
    assert det_integer([]) == 1


integer_matrices = st.integers(min_value=3, max_value=4).flatmap(
    lambda n: st.lists(
        st.lists(st.integers(min_value=-9, max_value=9), min_size=n, max_size=n), min_size=n, max_size=n
    )
)


@settings(max_examples=100, deadline=None)
@given(integer_matrices, st.data())
def test_det_certified_contains_exact(matrix, data):
    exact = det_exact(matrix)
    if exact == 0:
        return
    rel = Fraction(1, 10 ** 12)
    perturbed = [
        [v * (1 + data.draw(st.fractions(min_value=-rel, max_value=rel, max_denominator=10 ** 15))) for v in row]
        for row in matrix
    ]
    tau = max(max(abs(v) for v in row) for row in matrix) or 1
    certified = det_certified(perturbed, rel, tau, abs(exact))
    assert certified.contains(exact)
    assert certified.mode == "multiplicative"


def test_det_certified_rejects_weak_floor():
    with pytest.raises(PreconditionError):
        det_certified([[1, 0], [0, 1]], Fraction(1, 10), 1, Fraction(1, 100))
    with pytest.raises(PreconditionError):
        det_certified([[1, 0], [0, 1]], Fraction(1, 2), 1, 1)


def test_rank_solve_null_vector():
    assert rank([[1, 2], [2, 4]]) == 1
    assert solve([[2, 1], [1, 3]], [3, 5]) == [Fraction(4, 5), Fraction(7, 5)]
    assert solve([[1, 2], [2, 4]], [1, 2]) is None
    kernel = null_vector([[1, 1, 0], [0, 1, 1]], 3)
    assert kernel is not None
    assert kernel[0] + kernel[1] == 0 and kernel[1] + kernel[2] == 0
    assert null_vector([[1, 0, 0]], 3) is None
