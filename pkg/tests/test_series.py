import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from belldae.errors import CompatibilityError, DomainError, SingularDivisionError, TruncationError
from belldae.series import (
    TruncSeries,
    cauchy_product,
    divide,
    dt_constant,
    dt_derivative,
    dt_exp_forcing,
    dt_monomial,
    evaluate,
)

coeff_lists = st.lists(st.floats(-3, 3, allow_nan=False), min_size=1, max_size=12)


def test_series_is_immutable():
    s = TruncSeries([1.0, 2.0])
    with pytest.raises(ValueError):
        s.coeffs[0] = 5.0


def test_rejects_empty_and_non_finite():
    with pytest.raises(ValueError):
        TruncSeries([])
    with pytest.raises(ValueError):
        TruncSeries([1.0, np.inf])
    with pytest.raises(ValueError):
        TruncSeries([1.0], grid_denominator=0)


def test_exp_forcing_matches_factorials():
    s = dt_exp_forcing(2.0, 8)
    expected = [2.0**k / math.factorial(k) for k in range(9)]
    np.testing.assert_allclose(s.coeffs, expected, rtol=1e-15)


def test_monomial_is_kronecker_delta():
    np.testing.assert_array_equal(dt_monomial(3, 5).coeffs, [0, 0, 0, 1, 0, 0])
    np.testing.assert_array_equal(dt_monomial(7, 5).coeffs, np.zeros(6))


def test_derivative_rule():
    # w = e^{3v}: W(k) = 3^k/k!, so the derivative transform is 3 W(k)
    s = dt_exp_forcing(3.0, 10)
    d = dt_derivative(s, 1)
    np.testing.assert_allclose(d.coeffs, 3 * s.coeffs[:10], rtol=1e-14)
    d2 = dt_derivative(s, 2)
    np.testing.assert_allclose(d2.coeffs, 9 * s.coeffs[:9], rtol=1e-14)


def test_derivative_beyond_order_fails():
    with pytest.raises(TruncationError):
        dt_derivative(TruncSeries([1.0, 2.0]), 2)


def test_derivative_requires_integer_grid():
    with pytest.raises(CompatibilityError):
        dt_derivative(TruncSeries([1.0, 0.0, 1.0], grid_denominator=2), 1)


def test_product_matches_numpy_polymul():
    rng = np.random.default_rng(1)
    a, b = rng.normal(size=7), rng.normal(size=7)
    ref = np.polynomial.polynomial.polymul(a, b)[:7]
    np.testing.assert_allclose(cauchy_product(TruncSeries(a), TruncSeries(b)).coeffs, ref, rtol=1e-13)


def test_product_clamps_to_shorter_order():
    p = TruncSeries([1.0, 1.0, 1.0]) * TruncSeries([1.0, 1.0])
    assert p.order == 1


def test_mixed_origin_is_rejected():
    with pytest.raises(CompatibilityError):
        TruncSeries([1.0], origin=0.0) + TruncSeries([1.0], origin=1.0)
    with pytest.raises(CompatibilityError):
        TruncSeries([1.0]) * TruncSeries([1.0], grid_denominator=3)


def test_geometric_division():
    q = divide(dt_constant(1.0, 6), TruncSeries([1.0, -1.0, 0, 0, 0, 0, 0]))
    np.testing.assert_allclose(q.coeffs, np.ones(7))


def test_division_by_zero_constant_term():
    with pytest.raises(SingularDivisionError):
        TruncSeries([1.0, 1.0]) / TruncSeries([0.0, 1.0])


small_lists = st.lists(st.floats(-0.3, 0.3, allow_nan=False), min_size=1, max_size=12)


@settings(max_examples=60, deadline=None)
@given(coeff_lists, small_lists, st.floats(1.0, 3.0))
def test_divide_inverts_product(a, b, b0):
    # divisor dominated by its constant term keeps forward substitution well conditioned
    b[0] = b0
    sa, sb = TruncSeries(a), TruncSeries(b)
    back = divide(cauchy_product(sa, sb), sb)
    n = min(len(a), len(b))
    np.testing.assert_allclose(back.coeffs, sa.coeffs[:n], atol=1e-12 * (1 + np.max(np.abs(a))))


@settings(max_examples=60, deadline=None)
@given(coeff_lists, st.floats(-0.9, 0.9))
def test_evaluate_matches_polyval(c, v):
    s = TruncSeries(c)
    assert evaluate(s, v) == pytest.approx(np.polynomial.polynomial.polyval(v, c), abs=1e-12)


def test_evaluate_shifted_origin_and_array():
    s = TruncSeries([1.0, 2.0, 3.0], origin=1.0)
    np.testing.assert_allclose(evaluate(s, np.array([1.0, 2.0])), [1.0, 6.0])
    assert isinstance(evaluate(s, 1.5), float)


def test_fractional_grid_evaluation():
    # coefficient 1 on the q=2 grid multiplies v**(1/2)
    s = TruncSeries([0.0, 1.0], grid_denominator=2)
    assert evaluate(s, 0.25) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        evaluate(s, -0.1)


def test_operators():
    a = TruncSeries([1.0, 2.0])
    np.testing.assert_array_equal((a + a).coeffs, [2.0, 4.0])
    np.testing.assert_array_equal((a - a).coeffs, [0.0, 0.0])
    np.testing.assert_array_equal((-a).coeffs, [-1.0, -2.0])
    np.testing.assert_array_equal((3 * a).coeffs, [3.0, 6.0])
    assert a(0.5) == 2.0
    assert a == TruncSeries([1.0, 2.0])
    assert a != TruncSeries([1.0, 2.0], origin=1.0)
