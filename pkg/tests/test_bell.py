import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from belldae.bell import BellTable, bell_oracle, bell_row, build_bell_table, compose
from belldae.series import TruncSeries, dt_exp_forcing

from _oracles import poly_power_coeff


def test_seed_rows():
    t = build_bell_table([2.0, 3.0])
    assert t[0, 0] == 1.0
    assert t[1, 0] == 0.0 and t[2, 0] == 0.0
    assert t[1, 1] == 2.0
    # B[2,1] = x2, B[2,2] = x1^2
    assert t[2, 1] == 3.0
    assert t[2, 2] == 4.0
    assert t[1, 2] == 0.0


def test_known_small_entries():
    x = [1.5, -0.5, 2.0, 0.25]
    t = build_bell_table(x)
    x1, x2, x3, x4 = x
    assert t[3, 2] == pytest.approx(2 * x1 * x2)
    assert t[4, 2] == pytest.approx(2 * x1 * x3 + x2**2)
    assert t[4, 3] == pytest.approx(3 * x1**2 * x2)
    assert t[4, 4] == pytest.approx(x1**4)


def test_all_ones_gives_binomials():
    # (t + t^2 + ...)^l has t^k coefficient C(k-1, l-1)
    t = build_bell_table(np.ones(10))
    for k in range(1, 11):
        for l in range(1, k + 1):
            assert t[k, l] == pytest.approx(math.comb(k - 1, l - 1), rel=1e-14)


def test_rows_are_frozen_and_append_only():
    t = BellTable()
    t.extend(1.0)
    first = t.row(1).copy()
    t.extend(2.0)
    np.testing.assert_array_equal(t.row(1), first)
    with pytest.raises(ValueError):
        t.row(1)[0] = 3.0
    assert t.order == 2
    np.testing.assert_array_equal(t.source, [1.0, 2.0])


def test_row_without_newest_input_leaves_linear_slot_empty():
    rows = [bell_row([], [])]
    rows.append(bell_row(rows, [0.7]))
    partial = bell_row(rows, [0.7])
    assert partial[1] == 0.0
    full = bell_row(rows, [0.7, 0.2])
    assert full[1] == 0.2
    np.testing.assert_array_equal(partial[2:], full[2:])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-2, 2, allow_nan=False), min_size=1, max_size=9))
def test_table_matches_polynomial_powers(x):
    t = build_bell_table(x)
    n = len(x)
    for k in range(n + 1):
        for l in range(k + 1):
            ref = poly_power_coeff(x, k, l)
            assert t[k, l] == pytest.approx(ref, rel=1e-10, abs=1e-12)


def test_oracle_agrees_with_independent_polynomial_powers():
    rng = np.random.default_rng(3)
    x = rng.uniform(-2, 2, 6)
    for k in range(7):
        for l in range(k + 1):
            assert bell_oracle(x, k, l) == pytest.approx(poly_power_coeff(x, k, l), rel=1e-12, abs=1e-14)


def test_values_matrix_is_lower_triangular():
    v = build_bell_table([1.0, 2.0, 3.0]).values
    assert v.shape == (4, 4)
    np.testing.assert_array_equal(np.triu(v, 1), 0.0)


def test_composition_exp_of_log():
    # exp(ln(1+v)) = 1 + v; F is exp expanded about ln(1) = 0
    n = 10
    g = [0.0] + [(-1) ** (k + 1) / k for k in range(1, n + 1)]
    h = compose(dt_exp_forcing(1.0, n), TruncSeries(g))
    np.testing.assert_allclose(h.coeffs, [1.0, 1.0] + [0.0] * (n - 1), atol=1e-14)


def test_composition_keeps_outer_constant():
    F = TruncSeries([3.25, 1.0, -2.0, 0.5])
    G = TruncSeries([9.0, 0.3, 0.1, -0.4])
    assert compose(F, G).coeffs[0] == 3.25


def test_composition_requires_long_enough_outer_series():
    with pytest.raises(ValueError):
        compose(TruncSeries([1.0, 1.0]), TruncSeries([0.0, 1.0, 1.0]))
