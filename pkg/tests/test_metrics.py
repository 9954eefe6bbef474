import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from belldae.engine import solve
from belldae.metrics import absolute_error, error_report, max_error, relative_error
from belldae.problems import get_example
from belldae.series import TruncSeries, evaluate

ROUNDING = 1e-14


@pytest.fixture(scope="module")
def runs():
    out = {}
    for n in (1, 2, 3, 4):
        case = get_example(n)
        for order in (10, 12, 15, 20):
            out[n, order] = (case, solve(case.spec.with_order(order)))
    return out


def _within_factor(got, ref, factor=5.0):
    return ref / factor <= got <= ref * factor


def test_exact_series_has_zero_error():
    s = TruncSeries([1.0, -2.0, 0.5])
    f = lambda v: 1 - 2 * v + 0.5 * v**2  # noqa: E731
    assert absolute_error(f, s, 0.0) == 0.0
    assert relative_error(f, s, 0.0) == 0.0
    assert max_error(f, s, [0.0, 0.5, 1.0]) <= 1e-16


def test_relative_error_undefined_at_zero():
    s = TruncSeries([0.0, 1.0])
    assert relative_error(lambda v: np.sin(v), s, 0.0) is None
    arr = relative_error(lambda v: np.sin(v), s, np.array([0.0, 0.5]))
    assert np.isnan(arr[0]) and arr[1] > 0


def test_empty_grid_is_rejected():
    with pytest.raises(ValueError):
        max_error(np.exp, TruncSeries([1.0]), [])
    with pytest.raises(ValueError):
        error_report({"w": TruncSeries([1.0])}, {"w": np.exp}, [])


def test_example1_relative_errors(runs):
    case, r = runs[1, 20]
    assert relative_error(case.exact["w1"], r["w1"], 0.1) <= 1e-14
    assert _within_factor(relative_error(case.exact["w1"], r["w1"], 0.5), 3.7e-8)


def test_example2_max_error_of_w(runs):
    case, r = runs[2, 15]
    assert _within_factor(max_error(case.exact["w"], r["w"], case.grid), 6.0e-11)


def test_example3_relative_errors_at_one(runs):
    case, r = runs[3, 12]
    for name, ref in (("w1", 6.3e-11), ("w2", 4.0e-10), ("w3", 1.3e-10)):
        assert _within_factor(relative_error(case.exact[name], r[name], 1.0), ref)


def test_example3_w3_max_error_is_rounding_level(runs):
    case, r = runs[3, 15]
    assert max_error(case.exact["w3"], r["w3"], case.grid) <= 1e-13


def test_example4(runs):
    case, r = runs[4, 20]
    assert max_error(case.exact["w3"], r["w3"], case.grid) <= ROUNDING
    assert _within_factor(relative_error(case.exact["w1"], r["w1"], 1.0), 2.9e-8)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_error_trend_is_non_increasing(runs, n):
    maxima = [error_report(runs[n, N][1].series, runs[n, N][0].exact, runs[n, N][0].grid).max_errors
              for N in (10, 15, 20)]
    for name in maxima[0]:
        seq = [m[name] for m in maxima]
        assert seq[1] <= seq[0] + ROUNDING and seq[2] <= seq[1] + ROUNDING, (name, seq)


def test_report_tables(runs):
    case, r = runs[1, 20]
    rep = error_report(r.series, case.exact, case.grid)
    assert rep.order == 20
    t = rep["w1"]
    assert rep.max_errors["w1"] == t.max_error == np.max(t.abs_error)
    rows = list(t.rows())
    assert len(rows) == len(case.grid)
    v, ex, ap, e, rel = rows[4]
    assert v == 0.5
    assert e == pytest.approx(abs(ex - ap), abs=0)
    assert rel == pytest.approx(e / abs(ex))


def test_report_skips_variables_without_closed_form():
    rep = error_report({"a": TruncSeries([1.0]), "b": TruncSeries([2.0])}, {"a": lambda v: 1 + 0 * v}, [0.1])
    assert set(rep.variables) == {"a"}


coeffs = st.lists(st.floats(-3, 3, allow_nan=False), min_size=1, max_size=6)


@settings(max_examples=60, deadline=None)
@given(coeffs, coeffs, st.floats(0.01, 100), st.floats(-0.9, 0.9))
def test_scale_equivariance(a, b, c, v):
    exact_s = TruncSeries(a)
    exact = lambda x: evaluate(exact_s, x)  # noqa: E731
    approx = TruncSeries(b)
    scaled = TruncSeries(np.asarray(b) * c)
    e = absolute_error(exact, approx, v)
    e_c = absolute_error(lambda x: c * exact(x), scaled, v)
    assert e_c == pytest.approx(c * e, rel=1e-12, abs=1e-12)
    r = relative_error(exact, approx, v)
    if r is not None and abs(exact(v)) > 1e-6:
        assert relative_error(lambda x: c * exact(x), scaled, v) == pytest.approx(r, rel=1e-9, abs=1e-12)
        assert r * abs(exact(v)) == pytest.approx(e, rel=1e-12, abs=1e-15)
    assert e >= 0
