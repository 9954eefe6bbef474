import math
from fractions import Fraction

import numpy as np
import pytest

from belldae.errors import DomainError, NumericError, SingularDivisionError
from belldae.expr import evaluate_expr, parse
from belldae.series import TruncSeries
from belldae.transform import (
    Evaluator,
    OuterTransform,
    Pending,
    dependency_profile,
    transform_expr,
    transform_series,
)

from _oracles import analytic_on_disc, assert_taylor_close, cauchy_taylor, random_forcing


def _coeffs(text, order, env=None, q=1):
    return transform_series(parse(text), env or {}, order, q).coeffs


def test_singular_looking_forcing_expands_by_division():
    # -(2v^4 + 2v^3 + 1) / (2 (1+v)^2)
    got = _coeffs("-(2*v^4 + 2*v^3 + 1)/(2*(1 + v)^2)", 4)
    np.testing.assert_allclose(got, [-0.5, 1.0, -1.5, 1.0, -1.5], rtol=1e-15)


def test_log_composition():
    got = _coeffs("ln(1 - v^2)", 6)
    np.testing.assert_allclose(got, [0, 0, -1, 0, -0.5, 0, -1 / 3], atol=1e-16)


@pytest.mark.parametrize(
    "text, fn",
    [
        ("exp(sin(v))", lambda z: np.exp(np.sin(z))),
        ("cos(v^2 + v)", lambda z: np.cos(z**2 + z)),
        ("sqrt(4 + v)", lambda z: np.sqrt(4 + z)),
        ("powr(1 + v, -3/2)", lambda z: (1 + z) ** -1.5),
        ("ln(2 + exp(v))", lambda z: np.log(2 + np.exp(z))),
        ("(1 + v)^7", lambda z: (1 + z) ** 7),
        ("v/(3 - v)", lambda z: z / (3 - z)),
    ],
)
def test_against_cauchy_integral(text, fn):
    ref, scale = cauchy_taylor(fn, 12)
    assert_taylor_close(_coeffs(text, 12), ref, scale, rtol=1e-9)


def test_random_forcing_sample():
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 10:
        e = random_forcing(rng)
        if not analytic_on_disc(e):
            continue
        ref, scale = cauchy_taylor(lambda z: evaluate_expr(e, z), 10)
        got = transform_series(e, {}, 10).coeffs
        assert_taylor_close(got, ref, scale)
        checked += 1


def test_state_composition_uses_source_series():
    # exp(w) with w = -v: coefficients (-1)^k / k!
    env = {"w": TruncSeries([0.0, -1.0] + [0.0] * 6)}
    got = transform_series(parse("exp(w)", ["w"]), env, 7).coeffs
    np.testing.assert_allclose(got, [(-1) ** k / math.factorial(k) for k in range(8)], rtol=1e-15)
    assert transform_expr(parse("exp(w)", ["w"]), env, 1) == -1.0


def test_fractional_grid_places_v_at_index_q():
    got = _coeffs("exp(2*v)", 8, q=2)
    np.testing.assert_allclose(got, [1, 0, 2, 0, 2, 0, 4 / 3, 0, 2 / 3], rtol=1e-15)


def test_expansion_point_shifts_independent_variable():
    # v about origin 1: v = 1 + (v - 1)
    got = transform_series(parse("v^2"), {}, 3, origin=1.0).coeffs
    np.testing.assert_allclose(got, [1.0, 2.0, 1.0, 0.0])


def test_pending_propagates_and_zero_factor_skips_unknown():
    known = {"a": [1.0, 2.0]}

    def source(name, k):
        if name == "z":
            return 0.0 if k == 0 else 1.0
        c = known[name]
        if k >= len(c):
            raise Pending(name, k)
        return c[k]

    ev = Evaluator(source)
    with pytest.raises(Pending):
        ev.coef(parse("a*a", ["a"]), 2)
    # z[0] == 0 exactly, so the term z[0]*a[2] is skipped and a[2] is never requested
    assert ev.coef(parse("z*a", ["z", "a"]), 2) == 3.0


def test_trial_layers_roll_back():
    state = {"x": 1.0}

    def source(name, k):
        return state["x"] if k == 0 else 0.0

    ev = Evaluator(source)
    e = parse("exp(x)", ["x"])
    ev.begin()
    state["x"] = 2.0
    assert ev.coef(e, 0) == pytest.approx(math.exp(2.0))
    ev.rollback()
    state["x"] = 0.0
    ev.begin()
    assert ev.coef(e, 0) == 1.0
    ev.commit()
    state["x"] = 5.0
    assert ev.coef(e, 0) == 1.0


def test_division_by_series_with_zero_constant():
    with pytest.raises(SingularDivisionError):
        _coeffs("1/v", 3)


def test_log_about_non_positive_centre():
    with pytest.raises(DomainError):
        _coeffs("ln(v)", 3)
    with pytest.raises(DomainError):
        _coeffs("sqrt(-1 + v)", 3)


def test_outer_coefficients():
    ot = OuterTransform("powr", 4.0, exponent=Fraction(1, 2))
    np.testing.assert_allclose(ot.coefficients(2), [2.0, 0.25, -1 / 64])
    with pytest.raises(NumericError):
        OuterTransform("exp", 800.0).coefficient(0)


def test_dependency_profile():
    assert dependency_profile(parse("w1*exp(w2) + v", ["w1", "w2"]), 4) == {"w1": 4, "w2": 4}
