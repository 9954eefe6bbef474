"""Registry of the five benchmark DAE problems with closed-form solutions.

Each :class:`ExampleCase` bundles a :class:`ProblemSpec`, the exact
solutions as callables, the default truncation order and grid, and
published reference numbers (values and error magnitudes) used by the
regression and acceptance tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .engine import Equation, ProblemSpec, Variable, compile_spec, parse_alpha
from .expr import evaluate_expr

EXAMPLE_NUMBERS = (1, 2, 3, 4, 5)


@dataclass(frozen=True)
class ReferenceValue:
    """One published number.

    ``quantity`` is ``"exact"``, ``"approx"``, ``"relative_error"`` or
    ``"max_error"``; ``v`` is ``None`` for grid maxima.
    """

    var: str
    quantity: str
    value: float
    order: int
    v: float | None = None
    alpha: Fraction | None = None


@dataclass(frozen=True)
class ExampleCase:
    number: int
    spec: ProblemSpec
    exact: dict
    default_order: int
    grid: tuple
    references: tuple = ()
    description: str = ""

    def refs(self, quantity=None, var=None, order=None, alpha=None):
        """Reference values filtered by the given fields."""
        out = []
        for r in self.references:
            if quantity is not None and r.quantity != quantity:
                continue
            if var is not None and r.var != var:
                continue
            if order is not None and r.order != order:
                continue
            if alpha is not None and r.alpha != Fraction(alpha):
                continue
            out.append(r)
        return out


def _grid(a, b, h=0.1):
    n = int(round((b - a) / h))
    return tuple(round(a + i * h, 12) for i in range(n + 1))


def _diff(name, order, initial):
    return Variable(name, "differential", Fraction(order), tuple(float(x) for x in initial))


def _alg(name, guess=None):
    return Variable(name, "algebraic", None, () if guess is None else (float(guess),))


def _column(var, quantity, order, values, vs, alpha=None):
    return tuple(ReferenceValue(var, quantity, float(x), order, v, alpha) for v, x in zip(vs, values))


def _maxima(rows, names):
    out = []
    for order, values in rows:
        for name, x in zip(names, values):
            out.append(ReferenceValue(name, "max_error", float(x), order))
    return tuple(out)


# ---------------------------------------------------------------------------

def _example1():
    spec = ProblemSpec(
        name="example1",
        variables=(
            _diff("w1", 1, [0.0]),
            _diff("w2", 1, [0.0]),
            _diff("w3", 1, [0.5]),
            _diff("w4", 1, [-0.5]),
            _alg("w"),
        ),
        equations=(
            Equation("w1", Fraction(1), "2*w3"),
            Equation("w2", Fraction(1), "2*w4"),
            Equation("w3", Fraction(1), "-2*w3 + exp(w2) + w + phi1"),
            Equation("w4", Fraction(1), "2*w4 + exp(w1) + w + phi2"),
        ),
        constraints=("w1 + w2 - phi3",),
        order=20,
        functions=(
            ("phi1", "-(2*v^4 + 2*v^3 + 1)/(2*(1 + v)^2)"),
            ("phi2", "(-2*v^4 + 2*v^3 - 1)/(2*(1 - v)^2)"),
            ("phi3", "ln(1 - v^2)"),
        ),
        exact=(
            ("w1", "ln(1 + v)"),
            ("w2", "ln(1 - v)"),
            ("w3", "1/(2*(1 + v))"),
            ("w4", "-1/(2*(1 - v))"),
            ("w", "v^2"),
        ),
    )
    vs = _grid(0.1, 1.0)
    refs = (
        _column("w1", "exact", 20, [0.0953101798, 0.1823215568, 0.2623642645, 0.3364722366,
                                    0.4054651081, 0.4700036292, 0.5306282511, 0.5877866649,
                                    0.6418538862, 0.6931471806], vs)
        + _column("w1", "approx", 20, [0.0953101798, 0.1823215568, 0.2623642645, 0.3364722365,
                                       0.4054650927, 0.4700029649, 0.5306123016, 0.5875375291,
                                       0.6390499221, 0.6687714032], vs)
        + _column("w1", "relative_error", 20, [7.2e-16, 3.0e-16, 1.4e-12, 4.5e-10, 3.7e-08,
                                               1.4e-06, 3.0e-05, 4.2e-04, 4.3e-03, 3.5e-02], vs)
        + _column("w2", "approx", 20, [-0.1053605157, -0.2231435513, -0.3566749439, -0.5108256234,
                                       -0.6931471371, -0.9162882787, -1.2038920520, -1.6075458670,
                                       -2.2633497340], vs[:9])
        + _column("w2", "relative_error", 20, [3.9e-16, 2.4e-16, 1.9e-12, 6.6e-10, 6.2e-08,
                                               2.6e-06, 6.7e-05, 1.1e-03, 1.7e-02], vs[:9])
        + _column("w3", "exact", 20, [0.4545454545, 0.4166666667, 0.3846153846, 0.3571428571,
                                      0.3333333333, 0.3125000000, 0.2941176471, 0.2777777778,
                                      0.2631578947], vs[:9])
        + _column("w3", "approx", 20, [0.4545454545, 0.4166666667, 0.3846153846, 0.3571428587,
                                       0.3333334923, 0.3125068553, 0.2942819253, 0.2803398256,
                                       0.2919523656], vs[:9])
        + _maxima(
            [(10, [1.5e-02, 1.8e-01, 8.2e-02, 1.5]),
             (15, [6.2e-03, 8.27e-02, 4.8e-02, 9.2e-01]),
             (20, [2.8e-03, 3.9e-02, 2.8e-02, 5.4e-01])],
            ["w1", "w2", "w3", "w4"],
        )
    )
    return spec, 20, _grid(0.1, 0.9), refs, "index-2 Hessenberg system with singular forcing at v = +-1"


def _example2():
    spec = ProblemSpec(
        name="example2",
        variables=(_diff("w1", 2, [1.0, 0.0]), _diff("w2", 2, [0.0, 1.0]), _alg("w")),
        equations=(
            Equation("w1", Fraction(2), "2*w2 - 2*w2^3 - w1*w"),
            Equation("w2", Fraction(2), "2*w1 - 2*w1^3 - w2*w"),
        ),
        constraints=("w1^2 + w2^2 - 1",),
        order=15,
        exact=(("w1", "cos(v)"), ("w2", "sin(v)"), ("w", "1 + sin(2*v)")),
    )
    vs = _grid(0.1, 0.9)
    refs = (
        _column("w1", "approx", 15, [0.9950041000, 0.9800671000, 0.9553361000, 0.9210611000,
                                     0.8775831000, 0.8253361000, 0.7648421000, 0.6967071000,
                                     0.6216110000], vs)
        + _column("w2", "approx", 15, [0.0998334100, 0.1986691000, 0.2955210000, 0.3894181000,
                                       0.4794261000, 0.5646421000, 0.6442181000, 0.7173561000,
                                       0.7833271000], vs)
        + _column("w", "approx", 15, [1.1986710000, 1.3894210000, 1.5646410000, 1.7173610000,
                                      1.8414710000, 1.9320410000, 1.9854510000, 1.9995710000,
                                      1.9738510000], vs)
        + _maxima(
            [(5, [7.2e-04, 9.3e-05, 1.1e-02]),
             (10, [5.8e-10, 7.8e-09, 1.5e-05]),
             (15, [8.7e-15, 4.4e-16, 6.0e-11])],
            ["w1", "w2", "w"],
        )
    )
    return spec, 15, vs, refs, "index-3 pendulum-like system on the unit circle"


def _example3(lam=15.0):
    lam = float(lam)
    lm5 = lam - 5.0
    spec = ProblemSpec(
        name="example3",
        variables=(
            _diff("w1", 1, [1.0]),
            _diff("w2", 1, [1.0]),
            _diff("w3", 1, [0.0]),
            _alg("u3", 2.0),
        ),
        equations=(
            Equation("w1", Fraction(1), f"v*{lam!r}*u3 + exp(v) - v*{lam!r}*(exp(v) + exp(-v))"),
            Equation("w2", Fraction(1), f"{lm5!r}*u3 - exp(-v) - {lm5!r}*(exp(v) + exp(-v))"),
            Equation("w3", Fraction(1), "u3"),
        ),
        constraints=("v^2*w1 + w2*sin(v) - v^2*exp(v) - sin(v)*exp(-v)",),
        order=12,
        exact=(
            ("w1", "exp(v)"),
            ("w2", "exp(-v)"),
            ("w3", "exp(v) - exp(-v)"),
            ("u3", "exp(v) + exp(-v)"),
        ),
    )
    vs = _grid(0.0, 1.0)
    refs = (
        _column("w1", "exact", 12, [1.000000000, 1.105170918, 1.221402758, 1.349858807,
                                    1.491824697, 1.648721270, 1.822118800, 2.013752707,
                                    2.225540928, 2.459603111, 2.718281828], vs)
        + (
            ReferenceValue("w1", "relative_error", 6.3e-11, 12, 1.0),
            ReferenceValue("w2", "relative_error", 4.0e-10, 12, 1.0),
            ReferenceValue("w3", "relative_error", 1.3e-10, 12, 1.0),
        )
        + _maxima(
            [(5, [9.9e-03, 1.2e-03, 4.0e-04]),
             (10, [3.0e-07, 2.3e-08, 5.0e-08]),
             (15, [8.1e-13, 7.1e-13, 5.7e-15])],
            ["w1", "w2", "w3"],
        )
    )
    return spec, 12, vs, refs, f"linear-coefficient index-2 system with parameter lambda = {lam:g}"


def _example4():
    spec = ProblemSpec(
        name="example4",
        variables=(_diff("w1", 2, [0.0, 0.0]), _diff("w2", 2, [1.0, 0.0]), _alg("w3", 0.0)),
        equations=(
            Equation("w1", Fraction(2), "2*w2 + w1*w3"),
            Equation("w2", Fraction(2), "-2*w1 + w2*w3"),
        ),
        constraints=("w1^2 + w2^2 - 1",),
        order=20,
        exact=(("w1", "sin(v^2)"), ("w2", "cos(v^2)"), ("w3", "-4*v^2")),
    )
    vs = _grid(0.1, 1.0)
    refs = (
        _column("w1", "exact", 20, [0.009999833, 0.039989334, 0.089878549, 0.159318207,
                                    0.247403959, 0.352274233, 0.470625888, 0.597195441,
                                    0.724287174, 0.841470985], vs)
        + _column("w2", "exact", 20, [0.999950000, 0.999200107, 0.995952733, 0.987227283,
                                      0.968912422, 0.935896824, 0.882332859, 0.802095755,
                                      0.689498433, 0.540302306], vs)
        + (
            ReferenceValue("w1", "approx", 0.841470984, 20, 1.0),
            ReferenceValue("w1", "relative_error", 2.9e-08, 20, 1.0),
            ReferenceValue("w2", "relative_error", 3.8e-09, 20, 1.0),
        )
        + _maxima(
            [(10, [4.4e-05, 3.8e-04, 0.0]),
             (15, [2.7e-06, 2.7e-07, 0.0]),
             (20, [2.4e-08, 2.0e-09, 0.0])],
            ["w1", "w2", "w3"],
        )
    )
    return spec, 20, vs, refs, "index-3 particle on a circular track (mechanical control)"


_EX5_V = _grid(0.1, 1.0)
_EX5_W1 = {
    "exact": [1.221402758, 1.491824698, 1.822118800, 2.225540928, 2.718281828,
              3.320116923, 4.055199967, 4.953032424, 6.049647464, 7.389056099],
    Fraction(1): [1.221402758, 1.491824698, 1.822118800, 2.225540926, 2.718281801,
                  3.320116716, 4.055198820, 4.953027348, 6.049628566, 7.388994709],
    Fraction(9, 10): [1.232592481, 1.522000050, 1.881442677, 2.327166133, 2.879128803,
                      3.561843540, 4.405409180, 5.446773813, 6.731280574, 8.314556977],
    Fraction(4, 5): [1.242818926, 1.550840020, 1.939997843, 2.429996427, 3.045186405,
                     3.815644105, 4.778498484, 5.979561723, 7.475331043, 9.335443038],
    Fraction(7, 10): [1.251760574, 1.577528022, 1.996283505, 2.531647704, 3.212987402,
                      4.076781955, 5.168309651, 6.543727135, 8.272630664, 10.44120618],
}
_EX5_W2 = {
    "exact": [1.105170918, 1.221402758, 1.349858808, 1.491824698, 1.648721271,
              1.822118800, 2.013752707, 2.225540928, 2.459603111, 2.718281828],
    Fraction(1): [1.105170918, 1.221402758, 1.349858808, 1.491824698, 1.648721271,
                  1.822118800, 2.013752707, 2.225540926, 2.459603103, 2.718281801],
    Fraction(9, 10): [1.110221816, 1.233693661, 1.371656910, 1.525505211, 1.696799638,
                      1.887285142, 2.098908983, 2.333842138, 2.594505315, 2.883602243],
    Fraction(4, 5): [1.114817889, 1.245327274, 1.392838054, 1.558844590, 1.745046381,
                     1.953368506, 2.185984441, 2.445345519, 2.734224962, 3.055790657],
    Fraction(7, 10): [1.118821064, 1.255996824, 1.412898962, 1.591115024, 1.792478585,
                      2.019089728, 2.273321617, 2.557801126, 2.875342155, 3.228800260],
}


def _example5(alpha=1, rule="power"):
    a = parse_alpha(alpha)
    spec = ProblemSpec(
        name="example5",
        variables=(
            Variable("w1", "differential", "alpha", (1.0,)),
            _alg("w2", 1.0),
        ),
        equations=(Equation("w1", "alpha", "w2 + 2*exp(2*v) - sqrt(w1)"),),
        constraints=("w1 - w2^2",),
        order=10,
        alpha=a,
        exact=(("w1", "exp(2*v)"), ("w2", "exp(v)")) if a == 1 else (),
        fractional_rule=rule,
    )
    refs = []
    for name, table in (("w1", _EX5_W1), ("w2", _EX5_W2)):
        for key, values in table.items():
            if key == "exact":
                refs.extend(_column(name, "exact", 10, values, _EX5_V, Fraction(1)))
            else:
                refs.extend(_column(name, "approx", 10, values, _EX5_V, key))
    return spec, 10, _EX5_V, tuple(refs), f"fractional index-1 system, alpha = {a} ({rule} rule)"


def get_example(n: int, lam: float = 15.0, alpha=1, rule: str = "power") -> ExampleCase:
    """Built-in example ``n`` (1 to 5).

    ``lam`` is the free parameter of example 3.  ``alpha`` is the fractional
    order of example 5 (``"p/q"`` text, a fraction or a number) and ``rule``
    its fractional transform rule; ``"power"`` reproduces the published
    fractional values, ``"grid"`` is the Caputo-consistent expansion in
    ``v**(1/q)`` (see :class:`~belldae.engine.ProblemSpec`).
    """
    if n == 1:
        parts = _example1()
    elif n == 2:
        parts = _example2()
    elif n == 3:
        parts = _example3(lam)
    elif n == 4:
        parts = _example4()
    elif n == 5:
        parts = _example5(alpha, rule)
    else:
        raise ValueError(f"no built-in example {n!r}; choose one of {EXAMPLE_NUMBERS}")
    spec, order, grid, refs, desc = parts
    return ExampleCase(n, spec, spec.exact_solutions(), order, grid, refs, desc)


# ---------------------------------------------------------------------------
# Self-check of the registered closed forms

_FD_STEP = {1: 1e-4, 2: 2e-3}


def _derivative(f, v, m):
    """``m``-th derivative by central differences with one Richardson step."""
    h = _FD_STEP[m]

    def central(h):
        if m == 1:
            return (f(v + h) - f(v - h)) / (2 * h)
        return (f(v + h) - 2 * f(v) + f(v - h)) / (h * h)

    return (4 * central(h / 2) - central(h)) / 3


def self_check(case: ExampleCase, grid=None) -> dict:
    """Substitute the exact solution into every equation and constraint.

    Returns ``{label: max |residual|}`` plus a ``"max"`` entry.  Equations
    of fractional order are skipped (no closed form is known for them).
    """
    spec = case.spec
    compiled = compile_spec(spec)
    vs = np.linspace(0.0, 0.9, 19) if grid is None else np.asarray(grid, dtype=float)
    exact = case.exact
    values = {name: f(vs) for name, f in exact.items()}
    out = {}
    for name, rule in compiled.rules.items():
        if rule.grid != 1 or name not in exact:
            continue
        m = rule.shift
        lhs = _derivative(exact[name], vs, m)
        try:
            rhs = evaluate_expr(compiled.rhs[name], vs, values)
        except KeyError:
            continue
        out[f"equation {name}"] = float(np.max(np.abs(lhs - rhs)))
    for j, g in enumerate(compiled.constraints):
        try:
            res = evaluate_expr(g, vs, values)
        except KeyError:
            continue
        out[f"constraint {j}"] = float(np.max(np.abs(res)))
    out["max"] = max(out.values(), default=0.0)
    return out


__all__ = ["EXAMPLE_NUMBERS", "ExampleCase", "ReferenceValue", "get_example", "self_check"]
