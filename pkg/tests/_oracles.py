"""Independent reference computations for the test suite.

Nothing here uses the transform recurrences: Taylor coefficients come from a
discrete Cauchy integral over complex samples, Bell values from polynomial
powers, and derivatives from finite differences.
"""

import numpy as np

from belldae.expr import (
    Add,
    Const,
    Div,
    Func,
    IndepVar,
    IntPow,
    Mul,
    Sub,
    evaluate_expr,
)
from fractions import Fraction


def cauchy_taylor(f, order, radius=0.5, points=256):
    """Taylor coefficients of an analytic ``f`` about 0 from samples on a circle.

    ``c_k = mean_j f(r e^{i t_j}) e^{-i k t_j} / r^k``; exact up to aliasing
    of coefficient ``k + points``, which is negligible for ``points >> order``.
    """
    t = 2 * np.pi * np.arange(points) / points
    z = radius * np.exp(1j * t)
    vals = np.asarray(f(z), dtype=complex) * np.ones_like(z)
    c = np.fft.fft(vals) / points
    k = np.arange(order + 1)
    return c[: order + 1].real / radius**k, float(np.max(np.abs(vals)))


def poly_power_coeff(x, k, l):
    """Coefficient of ``t**k`` in ``(x1 t + x2 t^2 + ...)**l`` via numpy polynomials."""
    p = np.zeros(k + 1)
    m = min(k, len(x))
    p[1 : m + 1] = x[:m]
    out = np.array([1.0])
    for _ in range(l):
        out = np.polynomial.polynomial.polymul(out, p)[: k + 1]
    return out[k] if k < out.size else 0.0


def random_forcing(rng, depth=3):
    """Random v-only expression tree with analytic pieces."""
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.5:
            return IndepVar("v")
        return Const(round(float(rng.uniform(-2, 2)), 3))
    kind = rng.integers(0, 11)
    a = random_forcing(rng, depth - 1)
    if kind == 0:
        return Add(a, random_forcing(rng, depth - 1))
    if kind == 1:
        return Sub(a, random_forcing(rng, depth - 1))
    if kind == 2:
        return Mul(a, random_forcing(rng, depth - 1))
    if kind == 3:
        return Div(a, Add(Const(2.0), random_forcing(rng, depth - 1)))
    if kind == 4:
        return IntPow(a, int(rng.integers(0, 4)))
    if kind == 5:
        return Func("exp", a)
    if kind == 6:
        return Func("sin", a)
    if kind == 7:
        return Func("cos", a)
    if kind == 8:
        return Func("ln", Add(Const(2.0), a))
    if kind == 9:
        return Func("sqrt", Add(Const(2.0), a))
    return Func("powr", Add(Const(2.0), a), Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4))))


def analytic_on_disc(e, radius=0.5, points=256, margin=0.1):
    """True if every ln/sqrt/powr argument and divisor keeps Re > margin on the circle.

    By the minimum principle for harmonic functions this holds on the whole
    disc, so the principal branches are analytic there.
    """
    t = 2 * np.pi * np.arange(points) / points
    z = radius * np.exp(1j * t)
    stack = [e]
    while stack:
        node = stack.pop()
        check = None
        if isinstance(node, Func) and node.kind in ("ln", "sqrt", "powr"):
            check = node.arg
        elif isinstance(node, Div):
            check = node.right
        if check is not None:
            val = np.asarray(evaluate_expr(check, z), dtype=complex) * np.ones_like(z)
            if not np.all(val.real > margin):
                return False
        for attr in ("left", "right", "base", "arg"):
            child = getattr(node, attr, None)
            if child is not None:
                stack.append(child)
    vals = np.asarray(evaluate_expr(e, z), dtype=complex)
    return bool(np.all(np.isfinite(vals)) and np.max(np.abs(vals)) < 1e6)


def central_derivative(f, v, m, h):
    """``m``-th derivative (m = 1, 2) by central differences plus one Richardson step."""

    def d(h):
        if m == 1:
            return (f(v + h) - f(v - h)) / (2 * h)
        return (f(v + h) - 2 * f(v) + f(v - h)) / (h * h)

    return (4 * d(h / 2) - d(h)) / 3


def assert_taylor_close(got, ref, scale, rtol=1e-7, radius=0.5, floor=1e-13):
    """Compare against :func:`cauchy_taylor` output.

    The oracle's roundoff on coefficient ``k`` is about ``eps * scale / radius**k``,
    so the absolute floor grows with ``k`` the same way.
    """
    got, ref = np.asarray(got), np.asarray(ref)
    atol = floor * scale / radius ** np.arange(ref.size)
    bad = np.abs(got - ref) > rtol * np.abs(ref) + atol
    assert not bad.any(), f"coefficients {np.flatnonzero(bad).tolist()} differ: {got[bad]} vs {ref[bad]}"
