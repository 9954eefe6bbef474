"""Truncated power series and the elementary differential-transform rules.

A :class:`TruncSeries` stores the transformed coefficients ``W(k)`` of a
function about an expansion point ``origin``.  Coefficient ``k`` multiplies
``(v - origin)**(k / q)`` where ``q`` is the grid denominator; ``q == 1`` is
the classical Taylor/differential transform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CompatibilityError, DomainError, SingularDivisionError, TruncationError


@dataclass(frozen=True, eq=False)
class TruncSeries:
    coeffs: np.ndarray
    origin: float = 0.0
    grid_denominator: int = 1

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).ravel()
        if c.size == 0:
            raise ValueError("a series needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise ValueError("series coefficients must be finite")
        if int(self.grid_denominator) < 1:
            raise ValueError("grid_denominator must be >= 1")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "origin", float(self.origin))
        object.__setattr__(self, "grid_denominator", int(self.grid_denominator))

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def __len__(self):
        return self.coeffs.size

    def __getitem__(self, k):
        return self.coeffs[k]

    def __repr__(self):
        grid = f", q={self.grid_denominator}" if self.grid_denominator != 1 else ""
        origin = f", origin={self.origin}" if self.origin else ""
        return f"TruncSeries({self.coeffs.tolist()}{origin}{grid})"

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (
            self.origin == other.origin
            and self.grid_denominator == other.grid_denominator
            and np.array_equal(self.coeffs, other.coeffs)
        )

    __hash__ = None

    def like(self, coeffs) -> TruncSeries:
        """New series on the same origin and grid."""
        return TruncSeries(coeffs, self.origin, self.grid_denominator)

    def truncate(self, order: int) -> TruncSeries:
        return self.like(self.coeffs[: order + 1])

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            return cauchy_product(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return scale(self, -1.0)

    def __truediv__(self, other):
        return divide(self, other)

    def __call__(self, v):
        return evaluate(self, v)


def _check_compatible(a: TruncSeries, b: TruncSeries) -> int:
    if a.origin != b.origin or a.grid_denominator != b.grid_denominator:
        raise CompatibilityError(
            f"cannot combine series about {a.origin} (q={a.grid_denominator}) "
            f"with series about {b.origin} (q={b.grid_denominator})"
        )
    return min(a.order, b.order)


def dt_derivative(s: TruncSeries, n: int = 1) -> TruncSeries:
    """Transform of the ``n``-th derivative: ``(k+1)...(k+n) W(k+n)``."""
    if s.grid_denominator != 1:
        raise CompatibilityError("dt_derivative needs an integer grid (q == 1)")
    if n < 1:
        raise ValueError("derivative order must be positive")
    if n > s.order:
        raise TruncationError(f"derivative of order {n} exceeds series order {s.order}")
    k = np.arange(s.order - n + 1)
    factor = np.ones(k.size)
    for j in range(1, n + 1):
        factor *= k + j
    return s.like(factor * s.coeffs[n:])


def dt_monomial(n: int, order: int, origin: float = 0.0) -> TruncSeries:
    """Transform of ``(v - origin)**n``, i.e. the Kronecker delta at ``n``."""
    c = np.zeros(order + 1)
    if 0 <= n <= order:
        c[n] = 1.0
    return TruncSeries(c, origin)


def dt_exp_forcing(alpha: float, order: int, origin: float = 0.0) -> TruncSeries:
    """Transform of ``exp(alpha * (v - origin))``: ``alpha**k / k!``."""
    c = np.empty(order + 1)
    term = 1.0
    for k in range(order + 1):
        c[k] = term
        term *= alpha / (k + 1)
    return TruncSeries(c, origin)


def dt_constant(value: float, order: int, origin: float = 0.0, q: int = 1) -> TruncSeries:
    c = np.zeros(order + 1)
    c[0] = value
    return TruncSeries(c, origin, q)


def cauchy_product(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """Transform of a product; the result is clamped to the shorter order."""
    n = _check_compatible(a, b)
    return a.like(np.convolve(a.coeffs[: n + 1], b.coeffs[: n + 1])[: n + 1])


def add(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    n = _check_compatible(a, b)
    return a.like(a.coeffs[: n + 1] + b.coeffs[: n + 1])


def sub(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    n = _check_compatible(a, b)
    return a.like(a.coeffs[: n + 1] - b.coeffs[: n + 1])


def scale(a: TruncSeries, c: float) -> TruncSeries:
    return a.like(a.coeffs * float(c))


def divide(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """Series quotient ``a / b`` by forward substitution.

    Raises :class:`SingularDivisionError` when ``b`` has a zero constant term.
    """
    n = _check_compatible(a, b)
    b0 = b.coeffs[0]
    if b0 == 0.0:
        raise SingularDivisionError("denominator series has zero constant term")
    out = np.zeros(n + 1)
    bc = b.coeffs
    for k in range(n + 1):
        acc = a.coeffs[k]
        if k:
            acc -= np.dot(out[:k], bc[k:0:-1])
        out[k] = acc / b0
    return a.like(out)


def evaluate(s: TruncSeries, v) -> float:
    """Inverse transform truncated at ``s.order``, evaluated by Horner's rule.

    Horner runs in ``u = (v - origin)**(1/q)``.  For ``q > 1`` the point must
    satisfy ``v >= origin``.  Accepts scalars or arrays.
    """
    v = np.asarray(v, dtype=float)
    h = v - s.origin
    q = s.grid_denominator
    if q == 1:
        u = h
    else:
        if np.any(h < 0):
            raise DomainError("fractional-grid series can only be evaluated at v >= origin")
        u = h ** (1.0 / q)
    acc = np.zeros_like(u)
    for c in s.coeffs[::-1]:
        acc = acc * u + c
    return float(acc) if acc.ndim == 0 else acc

