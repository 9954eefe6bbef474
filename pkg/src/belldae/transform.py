"""Order-by-order differential transform of expression trees.

Nonlinear function nodes are handled only through the composition rule
``H(k) = sum_l F(l) B[k, l](G(1), ...)`` with Bell rows appended as inner
coefficients become known; no symbolic derivative is ever formed.

:class:`Evaluator` is lazy: ``coef(node, k)`` computes exactly the
coefficients it needs and memoises them.  Variable coefficients come from a
caller-supplied ``source(name, k)``, which may raise :class:`Pending` when a
coefficient is not known yet.  Products skip terms whose other factor is an
exact zero, so structurally vanishing contributions never force an unknown.
"""

from __future__ import annotations

import math
from collections import ChainMap
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bell import bell_row
from .errors import DomainError, NumericError, SingularDivisionError
from .expr import Add, Const, Div, Expr, Func, IndepVar, IntPow, Mul, StateRef, Sub, children
from .series import TruncSeries


class Pending(Exception):
    """A coefficient was requested before it is known."""

    def __init__(self, name, k):
        self.name = name
        self.k = k
        super().__init__(f"coefficient {k} of {name!r} is not known yet")


@dataclass
class OuterTransform:
    """Transform ``F(l)`` of an outer function expanded about ``center``."""

    kind: str
    center: float
    exponent: Fraction | None = None
    _cache: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        c = self.center
        if self.kind == "ln" and not c > 0:
            raise DomainError(f"ln expanded about non-positive centre {c}")
        if self.kind in ("sqrt", "powr") and not c > 0:
            raise DomainError(f"{self.kind} expanded about non-positive centre {c}")
        if self.kind == "sqrt":
            self.exponent = Fraction(1, 2)

    def coefficient(self, l: int) -> float:
        cache = self._cache
        while len(cache) <= l:
            cache.append(self._next(len(cache)))
        return cache[l]

    def coefficients(self, n: int) -> np.ndarray:
        return np.array([self.coefficient(l) for l in range(n + 1)])

    def _next(self, l: int) -> float:
        c = self.center
        kind = self.kind
        if kind == "exp":
            try:
                val = math.exp(c) if l == 0 else self._cache[l - 1] / l
            except OverflowError:
                val = math.inf
        elif kind == "ln":
            val = math.log(c) if l == 0 else (-1.0) ** (l + 1) / (l * c**l)
        elif kind in ("sin", "cos"):
            s, co = math.sin(c), math.cos(c)
            cycle = (s, co, -s, -co) if kind == "sin" else (co, -s, -co, s)
            val = cycle[l % 4] / math.factorial(l)
        else:
            r = float(self.exponent)
            val = c**r if l == 0 else self._cache[l - 1] * (r - l + 1) / (l * c)
        if not math.isfinite(val):
            raise NumericError(
                f"outer coefficient F({l}) of {kind} about {c} is not finite; "
                "the solution has likely left the function's domain of analyticity"
            )
        return val


def lower(e: Expr, _memo=None) -> Expr:
    """Rewrite integer powers as shared product chains (binary exponentiation)."""
    memo = {} if _memo is None else _memo
    key = id(e)
    if key in memo:
        return memo[key]
    if isinstance(e, IntPow):
        base = lower(e.base, memo)
        out, sq, n = None, base, e.n
        if n == 0:
            out = Const(1.0)
        while n:
            if n & 1:
                out = sq if out is None else Mul(out, sq)
            n >>= 1
            if n:
                sq = Mul(sq, sq)
    elif isinstance(e, (Add, Sub, Mul, Div)):
        left, right = lower(e.left, memo), lower(e.right, memo)
        out = e if (left is e.left and right is e.right) else type(e)(left, right)
    elif isinstance(e, Func):
        arg = lower(e.arg, memo)
        out = e if arg is e.arg else Func(e.kind, arg, e.exponent)
    else:
        out = e
    memo[key] = out
    return out


class Evaluator:
    """Memoised order-``k`` coefficients of expression trees.

    Parameters
    ----------
    source : callable
        ``source(name, k)`` returns coefficient ``k`` of state ``name``.
    q : int
        Grid denominator; the independent variable sits at grid index ``q``.
    origin : float
        Expansion point.
    """

    def __init__(self, source, q: int = 1, origin: float = 0.0):
        self.source = source
        self.q = int(q)
        self.origin = float(origin)
        self._base = {}
        self.memo = self._base
        self._lowered = {}
        self._keep = []

    # -- trial layering --------------------------------------------------
    def begin(self):
        """Start a scratch layer; writes go there until commit/rollback."""
        self.memo = ChainMap({}, self._base)

    def rollback(self):
        self.memo = self._base

    def commit(self):
        if self.memo is not self._base:
            self._base.update(self.memo.maps[0])
        self.memo = self._base

    # -- public ----------------------------------------------------------
    def prepare(self, e: Expr) -> Expr:
        key = id(e)
        if key not in self._lowered:
            self._keep.append(e)
            self._lowered[key] = lower(e)
        return self._lowered[key]

    def coef(self, e: Expr, k: int) -> float:
        return self._coef(self.prepare(e), k)

    def series(self, e: Expr, order: int) -> np.ndarray:
        node = self.prepare(e)
        return np.array([self._coef(node, k) for k in range(order + 1)])

    # -- recurrences -----------------------------------------------------
    def _coef(self, node, k):
        key = (id(node), k)
        memo = self.memo
        if key in memo:
            return memo[key]
        val = self._compute(node, k)
        memo[key] = val
        return val

    def _compute(self, node, k):
        if isinstance(node, Const):
            return float(node.value) if k == 0 else 0.0
        if isinstance(node, IndepVar):
            if k == 0:
                return self.origin
            return 1.0 if k == self.q else 0.0
        if isinstance(node, StateRef):
            return float(self.source(node.name, k))
        if isinstance(node, Add):
            return self._coef(node.left, k) + self._coef(node.right, k)
        if isinstance(node, Sub):
            return self._coef(node.left, k) - self._coef(node.right, k)
        if isinstance(node, Mul):
            return self._product(node.left, node.right, k)
        if isinstance(node, Div):
            return self._quotient(node, k)
        if isinstance(node, Func):
            return self._compose(node, k)
        raise TypeError(f"cannot transform {node!r}")

    def _product(self, a, b, k):
        total = 0.0
        coef = self._coef
        for i in range(k + 1):
            try:
                x = coef(a, i)
            except Pending:
                if coef(b, k - i) == 0.0:
                    continue
                raise
            if x == 0.0:
                continue
            total += x * coef(b, k - i)
        return total

    def _quotient(self, node, k):
        b0 = self._coef(node.right, 0)
        if b0 == 0.0:
            raise SingularDivisionError("denominator has zero constant term")
        acc = self._coef(node.left, k)
        for i in range(k):
            bj = self._coef(node.right, k - i)
            if bj == 0.0:
                continue
            acc -= self._coef(node, i) * bj
        return acc / b0

    def _outer(self, node):
        key = (id(node), "F")
        memo = self.memo
        if key not in memo:
            memo[key] = OuterTransform(node.kind, self._coef(node.arg, 0), node.exponent)
        return memo[key]

    def _bell_high(self, node, k):
        """Row ``k`` of the Bell table of ``node.arg`` without its ``x_k`` entry."""
        key = (id(node), "B", k)
        memo = self.memo
        if key in memo:
            return memo[key]
        rows = [self._bell_full(node, j) for j in range(k)]
        x = [self._coef(node.arg, i) for i in range(1, k)]
        row = bell_row(rows, x)
        memo[key] = row
        return row

    def _bell_full(self, node, j):
        row = self._bell_high(node, j)
        if j == 0:
            return row
        row = row.copy()
        row[1] = self._coef(node.arg, j)
        return row

    def _compose(self, node, k):
        outer = self._outer(node)
        if k == 0:
            return outer.coefficient(0)
        hi = self._bell_high(node, k)
        total = 0.0
        f1 = outer.coefficient(1)
        if f1 != 0.0:
            total += f1 * self._coef(node.arg, k)
        for l in range(2, k + 1):
            b = hi[l]
            if b != 0.0:
                total += outer.coefficient(l) * b
        return total


def transform_expr(e: Expr, env, k: int, q: int = 1, origin: float = 0.0) -> float:
    """Coefficient ``k`` of the transform of ``e``.

    ``env`` maps state names to :class:`TruncSeries` (or coefficient arrays).
    """

    def source(name, j):
        s = env[name]
        c = s.coeffs if isinstance(s, TruncSeries) else s
        if j >= len(c):
            raise Pending(name, j)
        return c[j]

    return Evaluator(source, q, origin).coef(e, k)


def transform_series(e: Expr, env, order: int, q: int = 1, origin: float = 0.0) -> TruncSeries:
    """Coefficients ``0 .. order`` of the transform of ``e`` as a series."""

    def source(name, j):
        s = env[name]
        c = s.coeffs if isinstance(s, TruncSeries) else s
        if j >= len(c):
            raise Pending(name, j)
        return c[j]

    ev = Evaluator(source, q, origin)
    return TruncSeries(ev.series(e, order), origin, q)


def dependency_profile(e: Expr, k: int) -> dict[str, int]:
    """Upper bound on the coefficient index of each state read at order ``k``.

    Every node that depends on a state reads that state's coefficients
    ``0 .. k`` at most: sums pass the order through, products and quotients
    convolve up to ``k``, compositions read the centre and ``1 .. k``.
    """
    out = {}
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, StateRef):
            out[node.name] = k
        stack.extend(children(node))
    return out
