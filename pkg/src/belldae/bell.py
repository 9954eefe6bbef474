"""Partial ordinary Bell polynomials and composition of transformed series.

``B[k, l]`` is the coefficient of ``t**k`` in ``(x1*t + x2*t**2 + ...)**l``.
Rows are produced by the backward-looking recurrence

    B[k, l] = sum_{i=1}^{k-l+1} (i*l/k) * x_i * B[k-i, l-1],

seeded with ``B[0, 0] = 1`` and ``B[k, 0] = 0`` for ``k >= 1``, so a table can
be grown one row at a time as new inner coefficients become known.
"""

from __future__ import annotations

import numpy as np

from .series import TruncSeries, cauchy_product


def bell_row(rows, x):
    """Row ``k = len(rows)`` of the Bell table.

    Parameters
    ----------
    rows : sequence of 1-D arrays
        Completed rows ``0 .. k-1``; row ``j`` has ``j + 1`` entries.
    x : sequence of float
        ``x[i-1]`` is ``x_i``.  Entries up to ``x_{k-1}`` are required.  If
        ``x_k`` is absent the entry ``B[k, 1]`` (which equals ``x_k``) is left
        at zero so the caller can add it once it is known.
    """
    k = len(rows)
    row = np.zeros(k + 1)
    if k == 0:
        row[0] = 1.0
        return row
    if len(x) >= k:
        row[1] = x[k - 1]
    if k >= 2:
        prev = np.zeros((k - 1, k))
        for i in range(1, k):
            r = rows[k - i]
            prev[i - 1, : r.size] = r
        weights = np.arange(1, k) * np.asarray(x[: k - 1], dtype=float)
        row[2:] = (np.arange(2, k + 1) / k) * (weights @ prev)[1:]
    return row


class BellTable:
    """Triangular table of ``B[k, l]`` evaluated on a concrete sequence.

    Completed rows are never modified; :meth:`extend` appends the next row
    when the next inner coefficient is learned.
    """

    def __init__(self, x=()):
        self._x = []
        self._rows = [bell_row([], [])]
        for xi in x:
            self.extend(xi)

    def extend(self, x_next: float) -> np.ndarray:
        self._x.append(float(x_next))
        row = bell_row(self._rows, self._x)
        row.flags.writeable = False
        self._rows.append(row)
        return row

    @property
    def order(self) -> int:
        return len(self._rows) - 1

    @property
    def source(self) -> np.ndarray:
        return np.array(self._x)

    def row(self, k: int) -> np.ndarray:
        return self._rows[k]

    @property
    def values(self) -> np.ndarray:
        n = self.order
        out = np.zeros((n + 1, n + 1))
        for k, r in enumerate(self._rows):
            out[k, : k + 1] = r
        return out

    def __getitem__(self, kl):
        k, l = kl
        if l > k:
            return 0.0
        return float(self._rows[k][l])


def build_bell_table(x) -> BellTable:
    """Bell table for ``x = (x_1, ..., x_N)``; rows ``0 .. N``."""
    return BellTable(x)


def bell_oracle(x, k: int, l: int) -> float:
    """``B[k, l]`` straight from the generating function, by repeated products.

    Independent of :func:`bell_row`; meant as a brute-force check.
    """
    g = np.zeros(k + 1)
    m = min(k, len(x))
    g[1 : m + 1] = np.asarray(x, dtype=float)[:m]
    inner = TruncSeries(g)
    power = TruncSeries(np.eye(1, k + 1)[0])
    for _ in range(l):
        power = cauchy_product(power, inner)
    return float(power.coeffs[k])


def compose(F: TruncSeries, G: TruncSeries) -> TruncSeries:
    """Transform of ``f(g(v))`` from ``F`` (``f`` about ``g(v0)``) and ``G``.

    ``H(0) = F(0)`` and ``H(k) = sum_{l=1}^{k} F(l) * B[k, l](G(1), ..., G(k-l+1))``.
    ``F`` must be expanded about ``G(0)``; that is the caller's job.
    """
    n = G.order
    if F.order < n:
        raise ValueError(f"outer series order {F.order} is below inner order {n}")
    table = build_bell_table(G.coeffs[1:])
    h = np.empty(n + 1)
    h[0] = F.coeffs[0]
    for k in range(1, n + 1):
        h[k] = np.dot(F.coeffs[1 : k + 1], table.row(k)[1:])
    return G.like(h)
