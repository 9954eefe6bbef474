"""Pointwise and grid-maximum errors of truncated series against closed forms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .series import TruncSeries, evaluate


def absolute_error(exact, approx: TruncSeries, v):
    """``|exact(v) - approx(v)|``; scalar in, scalar out."""
    err = np.abs(np.asarray(exact(v), dtype=float) - evaluate(approx, v))
    return float(err) if np.ndim(err) == 0 else err


def relative_error(exact, approx: TruncSeries, v):
    """Absolute error divided by ``|exact(v)|``.

    Returns ``None`` where the exact value is zero (for arrays, ``nan``
    marks those points).
    """
    ex = np.asarray(exact(v), dtype=float)
    err = np.abs(ex - evaluate(approx, v))
    if ex.ndim == 0:
        return None if ex == 0 else float(err / abs(ex))
    out = np.full(ex.shape, np.nan)
    nz = ex != 0
    out[nz] = err[nz] / np.abs(ex[nz])
    return out


def max_error(exact, approx: TruncSeries, grid) -> float:
    """Largest absolute error over ``grid``.  Raises ``ValueError`` if empty."""
    grid = np.asarray(list(grid), dtype=float)
    if grid.size == 0:
        raise ValueError("max_error needs a non-empty grid")
    return float(np.max(np.abs(exact(grid) - evaluate(approx, grid))))


@dataclass(frozen=True)
class VariableErrors:
    """Error table of one variable on a grid."""

    name: str
    v: np.ndarray
    exact: np.ndarray
    approx: np.ndarray
    abs_error: np.ndarray
    rel_error: np.ndarray

    @property
    def max_error(self) -> float:
        return float(np.max(self.abs_error))

    def rows(self):
        """``(v, exact, approx, E, R)`` tuples with ``R`` ``None`` where undefined."""
        for i in range(self.v.size):
            r = self.rel_error[i]
            yield (
                float(self.v[i]),
                float(self.exact[i]),
                float(self.approx[i]),
                float(self.abs_error[i]),
                None if np.isnan(r) else float(r),
            )


@dataclass(frozen=True)
class ErrorReport:
    order: int
    grid: np.ndarray
    variables: dict

    def __getitem__(self, name) -> VariableErrors:
        return self.variables[name]

    @property
    def max_errors(self) -> dict:
        return {name: t.max_error for name, t in self.variables.items()}


def error_report(series: dict, exact: dict, grid, order: int | None = None) -> ErrorReport:
    """Error tables for every variable that has both a series and a closed form."""
    grid = np.asarray(list(grid), dtype=float)
    if grid.size == 0:
        raise ValueError("error_report needs a non-empty grid")
    tables = {}
    for name, s in series.items():
        if name not in exact:
            continue
        ex = np.asarray(exact[name](grid), dtype=float) * np.ones_like(grid)
        ap = np.asarray(evaluate(s, grid), dtype=float)
        err = np.abs(ex - ap)
        rel = np.full(grid.shape, np.nan)
        nz = ex != 0
        rel[nz] = err[nz] / np.abs(ex[nz])
        tables[name] = VariableErrors(name, grid, ex, ap, err, rel)
    if order is None:
        order = max((s.order // s.grid_denominator for s in series.values()), default=0)
    return ErrorReport(order, grid, tables)


__all__ = [
    "ErrorReport",
    "VariableErrors",
    "absolute_error",
    "error_report",
    "max_error",
    "relative_error",
]
