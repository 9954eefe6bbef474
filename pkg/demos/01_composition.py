"""Taylor coefficients of a composition through partial Bell polynomials.

Run with ``python3 demos/01_composition.py``.
"""

import numpy as np

from belldae.bell import build_bell_table, compose
from belldae.expr import parse
from belldae.series import TruncSeries, dt_exp_forcing
from belldae.transform import transform_series

# Inner series g(v) = ln(1 + v); the outer exp is expanded about g(0) = 0.
n = 8
g = TruncSeries([0.0] + [(-1) ** (k + 1) / k for k in range(1, n + 1)])
table = build_bell_table(g.coeffs[1:])
print("B[4, l] for l = 1..4:", [round(table[4, l], 6) for l in range(1, 5)])

h = compose(dt_exp_forcing(1.0, n), g)
print("exp(ln(1 + v)):", np.round(h.coeffs, 12))

# The expression layer does the same thing lazily, one coefficient at a time.
e = parse("exp(sin(v)) / (2 + v)")
print("exp(sin v) / (2 + v):", np.round(transform_series(e, {}, 6).coeffs, 10))
