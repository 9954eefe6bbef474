"""Describe a new DAE in JSON and solve it.

With the constraint y = x^2 the equation x' = -x + y reduces to
x' = x^2 - x, whose solution from x(0) = 1/2 is x = 1 / (1 + e^v).
The optional ``exact`` block lets the error report compare against it.
"""

from belldae.engine import solve, spec_from_dict
from belldae.metrics import error_report

problem = {
    "name": "logistic-dae",
    "order": 16,
    "variables": [
        {"id": "x", "kind": "differential", "deriv_order": 1, "initial": [0.5]},
        {"id": "y", "kind": "algebraic"},
    ],
    "equations": [{"lhs": {"var": "x", "order": 1}, "rhs": "-x + y"}],
    "constraints": ["y - x^2"],
    "exact": {"x": "1/(1 + exp(v))", "y": "1/(1 + exp(v))^2"},
}
spec = spec_from_dict(problem)
report = solve(spec)
errors = error_report(report.series, spec.exact_solutions(), [0.2, 0.5, 1.0])
for name, table in errors.variables.items():
    for v, ex, ap, e, _ in table.rows():
        print(f"{name}({v}) exact {ex:.12f} series {ap:.12f} error {e:.1e}")
