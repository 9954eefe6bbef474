"""Differential transform solver for nonlinear and fractional DAE systems.

Nonlinear terms are transformed with partial ordinary Bell polynomials
(Faa di Bruno composition), so no symbolic differentiation is needed.
"""

from .bell import BellTable, bell_oracle, bell_row, build_bell_table, compose
from .engine import (
    ProblemSpec,
    RecurrencePlan,
    SolveReport,
    dump_spec,
    load_spec,
    plan,
    solve,
    solve_fractional,
    spec_from_dict,
    spec_to_dict,
    verify_constraints,
)
from .errors import (
    CompatibilityError,
    ConvergenceError,
    DomainError,
    DTMError,
    InconsistentInitialDataError,
    NumericError,
    ParseError,
    PlanningError,
    SchemaError,
    SingularDivisionError,
    TruncationError,
    UnsupportedOrderError,
)
from .expr import evaluate_expr, parse, pretty_print
from .metrics import absolute_error, error_report, max_error, relative_error
from .problems import get_example, self_check
from .series import (
    TruncSeries,
    cauchy_product,
    divide,
    dt_derivative,
    dt_exp_forcing,
    dt_monomial,
    evaluate,
)
from .transform import transform_expr, transform_series

__version__ = "0.1.0"
