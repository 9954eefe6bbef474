"""Exception hierarchy shared by every module of the package."""


class DTMError(Exception):
    """Base class for all errors raised by belldae."""


class SeriesError(DTMError):
    pass


class TruncationError(SeriesError):
    """Requested derivative order exceeds the series truncation order."""


class CompatibilityError(SeriesError):
    """Two series with different origin or grid were combined."""


class SingularDivisionError(SeriesError):
    """Division by a series whose constant term is zero."""


class DomainError(DTMError):
    """A function was expanded about a point outside its domain."""


class ParseError(DTMError):
    """Malformed expression text.  ``offset`` is the byte offset of the fault."""

    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)


class SchemaError(DTMError):
    """A problem description is structurally invalid."""


class PlanningError(DTMError):
    """No admissible recurrence could be built for a problem."""


class NumericError(DTMError):
    """Failure while computing coefficients."""


class ConvergenceError(NumericError):
    def __init__(self, message, order=None, residual=None):
        self.order = order
        self.residual = residual
        super().__init__(message)


class InconsistentInitialDataError(NumericError):
    """Initial data violate a constraint before any algebraic unknown enters it."""


class UnsupportedOrderError(SchemaError):
    """Fractional order that cannot be placed on a rational grid."""
