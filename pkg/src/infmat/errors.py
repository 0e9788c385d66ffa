"""Exception classes shared across the package.

Kept separate from ``ValueError``/``ArithmeticError`` so callers can tell
library verdicts (bad input, failed precondition, non-convergence) apart
from plain Python bugs.
"""


class InfmatError(Exception):
    """Base class for all errors raised by this package."""


class ExtentMismatchError(InfmatError):
    """Operand shapes (finite or infinite extents) are incompatible."""


class PreconditionError(InfmatError):
    """A documented mathematical precondition failed (e.g. a norm bound).

    ``measured`` holds the offending quantity when one was computed.
    """

    def __init__(self, message, measured=None):
        super().__init__(message)
        self.measured = measured


class OracleValueError(InfmatError):
    """An element oracle produced a non-finite value."""

    def __init__(self, message, index=None, value=None):
        super().__init__(message)
        self.index = index
        self.value = value


class SingularSystemError(InfmatError):
    """A square system has (numerically) zero determinant or pivot."""


class DependentRowsError(InfmatError):
    """Rows declared independent produced a zero pivot."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class GramConvergenceError(InfmatError):
    """An inner-product series between two rows failed to converge."""

    def __init__(self, message, pair=None, status=None):
        super().__init__(message)
        self.pair = pair
        self.status = status


class ConvergenceFailureError(InfmatError):
    """A series that must converge for the result to exist hit its cap."""


class CertificateError(InfmatError):
    """A decay certificate is malformed or contradicted by sampled entries."""


class SchemaError(InfmatError):
    """A JSON input file does not match the documented schema."""
