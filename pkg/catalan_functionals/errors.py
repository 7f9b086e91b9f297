"""Exception hierarchy.

Two families matter to callers: usage errors (bad arguments, exit 2 on the
command line) and numeric errors (field, pole, divergence and convergence
failures, exit 3).
"""


class CatalanFunctionalError(Exception):
    """Root of every error raised by this package."""


class ArgumentError(CatalanFunctionalError, ValueError):
    """An argument is outside the documented domain."""


class OracleSizeError(ArgumentError):
    """Brute-force enumeration requested above the configured bound."""


class OrderError(ArgumentError):
    """A moment order is too small for the requested quantity."""


class CapError(ArgumentError):
    """A size or order exceeds a configured cap."""


class NumericError(CatalanFunctionalError, ArithmeticError):
    """Base for failures of the numerical machinery."""


class FieldError(NumericError):
    """The requested numeric field cannot represent the toll exactly."""


class PoleError(NumericError):
    """A formula was evaluated at a pole (alpha = 1/2 for the Gamma normalisation)."""


class DivergenceError(NumericError):
    """A series constant was requested for a toll whose series diverges."""


class DomainError(NumericError):
    """Parameter outside the domain where an expansion holds."""


class ConvergenceError(NumericError):
    """A tolerance could not be reached within the allowed work."""
