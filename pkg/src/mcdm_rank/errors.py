"""Exception hierarchy shared by every module.

The CLI maps ``ValidationError`` to exit code 1 and ``ComputationError`` to
exit code 2.
"""


class MCDMError(Exception):
    """Base class for all package errors."""


class ValidationError(MCDMError, ValueError):
    """Bad input data, configuration, or call arguments."""


class ComputationError(MCDMError, ArithmeticError):
    """A numerical procedure could not produce a defined result."""


class DegenerateProblemError(ComputationError):
    """Every candidate is identical, so closeness is 0/0."""


class ConvergenceError(ComputationError):
    """Power iteration hit its iteration cap."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual
