"""Exceptions and warning categories raised by nphkit."""
from typing import Optional


class NphkitError(Exception):
    pass


class DataError(NphkitError, ValueError):
    """Input data or parameters that cannot be analysed."""


class DegenerateStatisticError(NphkitError):
    """A test statistic has zero variance or no usable event structure."""

    def __init__(self, message: str, component: Optional[str] = None):
        super().__init__(message)
        self.component = component


class ConvergenceError(NphkitError):
    """Raised when a converged fit is required but was not obtained."""


class NotPositiveSemidefiniteError(NphkitError, ValueError):
    pass


class ConvergenceWarning(RuntimeWarning):
    pass


class StatisticalWarning(RuntimeWarning):
    pass
