"""Treatment-effect testing and estimation for survival data under non-proportional hazards."""
from .exceptions import (
    ConvergenceError,
    ConvergenceWarning,
    DataError,
    DegenerateStatisticError,
    NotPositiveSemidefiniteError,
    NphkitError,
    StatisticalWarning,
)
from .survcore import SurvivalDataset, km_estimate, read_ipd_csv

__version__ = '0.1.0'

__all__ = [
    'NphkitError', 'DataError', 'DegenerateStatisticError', 'ConvergenceError', 'NotPositiveSemidefiniteError',
    'ConvergenceWarning', 'StatisticalWarning',
    'SurvivalDataset', 'km_estimate', 'read_ipd_csv',
]
