from .dataset import SurvivalDataset, read_ipd_csv
from .event_table import EventTable, build_event_table, risk_set_counts
from .kaplan_meier import KMCurve, km_estimate, km_from_counts
from .piecewise import PiecewiseExpSpec, pwexp_quantile, pwexp_rmst, pwexp_survival

__all__ = [
    'SurvivalDataset', 'read_ipd_csv',
    'EventTable', 'build_event_table', 'risk_set_counts',
    'KMCurve', 'km_estimate', 'km_from_counts',
    'PiecewiseExpSpec', 'pwexp_survival', 'pwexp_rmst', 'pwexp_quantile',
]
