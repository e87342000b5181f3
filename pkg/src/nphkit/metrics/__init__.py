from .bias import BiasGrid, ModelBias, TrueTheta, bias_curves, true_theta
from .power import PowerEstimate, power_summary
from .report import TIDY_COLUMNS, ScenarioReport, build_report

__all__ = [
    'BiasGrid', 'ModelBias', 'TrueTheta', 'bias_curves', 'true_theta',
    'PowerEstimate', 'power_summary',
    'TIDY_COLUMNS', 'ScenarioReport', 'build_report',
]
