from .fitting import (
    FAMILIES,
    PARAMETER_NAMES,
    SHAPE_STARTS,
    AFTFit,
    AFTLogLikelihood,
    AFTPrediction,
    aft_fit,
    aft_loglik,
    aft_predict,
    numeric_gradient,
    numeric_hessian,
)
from .genf import GFParams, gf_density, gf_hazard, gf_median, gf_quantile, gf_survival
from .gengamma import GGParams, gg_density, gg_hazard, gg_median, gg_quantile, gg_sample, gg_survival

__all__ = [
    'FAMILIES', 'PARAMETER_NAMES', 'SHAPE_STARTS',
    'AFTFit', 'AFTLogLikelihood', 'AFTPrediction', 'aft_fit', 'aft_loglik', 'aft_predict',
    'numeric_gradient', 'numeric_hessian',
    'GFParams', 'gf_density', 'gf_hazard', 'gf_median', 'gf_quantile', 'gf_survival',
    'GGParams', 'gg_density', 'gg_hazard', 'gg_median', 'gg_quantile', 'gg_sample', 'gg_survival',
]
