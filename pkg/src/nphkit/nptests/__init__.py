from .logrank import WLRResult, score_terms, two_sided_p, weighted_logrank
from .maxcombo import MaxComboResult, maxcombo
from .mvn import mvn_box_probability
from .weights import EARLY, LATE, LOGRANK, MAXCOMBO_WEIGHTS, MIDDLE, FHWeight, fh_weight_values

__all__ = [
    'FHWeight', 'fh_weight_values', 'LOGRANK', 'EARLY', 'LATE', 'MIDDLE', 'MAXCOMBO_WEIGHTS',
    'WLRResult', 'weighted_logrank', 'score_terms', 'two_sided_p',
    'MaxComboResult', 'maxcombo',
    'mvn_box_probability',
]
