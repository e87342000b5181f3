from .cox import CoxFit, CoxPrediction, cox_fit, cox_predict
from .ph_tests import (
    PHTestResult,
    SchoenfeldResiduals,
    TIME_TRANSFORMS,
    grambsch_therneau_test,
    schoenfeld_global_test,
    schoenfeld_residuals,
)

__all__ = ['CoxFit', 'CoxPrediction', 'cox_fit', 'cox_predict', 'PHTestResult', 'SchoenfeldResiduals',
           'TIME_TRANSFORMS', 'grambsch_therneau_test', 'schoenfeld_global_test', 'schoenfeld_residuals']
