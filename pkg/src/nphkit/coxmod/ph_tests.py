"""Schoenfeld residuals and the proportional-hazards diagnostics built on them."""
import numpy as np
import pandas as pd
from dataclasses import dataclass
from scipy import stats
from typing import Callable, Dict, List, Union

from ..exceptions import DataError, DegenerateStatisticError
from ..survcore import SurvivalDataset, km_estimate
from .cox import CoxFit


@dataclass(frozen=True, eq=False)
class SchoenfeldResiduals:
    """One row per observed event, in event-time order."""

    time: np.ndarray
    residual: np.ndarray
    scaled: np.ndarray

    def __len__(self) -> int:
        return int(self.time.shape[0])

    def rows(self):
        for t, r, s in zip(self.time, self.residual, self.scaled):
            yield float(t), float(r), float(s)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"time": self.time, "residual": self.residual, "scaled": self.scaled})


@dataclass(frozen=True)
class PHTestResult:
    statistic: float
    df: int
    p: float
    kind: str
    transform: str = "identity"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "transform": self.transform, "statistic": self.statistic, "df": self.df,
                "p_value": self.p}


def schoenfeld_residuals(fit: CoxFit, data: SurvivalDataset) -> SchoenfeldResiduals:
    """r_s = x_s - weighted risk-set mean of the arm indicator at beta-hat.

    Tied events share their risk-set mean (Breslow). Scaled residuals use
    r*_s = beta + d * var(beta) * r_s with d the number of events.
    """
    fit.require_converged()
    data.require_two_arms()

    order = np.argsort(data.time, kind="stable")
    time = data.time[order]
    event = data.event[order]
    arm = data.arm[order].astype(float)

    event_time = time[event]
    event_arm = arm[event]

    sorted_time = time
    weight = np.exp(fit.beta * arm)
    # suffix sums give the risk set {time >= t}
    suffix_w = np.concatenate((np.cumsum(weight[::-1])[::-1], [0.0]))
    suffix_wx = np.concatenate((np.cumsum((weight * arm)[::-1])[::-1], [0.0]))
    first = np.searchsorted(sorted_time, event_time, side="left")
    mean_x = suffix_wx[first] / suffix_w[first]

    residual = event_arm - mean_x
    scaled = fit.beta + fit.n_events * fit.var_beta * residual
    return SchoenfeldResiduals(time=event_time, residual=residual, scaled=scaled)


def _km_transform(data: SurvivalDataset, times: np.ndarray) -> np.ndarray:
    # left-continuous pooled KM, as in the usual cox.zph "km" transform
    return 1.0 - np.atleast_1d(km_estimate(data.pooled()).left_limit(times))


TIME_TRANSFORMS: Dict[str, Callable[[SurvivalDataset, np.ndarray], np.ndarray]] = {
    "km": _km_transform,
    "rank": lambda data, times: stats.rankdata(times),
    "identity": lambda data, times: np.asarray(times, dtype=float),
    "log": lambda data, times: np.log(times),
}


def _transformed_times(data: SurvivalDataset, times: np.ndarray, transform: str) -> np.ndarray:
    if transform not in TIME_TRANSFORMS:
        raise DataError(f"Unknown time transform '{transform}'; choose from {', '.join(TIME_TRANSFORMS)}")
    if transform == "log" and np.any(times <= 0):
        raise DataError("log time transform needs positive event times")
    return TIME_TRANSFORMS[transform](data, times)


def _score_statistic(fit: CoxFit, residuals: SchoenfeldResiduals, g: np.ndarray) -> float:
    if len(residuals) < 2:
        raise DataError("proportional-hazards tests need at least two events")
    centred = g - g.mean()
    spread = float(np.sum(centred ** 2))
    if not spread > 0:
        raise DegenerateStatisticError("all events share one transformed time; the PH test is undefined")
    U = float(np.sum(centred * residuals.residual))
    return fit.n_events * fit.var_beta * U ** 2 / spread


def grambsch_therneau_test(fit: CoxFit, data: SurvivalDataset,
                           transform: str = "km") -> Union[PHTestResult, List[PHTestResult]]:
    """Score test of a zero slope of the scaled residuals against g(t), chi-square on 1 df.

    `transform="all"` returns one result per available transform.
    """
    if transform == "all":
        return [grambsch_therneau_test(fit, data, name) for name in TIME_TRANSFORMS]
    residuals = schoenfeld_residuals(fit, data)
    g = _transformed_times(data, residuals.time, transform)
    statistic = _score_statistic(fit, residuals, g)
    return PHTestResult(statistic=statistic, df=1, p=float(stats.chi2.sf(statistic, 1)),
                        kind="grambsch_therneau", transform=transform)


def schoenfeld_global_test(fit: CoxFit, data: SurvivalDataset, transform: str = "identity") -> PHTestResult:
    """Joint test over all model covariates of residual-time correlation.

    U = sum_s g~_s r_s is a vector over covariates and
    T = U' (d V) U / sum_s g~_s^2 ~ chi-square with one df per covariate.
    The arm indicator is the only covariate, so V is 1x1.
    """
    residuals = schoenfeld_residuals(fit, data)
    g = _transformed_times(data, residuals.time, transform)
    if len(residuals) < 2:
        raise DataError("proportional-hazards tests need at least two events")
    centred = g - g.mean()
    spread = float(np.sum(centred ** 2))
    if not spread > 0:
        raise DegenerateStatisticError("all events share one transformed time; the PH test is undefined")

    R = residuals.residual.reshape(-1, 1)
    V = np.atleast_2d(fit.var_beta)
    U = centred @ R
    statistic = float(U @ (fit.n_events * V) @ U / spread)
    df = V.shape[0]
    return PHTestResult(statistic=statistic, df=df, p=float(stats.chi2.sf(statistic, df)),
                        kind="schoenfeld_global", transform=transform)
