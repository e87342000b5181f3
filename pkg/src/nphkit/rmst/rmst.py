import numpy as np
from dataclasses import dataclass
from typing import Optional, Tuple

from ..exceptions import DataError, DegenerateStatisticError
from ..nptests import two_sided_p
from ..survcore import KMCurve, SurvivalDataset, km_estimate


@dataclass(frozen=True)
class RMSTResult:
    t_star: float
    mu0: float
    mu1: float
    delta: float
    se_delta: float
    Z: float
    p_two_sided: float
    var0: float = 0.0
    var1: float = 0.0
    t_star_rule: str = "event"

    def to_dict(self) -> dict:
        return {"t_star": self.t_star, "t_star_rule": self.t_star_rule, "rmst0": self.mu0, "rmst1": self.mu1,
                "delta": self.delta, "se": self.se_delta, "Z": self.Z, "p_value": self.p_two_sided}


def _area_and_variance(curve: KMCurve, t_star: float) -> Tuple[float, float]:
    mu = curve.area(t_star)
    inside = curve.time <= t_star
    times = curve.time[inside]
    if times.size == 0:
        return mu, 0.0

    # A(t_s): area under the curve between t_s and t_star
    left = np.concatenate(([0.0], times))
    heights = np.concatenate(([1.0], curve.survival[inside]))
    tail = mu - np.cumsum(heights[:-1] * np.diff(left))
    y = curve.at_risk[inside].astype(float)
    d = curve.events[inside].astype(float)
    # a row where everyone at risk fails adds nothing (Greenwood term undefined)
    greenwood = np.divide(d, y * (y - d), out=np.zeros_like(y), where=y > d)
    return mu, float(np.sum(tail ** 2 * greenwood))


def rmst_estimate(data: SurvivalDataset, t_star: float) -> Tuple[float, float]:
    """Restricted mean survival time up to `t_star` and its plug-in variance.

    `data` is treated as one sample; pass `data.arm_subset(k)` for one arm.
    """
    if not t_star > 0:
        raise DataError("t_star must be positive")
    if len(data) == 0:
        raise DataError("cannot estimate RMST from an empty arm")
    return _area_and_variance(km_estimate(data.pooled()), t_star)


def select_t_star(data: SurvivalDataset, rule: str = "event") -> float:
    """Earlier of the two arms' largest event times.

    `rule="followup"` uses each arm's largest observed time instead.
    """
    data.require_two_arms()
    maxima = []
    for arm in (0, 1):
        mask = data.arm == arm
        if rule == "event":
            times = data.time[mask & data.event]
            if times.size == 0:
                raise DataError(f"arm {arm} has no events; t* is undefined")
        elif rule == "followup":
            times = data.time[mask]
        else:
            raise DataError(f"Unknown t* rule '{rule}'")
        maxima.append(float(times.max()))
    return min(maxima)


def rmst_difference_test(data: SurvivalDataset, t_star: Optional[float] = None, rule: str = "event") -> RMSTResult:
    """Z test of RMST(arm 1) - RMST(arm 0) at the truncation time t*."""
    data.require_two_arms()
    used_rule = rule
    if t_star is None:
        t_star = select_t_star(data, rule=rule)
    elif not t_star > 0:
        raise DataError("t_star must be positive")
    else:
        used_rule = "fixed"

    mu0, var0 = rmst_estimate(data.arm_subset(0), t_star)
    mu1, var1 = rmst_estimate(data.arm_subset(1), t_star)
    delta = mu1 - mu0
    se = float(np.sqrt(var0 + var1))
    if not se > 0:
        raise DegenerateStatisticError("RMST difference has zero variance", component="rmst_diff")
    Z = delta / se
    return RMSTResult(t_star=float(t_star), mu0=mu0, mu1=mu1, delta=delta, se_delta=se, Z=Z,
                      p_two_sided=two_sided_p(Z), var0=var0, var1=var1,
                      t_star_rule=used_rule)
