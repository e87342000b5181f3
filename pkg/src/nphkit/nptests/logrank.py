import numpy as np
from dataclasses import dataclass
from scipy import stats
from typing import Sequence, Tuple

from ..exceptions import DataError, DegenerateStatisticError
from ..survcore import EventTable, SurvivalDataset, build_event_table, km_from_counts
from .weights import LOGRANK, FHWeight, fh_weight_values


@dataclass(frozen=True)
class WLRResult:
    U: float
    se: float
    Z: float
    p_two_sided: float
    weight: FHWeight = LOGRANK

    def to_dict(self) -> dict:
        return {"weight": self.weight.label, "U": self.U, "se": self.se, "Z": self.Z, "p_value": self.p_two_sided}


def two_sided_p(z: float) -> float:
    return float(2.0 * stats.norm.sf(abs(z)))


def score_terms(table: EventTable) -> Tuple[np.ndarray, np.ndarray]:
    """Per-row observed-minus-expected events in arm 1 and the hypergeometric variance.

    Rows with a single subject at risk carry no variance.
    """
    at_risk = table.at_risk.astype(float)
    events = table.events.astype(float)
    y0 = table.at_risk0.astype(float)
    y1 = table.at_risk1.astype(float)

    observed_minus_expected = table.events1 - y1 / at_risk * events
    ties = np.divide(at_risk - events, at_risk - 1.0, out=np.zeros_like(at_risk), where=at_risk > 1)
    variance = (y1 * y0 / at_risk ** 2) * ties * events
    return observed_minus_expected, variance


def component_weights(table: EventTable, weights: Sequence[FHWeight], left_limit: bool = True) -> np.ndarray:
    """Weight matrix, one row per weight function, from the pooled KM curve."""
    pooled = km_from_counts(table.time, table.at_risk, table.events)
    return np.vstack([fh_weight_values(pooled, table.time, w, left_limit=left_limit) for w in weights])


def _check_table(data: SurvivalDataset) -> EventTable:
    table = build_event_table(data)
    if len(table) == 0:
        raise DataError("no events observed; the log-rank statistic is undefined")
    return table


def weighted_logrank(data: SurvivalDataset, w: FHWeight = LOGRANK, left_limit: bool = True) -> WLRResult:
    """Standardized weighted log-rank statistic for arm 1 against arm 0."""
    table = _check_table(data)
    oe, variance = score_terms(table)
    weights = component_weights(table, [w], left_limit=left_limit)[0]

    U = float(np.sum(weights * oe))
    var_u = float(np.sum(weights ** 2 * variance))
    if not var_u > 0:
        raise DegenerateStatisticError(f"{w.label} log-rank statistic has zero variance", component=w.label)
    se = float(np.sqrt(var_u))
    Z = U / se
    return WLRResult(U=U, se=se, Z=Z, p_two_sided=two_sided_p(Z), weight=w)
