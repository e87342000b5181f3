import warnings

import numpy as np
from dataclasses import dataclass
from typing import Sequence, Tuple

from ..exceptions import DataError, DegenerateStatisticError, StatisticalWarning
from ..survcore import SurvivalDataset, build_event_table
from .logrank import WLRResult, component_weights, score_terms, two_sided_p
from .mvn import mvn_box_probability
from .weights import MAXCOMBO_WEIGHTS, FHWeight


@dataclass(frozen=True, eq=False)
class MaxComboResult:
    components: Tuple[WLRResult, ...]
    correlation: np.ndarray
    Z_max: float
    p_two_sided: float
    correlation_mode: str = "estimated"

    @property
    def component_Z(self) -> Tuple[float, ...]:
        return tuple(c.Z for c in self.components)

    def to_dict(self) -> dict:
        return {
            "components": [c.to_dict() for c in self.components],
            "correlation": self.correlation.tolist(),
            "correlation_mode": self.correlation_mode,
            "Z_max": self.Z_max,
            "p_value": self.p_two_sided,
        }


def maxcombo(data: SurvivalDataset, correlation: str = "estimated", left_limit: bool = True,
             method: str = "quadrature", seed: int = 0,
             weights: Sequence[FHWeight] = MAXCOMBO_WEIGHTS) -> MaxComboResult:
    """Maximum of the FH(1,0), FH(0,1) and FH(1,1) standardized log-rank statistics.

    The two-sided p-value is 1 - P(max_k |Z_k| <= z_obs) under a centred
    normal with the estimated correlation of the components, or with the
    identity when `correlation="identity"`.
    """
    if correlation not in ("estimated", "identity"):
        raise DataError(f"Unknown correlation mode '{correlation}'")
    table = build_event_table(data)
    if len(table) == 0:
        raise DataError("no events observed; the MaxCombo statistic is undefined")

    oe, variance = score_terms(table)
    W = component_weights(table, weights, left_limit=left_limit)
    U = W @ oe
    cov = (W * variance) @ W.T

    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    for w, s in zip(weights, se):
        if not s > 0:
            raise DegenerateStatisticError(f"MaxCombo component {w.label} has zero variance", component=w.label)

    Z = U / se
    components = tuple(
        WLRResult(U=float(u), se=float(s), Z=float(z), p_two_sided=two_sided_p(z), weight=w)
        for u, s, z, w in zip(U, se, Z, weights)
    )

    if correlation == "identity":
        R = np.eye(len(weights))
    else:
        R = cov / np.outer(se, se)
        R = 0.5 * (R + R.T)
        np.fill_diagonal(R, 1.0)
        off_diagonal = np.abs(R[~np.eye(len(weights), dtype=bool)])
        if np.any(off_diagonal > 1.0 - 1e-12):
            warnings.warn("MaxCombo components are perfectly correlated; too few distinct event times",
                          StatisticalWarning)

    z_max = float(np.max(np.abs(Z)))
    if z_max == 0.0:
        p_value = 1.0
    else:
        p_value = 1.0 - mvn_box_probability(R, z_max, method=method, seed=seed)
    return MaxComboResult(components=components, correlation=R, Z_max=z_max,
                          p_two_sided=float(np.clip(p_value, 0.0, 1.0)), correlation_mode=correlation)
