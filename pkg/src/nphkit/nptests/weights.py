import numpy as np
from dataclasses import dataclass

from ..exceptions import DataError
from ..survcore import KMCurve


@dataclass(frozen=True)
class FHWeight:
    """Fleming-Harrington G(rho, gamma): w(t) = S(t-)^rho * (1 - S(t-))^gamma."""

    rho: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if self.rho < 0 or self.gamma < 0:
            raise DataError(f"FH weights need rho >= 0 and gamma >= 0, got ({self.rho}, {self.gamma})")

    @property
    def label(self) -> str:
        return f"FH({self.rho:g},{self.gamma:g})"

    def apply(self, survival: np.ndarray) -> np.ndarray:
        # numpy gives 0**0 == 1, so gamma = 0 keeps weight 1 where S = 1
        survival = np.clip(np.asarray(survival, dtype=float), 0.0, 1.0)
        return np.power(survival, self.rho) * np.power(1.0 - survival, self.gamma)


LOGRANK = FHWeight(0, 0)
EARLY = FHWeight(1, 0)
LATE = FHWeight(0, 1)
MIDDLE = FHWeight(1, 1)

# component order w1, w2, w3 of the combination test
MAXCOMBO_WEIGHTS = (EARLY, LATE, MIDDLE)


def fh_weight_values(curve: KMCurve, event_times: np.ndarray, w: FHWeight, left_limit: bool = True) -> np.ndarray:
    """Weights at `event_times` from the pooled Kaplan-Meier curve."""
    event_times = np.asarray(event_times, dtype=float)
    survival = curve.left_limit(event_times) if left_limit else curve.evaluate(event_times)
    return w.apply(np.atleast_1d(survival))
