import numpy as np
import pandas as pd
from dataclasses import dataclass
from typing import Optional, Union

from ..exceptions import DataError
from .dataset import SurvivalDataset
from .event_table import risk_set_counts

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True, eq=False)
class KMCurve:
    """Product-limit survival curve.

    Steps sit at the distinct event times; the curve is right-continuous with
    S(0) = 1 and constant after the last step.
    """

    time: np.ndarray
    survival: np.ndarray
    at_risk: np.ndarray
    events: np.ndarray

    def __call__(self, t: ArrayLike) -> ArrayLike:
        return self.evaluate(t)

    def evaluate(self, t: ArrayLike) -> ArrayLike:
        idx = np.searchsorted(self.time, t, side="right") - 1
        return self._lookup(idx)

    def left_limit(self, t: ArrayLike) -> ArrayLike:
        """S(t-), the value just before t."""
        idx = np.searchsorted(self.time, t, side="left") - 1
        return self._lookup(idx)

    def _lookup(self, idx):
        values = np.concatenate(([1.0], self.survival))
        out = values[np.asarray(idx) + 1]
        return float(out) if np.ndim(out) == 0 else out

    def steps(self):
        """Iterate (time, S(time), at-risk count)."""
        for t, s, y in zip(self.time, self.survival, self.at_risk):
            yield float(t), float(s), int(y)

    def median(self) -> Optional[float]:
        """First time the curve falls to 0.5 or below; None when not reached."""
        below = np.flatnonzero(self.survival <= 0.5)
        if below.size == 0:
            return None
        return float(self.time[below[0]])

    def area(self, t_star: float) -> float:
        """Exact area under the step curve on [0, t_star]."""
        if t_star <= 0:
            return 0.0
        inside = self.time < t_star
        left = np.concatenate(([0.0], self.time[inside]))
        heights = np.concatenate(([1.0], self.survival[inside]))
        widths = np.diff(np.append(left, t_star))
        return float(np.sum(heights * widths))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"time": self.time, "survival": self.survival,
                             "at_risk": self.at_risk, "events": self.events})


def km_from_counts(time: np.ndarray, at_risk: np.ndarray, events: np.ndarray) -> KMCurve:
    hazard = np.divide(events, at_risk, out=np.zeros(len(time)), where=at_risk > 0)
    survival = np.cumprod(1.0 - hazard)
    return KMCurve(time, survival, at_risk, events)


def km_estimate(data: SurvivalDataset, arm: Optional[int] = None) -> KMCurve:
    """Kaplan-Meier estimate for one arm, or pooled over all records when arm is None."""
    if len(data) == 0:
        raise DataError("cannot estimate a survival curve from an empty dataset")
    if arm is not None:
        data = data.arm_subset(arm)
        if len(data) == 0:
            raise DataError(f"arm {arm} has no records")

    event_times = np.unique(data.time[data.event])
    at_risk, events = risk_set_counts(data.time, data.event, event_times)
    return km_from_counts(event_times, at_risk, events)
