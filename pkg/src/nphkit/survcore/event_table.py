import numpy as np
import pandas as pd
from dataclasses import dataclass
from typing import Tuple

from ..exceptions import DataError
from .dataset import SurvivalDataset


def risk_set_counts(time: np.ndarray, event: np.ndarray, at: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """At-risk and event counts at each time in `at`.

    A subject censored at t is still at risk for an event at t.
    """
    order = np.sort(time)
    event_times = np.sort(time[event])
    at_risk = order.shape[0] - np.searchsorted(order, at, side="left")
    events = np.searchsorted(event_times, at, side="right") - np.searchsorted(event_times, at, side="left")
    return at_risk.astype(np.int64), events.astype(np.int64)


@dataclass(frozen=True, eq=False)
class EventTable:
    """Risk-set summaries at the distinct event times of a two-arm dataset."""

    time: np.ndarray
    at_risk0: np.ndarray
    at_risk1: np.ndarray
    events0: np.ndarray
    events1: np.ndarray

    @property
    def at_risk(self) -> np.ndarray:
        return self.at_risk0 + self.at_risk1

    @property
    def events(self) -> np.ndarray:
        return self.events0 + self.events1

    def __len__(self) -> int:
        return int(self.time.shape[0])

    def rows(self):
        """Iterate (t, Y, Y0, Y1, dN, dN0, dN1) tuples."""
        at_risk, events = self.at_risk, self.events
        for i in range(len(self)):
            yield (float(self.time[i]), int(at_risk[i]), int(self.at_risk0[i]), int(self.at_risk1[i]),
                   int(events[i]), int(self.events0[i]), int(self.events1[i]))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "time": self.time,
            "at_risk": self.at_risk,
            "at_risk0": self.at_risk0,
            "at_risk1": self.at_risk1,
            "events": self.events,
            "events0": self.events0,
            "events1": self.events1,
        })


def build_event_table(data: SurvivalDataset) -> EventTable:
    """One row per distinct event time, with per-arm risk sets and event counts."""
    if len(data) == 0:
        raise DataError("dataset is empty")
    data.require_two_arms()

    event_times = np.unique(data.time[data.event])
    columns = []
    for arm in (0, 1):
        mask = data.arm == arm
        columns.append(risk_set_counts(data.time[mask], data.event[mask], event_times))
    (at_risk0, events0), (at_risk1, events1) = columns

    for values in (event_times, at_risk0, at_risk1, events0, events1):
        values.setflags(write=False)
    return EventTable(event_times, at_risk0, at_risk1, events0, events1)
