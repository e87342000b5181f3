import hashlib
import numpy as np
import pandas as pd
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Tuple, Union

from ..exceptions import DataError

CSV_COLUMNS = ("time", "event", "arm")


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.array(values, copy=True)
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class SurvivalDataset:
    """Subject-level right-censored records.

    `event` is True for an observed event and False for a censored time.
    `arm` is 0 (control) / 1 (treatment), or None for a single-arm sample.
    Records keep their input order; every operation sorts internally.
    """

    time: np.ndarray
    event: np.ndarray
    arm: Optional[np.ndarray] = None

    def __post_init__(self):
        time = np.asarray(self.time, dtype=float).reshape(-1)
        event = np.asarray(self.event).reshape(-1)
        if event.shape != time.shape:
            raise DataError("time and event must have the same length")
        if not np.all(np.isin(event, (0, 1, True, False))):
            raise DataError("event must be 0/1")
        if not np.all(np.isfinite(time)):
            raise DataError("times must be finite")
        if np.any(time < 0):
            raise DataError("times must be >= 0")
        object.__setattr__(self, "time", _frozen(time))
        object.__setattr__(self, "event", _frozen(event.astype(bool)))

        if self.arm is not None:
            arm = np.asarray(self.arm).reshape(-1)
            if arm.shape != time.shape:
                raise DataError("arm must have the same length as time")
            if not np.all(np.isin(arm, (0, 1))):
                raise DataError("arm must be 0 or 1")
            object.__setattr__(self, "arm", _frozen(arm.astype(np.int8)))

    @classmethod
    def from_arrays(cls, time, event, arm=None) -> "SurvivalDataset":
        return cls(np.asarray(time, dtype=float), np.asarray(event), None if arm is None else np.asarray(arm))

    @classmethod
    def from_records(cls, records: Iterable[Tuple]) -> "SurvivalDataset":
        """Build from (time, event) or (time, event, arm) tuples."""
        records = list(records)
        if not records:
            raise DataError("dataset is empty")
        width = len(records[0])
        if width not in (2, 3) or any(len(r) != width for r in records):
            raise DataError("records must all be (time, event) or (time, event, arm)")
        columns = list(zip(*records))
        return cls(np.asarray(columns[0], dtype=float), np.asarray(columns[1]),
                   np.asarray(columns[2]) if width == 3 else None)

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "SurvivalDataset":
        arm = frame["arm"].to_numpy() if "arm" in frame.columns else None
        return cls(frame["time"].to_numpy(dtype=float), frame["event"].to_numpy(), arm)

    @classmethod
    def read_csv(cls, path: Union[str, Path]) -> "SurvivalDataset":
        return read_ipd_csv(path)

    def __len__(self) -> int:
        return int(self.time.shape[0])

    @property
    def n_events(self) -> int:
        return int(self.event.sum())

    @property
    def is_two_arm(self) -> bool:
        return self.arm is not None

    def arm_sizes(self) -> Tuple[int, int]:
        if self.arm is None:
            raise DataError("dataset has no arm column")
        n1 = int(self.arm.sum())
        return len(self) - n1, n1

    def require_two_arms(self) -> None:
        if len(self) == 0:
            raise DataError("dataset is empty")
        if self.arm is None:
            raise DataError("operation needs a two-arm dataset, got a single-arm one")
        n0, n1 = self.arm_sizes()
        if n0 == 0 or n1 == 0:
            raise DataError(f"operation needs records in both arms (arm 0: {n0}, arm 1: {n1})")

    def arm_subset(self, arm: int) -> "SurvivalDataset":
        """Single-arm dataset with the records of one arm."""
        if self.arm is None:
            raise DataError("dataset has no arm column")
        mask = self.arm == arm
        return SurvivalDataset(self.time[mask], self.event[mask])

    def pooled(self) -> "SurvivalDataset":
        return SurvivalDataset(self.time, self.event)

    def swap_arms(self) -> "SurvivalDataset":
        if self.arm is None:
            raise DataError("dataset has no arm column")
        return SurvivalDataset(self.time, self.event, 1 - self.arm)

    def scale_time(self, factor: float) -> "SurvivalDataset":
        if factor <= 0:
            raise DataError("time scale factor must be positive")
        return SurvivalDataset(self.time * factor, self.event, self.arm)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({"time": self.time, "event": self.event.astype(int)})
        if self.arm is not None:
            frame["arm"] = self.arm.astype(int)
        return frame

    def fingerprint(self) -> str:
        """Content hash, used to tell replications apart."""
        digest = hashlib.sha1(self.time.tobytes())
        digest.update(self.event.tobytes())
        if self.arm is not None:
            digest.update(self.arm.tobytes())
        return digest.hexdigest()


def _first_bad_line(mask: np.ndarray) -> int:
    # header is line 1
    return int(np.flatnonzero(mask)[0]) + 2


def read_ipd_csv(path: Union[str, Path]) -> SurvivalDataset:
    """Read individual patient data from a `time,event,arm` CSV file."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"Input file '{path}' not found")

    try:
        frame = pd.read_csv(path, dtype=str, skipinitialspace=True, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise DataError(f"'{path}' is empty")
    except pd.errors.ParserError as e:
        raise DataError(f"Malformed CSV in '{path}': {e}")

    frame.columns = [c.strip() for c in frame.columns]
    missing = [c for c in ("time", "event") if c not in frame.columns]
    if missing:
        raise DataError(f"'{path}' is missing column(s): {', '.join(missing)}")
    extra = [c for c in frame.columns if c not in CSV_COLUMNS]
    if extra:
        raise DataError(f"'{path}' has unexpected column(s): {', '.join(extra)}")
    if frame.empty:
        raise DataError(f"'{path}' contains no records")

    time = pd.to_numeric(frame["time"], errors="coerce").to_numpy(dtype=float)
    bad = ~np.isfinite(time) | (time < 0)
    if bad.any():
        line = _first_bad_line(bad)
        raise DataError(f"{path}:{line}: time must be a finite number >= 0")

    columns = {"time": time}
    for name in ("event", "arm"):
        if name not in frame.columns:
            continue
        values = pd.to_numeric(frame[name], errors="coerce").to_numpy(dtype=float)
        bad = ~np.isin(values, (0.0, 1.0))
        if bad.any():
            line = _first_bad_line(bad)
            raise DataError(f"{path}:{line}: {name} must be 0 or 1")
        columns[name] = values.astype(int)

    return SurvivalDataset(columns["time"], columns["event"], columns.get("arm"))
