import os
from pathlib import Path

import numpy as np
import pytest

from nphkit.survcore import PiecewiseExpSpec, SurvivalDataset

IPD_ENV = "NPHKIT_IPD_DIR"


def exponential_trial(n0: int, n1: int, rate0: float, rate1: float, seed: int,
                      followup: float = np.inf) -> SurvivalDataset:
    rng = np.random.default_rng(seed)
    t0 = PiecewiseExpSpec.exponential(rate0).sample(rng, n0)
    t1 = PiecewiseExpSpec.exponential(rate1).sample(rng, n1)
    time = np.concatenate((t0, t1))
    return SurvivalDataset(
        time=np.minimum(time, followup),
        event=time <= followup,
        arm=np.repeat([0, 1], [n0, n1]),
    )


@pytest.fixture
def hand_dataset():
    # arm 0 events at 1 and 3, arm 1 events at 2 and 4
    return SurvivalDataset.from_records([(1, 1, 0), (3, 1, 0), (2, 1, 1), (4, 1, 1)])


@pytest.fixture
def identical_arms():
    base = exponential_trial(30, 0, 0.1, 0.1, seed=11, followup=20.0)
    time = np.concatenate((base.time, base.time))
    event = np.concatenate((base.event, base.event))
    return SurvivalDataset(time, event, np.repeat([0, 1], len(base)))


@pytest.fixture
def write_csv(tmp_path):
    def _write(name: str, text: str) -> Path:
        path = tmp_path / name
        path.write_text(text)
        return path
    return _write


@pytest.fixture
def ipd_dir():
    value = os.environ.get(IPD_ENV)
    if not value:
        pytest.skip(f"set {IPD_ENV} to a directory with reconstructed IPD CSVs")
    return Path(value)
