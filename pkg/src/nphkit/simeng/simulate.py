import numpy as np
from typing import Optional

from ..survcore import PiecewiseExpSpec, SurvivalDataset
from .scenarios import Scenario


def replication_seed(base_seed: int, index: int) -> np.random.SeedSequence:
    """Seed for replication `index`; independent of the order replications run in."""
    return np.random.SeedSequence(entropy=int(base_seed), spawn_key=(int(index),))


def _arm_times(spec: PiecewiseExpSpec, n: int, followup: float, censor_rate: float,
               rng: np.random.Generator):
    event_time = spec.sample(rng, n)
    if censor_rate > 0:
        censor_time = rng.exponential(1.0 / censor_rate, size=n)
    else:
        censor_time = np.full(n, np.inf)
    horizon = np.minimum(censor_time, followup)
    observed = np.minimum(event_time, horizon)
    return observed, event_time <= horizon


def simulate_trial(scenario: Scenario, seed, rng: Optional[np.random.Generator] = None) -> SurvivalDataset:
    """One two-arm trial, all subjects entering at time 0.

    `seed` may be an int or a SeedSequence. Control draws are made before
    treatment draws so a given seed always yields the same dataset.
    """
    rng = np.random.default_rng(seed) if rng is None else rng
    t0, e0 = _arm_times(scenario.arm0, scenario.n0, scenario.followup, scenario.random_censor_rate, rng)
    t1, e1 = _arm_times(scenario.arm1, scenario.n1, scenario.followup, scenario.random_censor_rate, rng)
    return SurvivalDataset(
        time=np.concatenate((t0, t1)),
        event=np.concatenate((e0, e1)),
        arm=np.concatenate((np.zeros(scenario.n0, dtype=np.int8), np.ones(scenario.n1, dtype=np.int8))),
    )
