"""Time-dependent bias of model-based estimates against the simulation truth."""
import numpy as np
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from ..exceptions import DataError
from ..simeng import BIAS_GRID_POINTS, ReplicationResult, Scenario
from ..survcore import pwexp_quantile, pwexp_rmst, pwexp_survival

QUANTITIES = ("rmst_diff", "surv_diff")
ARMS = (0, 1)


class TrueTheta(NamedTuple):
    rmst_diff: Union[float, np.ndarray]
    surv_diff: Union[float, np.ndarray]
    median0: float
    median1: float


def true_theta(scenario: Scenario, t) -> TrueTheta:
    """Censoring-free truth from the arm specs: RMST and survival differences at t, and both medians."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0) or np.any(t_arr > scenario.followup):
        raise DataError(f"truth times must lie in (0, {scenario.followup}]")
    rmst = np.vectorize(lambda s: pwexp_rmst(scenario.arm1, s) - pwexp_rmst(scenario.arm0, s), otypes=[float])(t_arr)
    surv = np.asarray(pwexp_survival(scenario.arm1, t_arr)) - np.asarray(pwexp_survival(scenario.arm0, t_arr))
    if t_arr.ndim == 0:
        rmst, surv = float(rmst), float(surv)
    return TrueTheta(rmst_diff=rmst, surv_diff=surv,
                     median0=float(pwexp_quantile(scenario.arm0, 0.5)),
                     median1=float(pwexp_quantile(scenario.arm1, 0.5)))


@dataclass(frozen=True, eq=False)
class BiasGrid:
    """Per-model estimates on the grid, one row per successful replication.

    Medians are NaN where the model curve did not reach 0.5.
    """

    times: np.ndarray
    estimates: Dict[str, Dict[str, np.ndarray]]
    medians: Dict[str, Dict[int, np.ndarray]]
    failures: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.times) != BIAS_GRID_POINTS:
            raise DataError(f"a bias grid has exactly {BIAS_GRID_POINTS} time points, got {len(self.times)}")
        for model, per_quantity in self.estimates.items():
            for quantity, values in per_quantity.items():
                if values.ndim != 2 or values.shape[1] != len(self.times):
                    raise DataError(f"{model}/{quantity} estimates do not match the grid")

    @property
    def models(self) -> Tuple[str, ...]:
        return tuple(self.estimates)

    def n_used(self, model: str) -> int:
        return int(self.estimates[model]["rmst_diff"].shape[0])

    @classmethod
    def from_results(cls, times: Sequence[float], results: Iterable[ReplicationResult],
                     models: Optional[Sequence[str]] = None) -> "BiasGrid":
        times = np.asarray(times, dtype=float)
        rows: Dict[str, Dict[str, List[np.ndarray]]] = {}
        meds: Dict[str, Dict[int, List[float]]] = {}
        failures: Dict[str, int] = {}
        for result in sorted(results, key=lambda r: r.rep):
            for est in result.bias:
                if models is not None and est.model not in models:
                    continue
                failures.setdefault(est.model, 0)
                rows.setdefault(est.model, {q: [] for q in QUANTITIES})
                meds.setdefault(est.model, {a: [] for a in ARMS})
                if not est.ok:
                    failures[est.model] += 1
                    continue
                rows[est.model]["rmst_diff"].append(np.asarray(est.rmst_diff, dtype=float))
                rows[est.model]["surv_diff"].append(np.asarray(est.surv_diff, dtype=float))
                meds[est.model][0].append(np.nan if est.median0 is None else est.median0)
                meds[est.model][1].append(np.nan if est.median1 is None else est.median1)
        k = len(times)
        estimates = {m: {q: np.asarray(v, dtype=float).reshape(-1, k) for q, v in per.items()}
                     for m, per in rows.items()}
        medians = {m: {a: np.asarray(v, dtype=float) for a, v in per.items()} for m, per in meds.items()}
        return cls(times=times, estimates=estimates, medians=medians, failures=failures)


@dataclass(frozen=True, eq=False)
class ModelBias:
    model: str
    n_used: int
    n_failed: int
    median_bias: Dict[str, np.ndarray]
    mean_bias: Dict[str, np.ndarray]
    mst_median_bias: Dict[int, Optional[float]]
    mst_mean_bias: Dict[int, Optional[float]]
    mst_not_reached: Dict[int, int]

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "n_used": self.n_used,
            "n_failed": self.n_failed,
            "median_bias": {q: v.tolist() for q, v in self.median_bias.items()},
            "mean_bias": {q: v.tolist() for q, v in self.mean_bias.items()},
            "mst_median_bias": {str(a): v for a, v in self.mst_median_bias.items()},
            "mst_mean_bias": {str(a): v for a, v in self.mst_mean_bias.items()},
            "mst_not_reached": {str(a): v for a, v in self.mst_not_reached.items()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelBias":
        def optional(v):
            return None if v is None else float(v)

        return cls(
            model=data["model"],
            n_used=int(data["n_used"]),
            n_failed=int(data["n_failed"]),
            median_bias={q: np.asarray(v, dtype=float) for q, v in data["median_bias"].items()},
            mean_bias={q: np.asarray(v, dtype=float) for q, v in data["mean_bias"].items()},
            mst_median_bias={int(a): optional(v) for a, v in data["mst_median_bias"].items()},
            mst_mean_bias={int(a): optional(v) for a, v in data["mst_mean_bias"].items()},
            mst_not_reached={int(a): int(v) for a, v in data["mst_not_reached"].items()},
        )


def bias_curves(grid: BiasGrid, truth: TrueTheta) -> Dict[str, ModelBias]:
    """Median (and mean) over replications of estimate - truth at every grid time.

    Models with no successful replication are left out rather than zero-filled.
    """
    true_values = {"rmst_diff": np.asarray(truth.rmst_diff, dtype=float),
                   "surv_diff": np.asarray(truth.surv_diff, dtype=float)}
    true_median = {0: truth.median0, 1: truth.median1}
    out: Dict[str, ModelBias] = {}
    for model in grid.models:
        n_used = grid.n_used(model)
        if n_used == 0:
            continue
        median_bias, mean_bias = {}, {}
        for quantity in QUANTITIES:
            diff = grid.estimates[model][quantity] - true_values[quantity]
            median_bias[quantity] = np.median(diff, axis=0)
            mean_bias[quantity] = np.mean(diff, axis=0)

        mst_median, mst_mean, not_reached = {}, {}, {}
        for arm in ARMS:
            values = grid.medians[model][arm]
            reached = values[np.isfinite(values)]
            not_reached[arm] = int(values.size - reached.size)
            if reached.size:
                mst_median[arm] = float(np.median(reached - true_median[arm]))
                mst_mean[arm] = float(np.mean(reached - true_median[arm]))
            else:
                mst_median[arm] = mst_mean[arm] = None
        out[model] = ModelBias(model=model, n_used=n_used, n_failed=grid.failures.get(model, 0),
                               median_bias=median_bias, mean_bias=mean_bias, mst_median_bias=mst_median,
                               mst_mean_bias=mst_mean, mst_not_reached=not_reached)
    return out
