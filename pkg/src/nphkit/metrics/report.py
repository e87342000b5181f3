"""Scenario reports: power, failure counts and bias curves, as JSON or tidy CSV."""

import numpy as np
import pandas as pd
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

from ..exceptions import DataError
from ..helper import load_json, to_jsonable, write_json
from ..simeng import ReplicationPlan, ReplicationResult
from .bias import ARMS, QUANTITIES, BiasGrid, ModelBias, TrueTheta, bias_curves, true_theta
from .power import PowerEstimate, power_summary

TIDY_COLUMNS = ("scenario", "method", "metric", "time", "value")


@dataclass(frozen=True, eq=False)
class ScenarioReport:
    scenario: str
    n_reps: int
    base_seed: int
    alpha: float
    power: Dict[str, PowerEstimate]
    bias_times: Optional[np.ndarray] = None
    bias: Dict[str, ModelBias] = field(default_factory=dict)
    absent_models: Tuple[str, ...] = ()
    truth: Optional[TrueTheta] = None

    def __post_init__(self):
        for estimate in self.power.values():
            if estimate.n_used and not 0.0 <= estimate.rejection <= 1.0:
                raise DataError(f"rejection fraction for {estimate.method} is outside [0, 1]")
        if self.bias_times is not None:
            k = len(self.bias_times)
            for model in self.bias.values():
                if any(len(v) != k for v in model.median_bias.values()):
                    raise DataError(f"bias curves of {model.model} do not match the grid")

    def to_dict(self) -> dict:
        truth = None
        if self.truth is not None:
            truth = {"rmst_diff": self.truth.rmst_diff, "surv_diff": self.truth.surv_diff,
                     "median0": self.truth.median0, "median1": self.truth.median1}
        return to_jsonable({
            "scenario": self.scenario,
            "n_reps": self.n_reps,
            "base_seed": self.base_seed,
            "alpha": self.alpha,
            "power": {m: p.to_dict() for m, p in self.power.items()},
            "bias_times": self.bias_times,
            "bias": {m: b.to_dict() for m, b in self.bias.items()},
            "absent_models": list(self.absent_models),
            "truth": truth,
        })

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioReport":
        try:
            truth = data.get("truth")
            if truth is not None:
                truth = TrueTheta(rmst_diff=np.asarray(truth["rmst_diff"], dtype=float),
                                  surv_diff=np.asarray(truth["surv_diff"], dtype=float),
                                  median0=float(truth["median0"]), median1=float(truth["median1"]))
            times = data.get("bias_times")
            # null entries are NaN curves (to_jsonable drops non-finite values)
            bias = {}
            for m, b in data.get("bias", {}).items():
                b = dict(b)
                for key in ("median_bias", "mean_bias"):
                    b[key] = {q: [np.nan if v is None else v for v in values] for q, values in b[key].items()}
                bias[m] = ModelBias.from_dict(b)
            return cls(
                scenario=data["scenario"],
                n_reps=int(data["n_reps"]),
                base_seed=int(data["base_seed"]),
                alpha=float(data["alpha"]),
                power={m: PowerEstimate.from_dict(p) for m, p in data["power"].items()},
                bias_times=None if times is None else np.asarray(times, dtype=float),
                bias=bias,
                absent_models=tuple(data.get("absent_models", ())),
                truth=truth,
            )
        except (KeyError, TypeError, AttributeError) as e:
            raise DataError(f"not a scenario report: {e}")

    def to_json(self, path: Union[str, Path]) -> None:
        write_json(self.to_dict(), path)

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "ScenarioReport":
        data = load_json(path)
        if not isinstance(data, dict):
            raise DataError(f"{path}: not a scenario report")
        return cls.from_dict(data)

    def to_tidy_frame(self) -> pd.DataFrame:
        """One row per scenario x method x metric x grid time (NaN time for scalar metrics)."""
        rows: List[tuple] = []
        nan = float("nan")

        def add(method, metric, time, value):
            value = nan if value is None else float(value)
            rows.append((self.scenario, method, metric, time, value))

        for method, p in self.power.items():
            add(method, "rejection", nan, p.rejection)
            add(method, "rejection_se", nan, p.se)
            add(method, "failures", nan, p.n_failed)

        times = [] if self.bias_times is None else [float(t) for t in self.bias_times]
        for model, b in self.bias.items():
            for quantity in QUANTITIES:
                for t, med, mean in zip(times, b.median_bias[quantity], b.mean_bias[quantity]):
                    add(model, f"{quantity}_median_bias", t, med)
                    add(model, f"{quantity}_mean_bias", t, mean)
            for arm in ARMS:
                add(model, f"mst_median_bias_arm{arm}", nan, b.mst_median_bias[arm])
                add(model, f"mst_mean_bias_arm{arm}", nan, b.mst_mean_bias[arm])
                add(model, f"mst_not_reached_arm{arm}", nan, b.mst_not_reached[arm])
            add(model, "bias_failures", nan, b.n_failed)

        if self.truth is not None:
            for quantity in QUANTITIES:
                for t, v in zip(times, np.atleast_1d(getattr(self.truth, quantity))):
                    add("truth", quantity, t, v)
            add("truth", "median_arm0", nan, self.truth.median0)
            add("truth", "median_arm1", nan, self.truth.median1)
        return pd.DataFrame(rows, columns=list(TIDY_COLUMNS))

    def write(self, path: Union[str, Path], output_format: str = "json") -> None:
        if output_format == "json":
            self.to_json(path)
        elif output_format == "csv":
            try:
                self.to_tidy_frame().to_csv(path, index=False)
            except OSError as e:
                raise DataError(f"cannot write '{path}': {e.strerror}")
        else:
            raise DataError(f"Unknown output format '{output_format}'")


def build_report(plan: ReplicationPlan, results: Iterable[ReplicationResult]) -> ScenarioReport:
    results = sorted(results, key=lambda r: r.rep)
    power = power_summary(results, plan.level, methods=plan.methods)

    bias_times, bias, absent, truth = None, {}, (), None
    if plan.bias_models:
        grid = BiasGrid.from_results(plan.grid, results, models=plan.bias_models)
        truth = true_theta(plan.scenario, grid.times)
        bias = bias_curves(grid, truth)
        absent = tuple(m for m in plan.bias_models if m not in bias)
        bias_times = grid.times
    return ScenarioReport(scenario=plan.scenario.name, n_reps=plan.n_reps, base_seed=plan.base_seed,
                          alpha=plan.level, power=power, bias_times=bias_times, bias=bias,
                          absent_models=absent, truth=truth)
