"""Replication runner: simulate a trial, run every requested method, repeat."""
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Dict, Iterator, Optional, Tuple

import numpy as np
from tqdm import tqdm

from ..aftmod import AFTFit, aft_fit, aft_predict
from ..config import BIAS_MODELS, TEST_METHODS, AnalysisOptions
from ..coxmod import cox_fit, cox_predict
from ..exceptions import ConvergenceError, ConvergenceWarning, DataError, NphkitError, StatisticalWarning
from ..nptests import LOGRANK, maxcombo, weighted_logrank
from ..rmst import rmst_difference_test
from ..survcore import SurvivalDataset
from .scenarios import Scenario
from .simulate import replication_seed, simulate_trial

BIAS_GRID_POINTS = 30

# failures we record per replication instead of aborting the run
_RECOVERABLE = (NphkitError, np.linalg.LinAlgError, ArithmeticError, ValueError)


def bias_grid_times(followup: float, n_points: int = BIAS_GRID_POINTS) -> np.ndarray:
    """`n_points` equally spaced times on (0, followup]."""
    if not followup > 0:
        raise DataError("followup must be positive")
    return followup * np.arange(1, n_points + 1) / n_points


@dataclass(frozen=True)
class ReplicationPlan:
    scenario: Scenario
    n_reps: int
    base_seed: int = 7
    methods: Tuple[str, ...] = TEST_METHODS
    bias_models: Tuple[str, ...] = ()
    alpha: Optional[float] = None
    options: AnalysisOptions = field(default_factory=AnalysisOptions)

    def __post_init__(self):
        if self.n_reps < 1:
            raise DataError("n_reps must be >= 1")
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "bias_models", tuple(self.bias_models))
        unknown = set(self.methods) - set(TEST_METHODS)
        if unknown:
            raise DataError(f"Unknown methods: {', '.join(sorted(unknown))}")
        unknown = set(self.bias_models) - set(BIAS_MODELS)
        if unknown:
            raise DataError(f"Unknown bias models: {', '.join(sorted(unknown))}")
        if self.alpha is not None and not 0.0 < self.alpha < 1.0:
            raise DataError("alpha must lie in (0, 1)")

    @property
    def level(self) -> float:
        return self.scenario.alpha if self.alpha is None else self.alpha

    @property
    def grid(self) -> np.ndarray:
        return bias_grid_times(self.scenario.followup)

    def seed_for(self, index: int) -> np.random.SeedSequence:
        return replication_seed(self.base_seed, index)


@dataclass(frozen=True)
class MethodOutcome:
    rep: int
    method: str
    ok: bool
    statistic: float = float("nan")
    p_value: float = float("nan")
    reject: Optional[bool] = None
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return {"rep": self.rep, "method": self.method, "ok": self.ok, "statistic": self.statistic,
                "p_value": self.p_value, "reject": self.reject, "error": self.error}


@dataclass(frozen=True, eq=False)
class BiasEstimate:
    """Model-based estimates on the bias grid for one replication.

    A median of None means the model curve never reached 0.5.
    """

    rep: int
    model: str
    ok: bool
    rmst_diff: Optional[np.ndarray] = None
    surv_diff: Optional[np.ndarray] = None
    median0: Optional[float] = None
    median1: Optional[float] = None
    error: Optional[str] = None


@dataclass(frozen=True, eq=False)
class ReplicationResult:
    rep: int
    outcomes: Tuple[MethodOutcome, ...]
    bias: Tuple[BiasEstimate, ...] = ()

    def outcome(self, method: str) -> MethodOutcome:
        for o in self.outcomes:
            if o.method == method:
                return o
        raise KeyError(method)


def _failure(rep: int, method: str, error: BaseException) -> MethodOutcome:
    return MethodOutcome(rep=rep, method=method, ok=False, error=f"{type(error).__name__}: {error}")


def _aft(data: SurvivalDataset, family: str, cache: Dict[str, AFTFit]) -> AFTFit:
    if family not in cache:
        cache[family] = aft_fit(data, family)
    return cache[family]


def _test_statistic(method: str, data: SurvivalDataset, options: AnalysisOptions,
                    fits: Dict[str, AFTFit]) -> Tuple[float, float]:
    if method == "logrank":
        res = weighted_logrank(data, LOGRANK, left_limit=options.weight_left_limit)
        return res.Z, res.p_two_sided
    if method == "maxcombo":
        res = maxcombo(data, correlation=options.maxcombo_correlation, left_limit=options.weight_left_limit,
                       method=options.mvn_method, seed=options.mvn_seed)
        return res.Z_max, res.p_two_sided
    if method == "rmst_diff":
        res = rmst_difference_test(data, rule=options.t_star_rule)
        return res.Z, res.p_two_sided
    fit = _aft(data, method, fits)
    fit.require_converged()
    W, p = fit.wald
    if not np.isfinite(p):
        raise ConvergenceError(f"{method.upper()} Wald statistic is undefined (Var(beta1) not positive)")
    return W, p


def _bias_estimate(rep: int, model: str, data: SurvivalDataset, grid: np.ndarray,
                   fits: Dict[str, AFTFit]) -> BiasEstimate:
    if model == "cox":
        fit = cox_fit(data)
        pred0, pred1 = cox_predict(fit, 0), cox_predict(fit, 1)
        rmst0 = np.array([pred0.rmst(t) for t in grid])
        rmst1 = np.array([pred1.rmst(t) for t in grid])
    else:
        fit = _aft(data, model, fits)
        pred0, pred1 = aft_predict(fit, 0), aft_predict(fit, 1)
        rmst0, rmst1 = pred0.rmst_grid(grid), pred1.rmst_grid(grid)
    surv_diff = np.asarray(pred1.survival(grid)) - np.asarray(pred0.survival(grid))
    return BiasEstimate(rep=rep, model=model, ok=True, rmst_diff=rmst1 - rmst0, surv_diff=surv_diff,
                        median0=pred0.median(grid[-1]), median1=pred1.median(grid[-1]))


def run_replication(plan: ReplicationPlan, index: int) -> ReplicationResult:
    """Simulate replication `index` and run every method and bias model of the plan on it."""
    data = simulate_trial(plan.scenario, plan.seed_for(index))
    fits: Dict[str, AFTFit] = {}
    outcomes = []
    bias = []
    with warnings.catch_warnings():
        # non-convergence is recorded as a failure marker below
        warnings.simplefilter("ignore", ConvergenceWarning)
        warnings.simplefilter("ignore", StatisticalWarning)
        for method in plan.methods:
            try:
                statistic, p_value = _test_statistic(method, data, plan.options, fits)
            except _RECOVERABLE as e:
                outcomes.append(_failure(index, method, e))
                continue
            outcomes.append(MethodOutcome(rep=index, method=method, ok=True, statistic=float(statistic),
                                          p_value=float(p_value), reject=bool(p_value < plan.level)))
        grid = plan.grid
        for model in plan.bias_models:
            try:
                bias.append(_bias_estimate(index, model, data, grid, fits))
            except _RECOVERABLE as e:
                bias.append(BiasEstimate(rep=index, model=model, ok=False, error=f"{type(e).__name__}: {e}"))
    return ReplicationResult(rep=index, outcomes=tuple(outcomes), bias=tuple(bias))


def run_plan(plan: ReplicationPlan, workers: int = 1, progress: bool = False) -> Iterator[ReplicationResult]:
    """Replication results in index order.

    Each replication draws from its own seed, so the stream is the same for
    any `workers` value.
    """
    task = partial(run_replication, plan)
    indices = range(plan.n_reps)
    bar = dict(total=plan.n_reps, desc=plan.scenario.name, unit="rep", disable=not progress)
    if workers <= 1:
        for index in tqdm(indices, **bar):
            yield task(index)
        return
    chunksize = max(1, plan.n_reps // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        for result in tqdm(ex.map(task, indices, chunksize=chunksize), **bar):
            yield result
