"""Run configuration shared by the library entry points and the CLI."""
import os
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .exceptions import DataError

WORKERS_ENV = "NPHKIT_WORKERS"

TEST_METHODS = ("logrank", "maxcombo", "rmst_diff", "gg", "gf")
BIAS_MODELS = ("cox", "gg", "gf")
COMMANDS = ("analyze", "simulate", "scenarios", "report")


@dataclass(frozen=True)
class AnalysisOptions:
    # False evaluates the FH weights at S(t) instead of the predictable S(t-)
    weight_left_limit: bool = True
    maxcombo_correlation: str = "estimated"
    mvn_method: str = "quadrature"
    mvn_seed: int = 0
    t_star_rule: str = "event"
    gt_transform: str = "km"

    def __post_init__(self):
        if self.maxcombo_correlation not in ("estimated", "identity"):
            raise DataError(f"Unknown MaxCombo correlation mode '{self.maxcombo_correlation}'")
        if self.mvn_method not in ("quadrature", "qmc"):
            raise DataError(f"Unknown MVN integration method '{self.mvn_method}'")
        if self.t_star_rule not in ("event", "followup"):
            raise DataError(f"Unknown t* rule '{self.t_star_rule}'")
        if self.gt_transform not in ("km", "rank", "identity", "log"):
            raise DataError(f"Unknown time transform '{self.gt_transform}'")


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: Tuple[str, ...] = ()
    scenario: Optional[str] = None
    n_reps: int = 2000
    base_seed: int = 7
    alpha: Optional[float] = None
    methods: Tuple[str, ...] = TEST_METHODS
    bias_models: Tuple[str, ...] = BIAS_MODELS
    output: Optional[str] = None
    output_format: str = "json"
    workers: int = 1
    quiet: bool = False
    options: AnalysisOptions = field(default_factory=AnalysisOptions)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise DataError(f"Unknown command '{self.command}'")
        if self.n_reps < 1:
            raise DataError("reps must be >= 1")
        if self.alpha is not None and not 0.0 < self.alpha <= 0.5:
            raise DataError("alpha must lie in (0, 0.5]")
        if self.output_format not in ("json", "csv"):
            raise DataError(f"Unknown output format '{self.output_format}'")
        unknown = set(self.methods) - set(TEST_METHODS)
        if unknown:
            raise DataError(f"Unknown methods: {', '.join(sorted(unknown))}")
        unknown = set(self.bias_models) - set(BIAS_MODELS)
        if unknown:
            raise DataError(f"Unknown bias models: {', '.join(sorted(unknown))}")
        if self.command in ("analyze", "report") and (not self.inputs or not all(self.inputs)):
            raise DataError(f"'{self.command}' needs an input path")
        if self.command == "simulate" and not self.scenario:
            raise DataError("'simulate' needs a scenario name or config path")
        if self.output is not None and not self.output:
            raise DataError("output path must not be empty")
        if self.workers < 1:
            raise DataError("workers must be >= 1")


def resolve_workers(requested: Optional[int] = None) -> int:
    """Worker count: explicit request, then NPHKIT_WORKERS, then the CPU count."""
    if requested is not None:
        return max(1, int(requested))
    env_value = os.environ.get(WORKERS_ENV)
    if env_value:
        try:
            return max(1, int(env_value))
        except ValueError:
            raise DataError(f"{WORKERS_ENV} must be an integer, got '{env_value}'")
    return os.cpu_count() or 1
