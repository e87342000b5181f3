import warnings

import numpy as np
from dataclasses import dataclass
from scipy import stats
from typing import Optional, Tuple, Union

from ..exceptions import ConvergenceError, ConvergenceWarning, DataError
from ..survcore import EventTable, SurvivalDataset, build_event_table

ArrayLike = Union[float, np.ndarray]

_MAX_ABS_BETA = 30.0
_STEP_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class CoxFit:
    """Single-covariate (arm) Cox fit with the Breslow baseline cumulative hazard."""

    beta: float
    var_beta: float
    loglik: float
    loglik_null: float
    score: float
    n_iter: int
    converged: bool
    n_events: int
    baseline_time: np.ndarray
    baseline_cumhaz: np.ndarray

    @property
    def se(self) -> float:
        return float(np.sqrt(self.var_beta)) if self.var_beta > 0 else float("nan")

    @property
    def hazard_ratio(self) -> float:
        return float(np.exp(self.beta))

    @property
    def z(self) -> float:
        return self.beta / self.se

    @property
    def p_value(self) -> float:
        return float(2.0 * stats.norm.sf(abs(self.z)))

    @property
    def likelihood_ratio(self) -> float:
        return 2.0 * (self.loglik - self.loglik_null)

    def baseline(self, t: ArrayLike) -> ArrayLike:
        """Breslow cumulative baseline hazard, right-continuous step function."""
        idx = np.searchsorted(self.baseline_time, t, side="right") - 1
        values = np.concatenate(([0.0], self.baseline_cumhaz))
        out = values[np.asarray(idx) + 1]
        return float(out) if np.ndim(out) == 0 else out

    def require_converged(self) -> None:
        if not self.converged:
            raise ConvergenceError(f"Cox fit did not converge after {self.n_iter} iterations (beta={self.beta:.4g})")

    def to_dict(self) -> dict:
        return {"beta": self.beta, "se": self.se, "HR": self.hazard_ratio, "z": self.z, "p_value": self.p_value,
                "loglik": self.loglik, "lr_statistic": self.likelihood_ratio, "n_iter": self.n_iter,
                "converged": self.converged}


def _partial_likelihood(beta: float, table: EventTable) -> Tuple[float, float, float]:
    """Breslow log partial likelihood, score and observed information at beta."""
    y0 = table.at_risk0.astype(float)
    y1 = table.at_risk1.astype(float)
    d = table.events.astype(float)
    d1 = table.events1.astype(float)

    s1 = y1 * np.exp(beta)
    s0 = y0 + s1
    mean_x = s1 / s0
    loglik = float(np.sum(d1 * beta - d * np.log(s0)))
    score = float(np.sum(d1 - d * mean_x))
    information = float(np.sum(d * mean_x * (1.0 - mean_x)))
    return loglik, score, information


def _settled(score: float, information: float, tol: float) -> bool:
    # a monotone likelihood drives the score to 0 while the Newton step stays near 1
    return information > 0 and abs(score) < tol and abs(score / information) < _STEP_TOL


def cox_fit(data: SurvivalDataset, tol: float = 1e-8, max_iter: int = 25) -> CoxFit:
    """Newton-Raphson maximisation of the partial likelihood, starting at beta = 0.

    Steps that lower the likelihood are halved. A fit that does not reach
    |score| < tol with a vanishing Newton step (monotone likelihood,
    separation) comes back with converged=False and a ConvergenceWarning.
    """
    table = build_event_table(data)
    if len(table) == 0:
        raise DataError("no events observed; the Cox model cannot be fitted")

    beta = 0.0
    loglik_null, score, information = _partial_likelihood(beta, table)
    loglik = loglik_null
    converged = _settled(score, information, tol)
    n_iter = 0

    while not converged and n_iter < max_iter:
        n_iter += 1
        if not information > 0:
            break
        step = score / information
        candidate = beta + step
        new_loglik, new_score, new_information = _partial_likelihood(candidate, table)
        halvings = 0
        while new_loglik < loglik and halvings < 30:
            step /= 2.0
            candidate = beta + step
            new_loglik, new_score, new_information = _partial_likelihood(candidate, table)
            halvings += 1
        beta, loglik, score, information = candidate, new_loglik, new_score, new_information
        converged = _settled(score, information, tol)
        if abs(beta) > _MAX_ABS_BETA:
            break

    converged = converged and information > 0 and abs(beta) <= _MAX_ABS_BETA
    if not converged:
        warnings.warn(
            f"Cox fit did not converge after {n_iter} iterations (beta={beta:.4g}, score={score:.3g}); "
            "the partial likelihood may be monotone",
            ConvergenceWarning,
        )

    s0 = table.at_risk0 + table.at_risk1 * np.exp(beta)
    cumhaz = np.cumsum(table.events / s0)
    var_beta = 1.0 / information if information > 0 else float("inf")
    return CoxFit(beta=float(beta), var_beta=float(var_beta), loglik=loglik, loglik_null=loglik_null,
                  score=score, n_iter=n_iter, converged=bool(converged), n_events=int(table.events.sum()),
                  baseline_time=table.time, baseline_cumhaz=cumhaz)


@dataclass(frozen=True, eq=False)
class CoxPrediction:
    """Model-based survival curve for one arm: exp(-Lambda0(t) exp(beta * arm))."""

    time: np.ndarray
    survival_steps: np.ndarray

    def survival(self, t: ArrayLike) -> ArrayLike:
        idx = np.searchsorted(self.time, t, side="right") - 1
        values = np.concatenate(([1.0], self.survival_steps))
        out = values[np.asarray(idx) + 1]
        return float(out) if np.ndim(out) == 0 else out

    def median(self, horizon: Optional[float] = None) -> Optional[float]:
        """First step time with S <= 0.5; None when the curve never gets there by `horizon`."""
        below = np.flatnonzero(self.survival_steps <= 0.5)
        if not below.size:
            return None
        value = float(self.time[below[0]])
        return None if horizon is not None and value > horizon else value

    def rmst(self, t_star: float) -> float:
        if t_star <= 0:
            return 0.0
        inside = self.time < t_star
        left = np.concatenate(([0.0], self.time[inside]))
        heights = np.concatenate(([1.0], self.survival_steps[inside]))
        return float(np.sum(heights * np.diff(np.append(left, t_star))))


def cox_predict(fit: CoxFit, arm: int) -> CoxPrediction:
    fit.require_converged()
    if arm not in (0, 1):
        raise DataError("arm must be 0 or 1")
    steps = np.exp(-fit.baseline_cumhaz * np.exp(fit.beta * arm))
    return CoxPrediction(time=fit.baseline_time, survival_steps=steps)
