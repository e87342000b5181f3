import math
import warnings

import numpy as np
from dataclasses import dataclass
from scipy import integrate, optimize, stats
from typing import Dict, Optional, Sequence, Tuple, Union

from ..exceptions import ConvergenceError, ConvergenceWarning, DataError
from ..survcore import SurvivalDataset
from .genf import GFParams, gf_hazard, gf_logpdf_kernel, gf_logsf_kernel, gf_quantile, gf_survival
from .gengamma import GGParams, gg_hazard, gg_logpdf_kernel, gg_logsf_kernel, gg_quantile, gg_survival

ArrayLike = Union[float, np.ndarray]

FAMILIES = ("gg", "gf")
PARAMETER_NAMES = {
    "gg": ("beta0", "beta1", "log_sigma", "tau"),
    "gf": ("beta0", "beta1", "log_sigma", "q", "log_p"),
}
SHAPE_STARTS = {
    "gg": ((-1.0,), (0.0,), (0.5,), (1.0,), (2.0,)),
    "gf": tuple((q, math.log(p)) for q in (-1.0, 0.0, 1.0) for p in (0.25, 1.0)),
}

MIN_EVENTS = 5
GRAD_TOL = 1e-4
_PENALTY = 1e12
_GRAD_STEP = 1e-5
_HESS_STEP = 1e-4
_RMST_EPS = 1e-8


def _family_params(family: str, theta: np.ndarray, beta: float) -> Union[GGParams, GFParams]:
    sigma = math.exp(theta[2])
    if family == "gg":
        return GGParams(beta=beta, sigma=sigma, tau=float(theta[3]))
    return GFParams(beta=beta, sigma=sigma, q=float(theta[3]), p=math.exp(theta[4]))


class AFTLogLikelihood:
    """Right-censored log-likelihood sum(log f) over events + sum(log S) over censorings.

    Called with the unconstrained vector theta = (beta0, beta1, log sigma, shapes...);
    beta = beta0 + beta1 * arm.
    """

    def __init__(self, data: SurvivalDataset, family: str):
        if family not in FAMILIES:
            raise DataError(f"Unknown AFT family '{family}'; choose from {', '.join(FAMILIES)}")
        data.require_two_arms()
        self.family = family
        self.log_t = np.log(data.time)
        self.event = data.event.astype(bool)
        self.arm = data.arm.astype(float)

    def __call__(self, theta: Sequence[float]) -> float:
        theta = np.asarray(theta, dtype=float)
        beta = theta[0] + theta[1] * self.arm
        sigma = math.exp(theta[2]) if theta[2] < 700 else float("inf")
        if not 0 < sigma < float("inf"):
            return float("-inf")
        ev, cens = self.event, ~self.event
        with np.errstate(all="ignore"):
            if self.family == "gg":
                tau = float(theta[3])
                total = (np.sum(gg_logpdf_kernel(self.log_t[ev], beta[ev], sigma, tau))
                         + np.sum(gg_logsf_kernel(self.log_t[cens], beta[cens], sigma, tau)))
            else:
                q, p = float(theta[3]), math.exp(min(theta[4], 700.0))
                total = (np.sum(gf_logpdf_kernel(self.log_t[ev], beta[ev], sigma, q, p))
                         + np.sum(gf_logsf_kernel(self.log_t[cens], beta[cens], sigma, q, p)))
        return float(total)

    def objective(self, theta: np.ndarray) -> float:
        value = self(theta)
        return -value if np.isfinite(value) else _PENALTY


def aft_loglik(theta: Sequence[float], data: SurvivalDataset, family: str) -> float:
    return AFTLogLikelihood(data, family)(theta)


def numeric_gradient(f, x: np.ndarray, rel_step: float = _GRAD_STEP) -> np.ndarray:
    """Central differences with step rel_step * max(1, |x_i|)."""
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.size):
        h = rel_step * max(1.0, abs(x[i]))
        e = np.zeros_like(x)
        e[i] = h
        grad[i] = (f(x + e) - f(x - e)) / (2.0 * h)
    return grad


def numeric_hessian(f, x: np.ndarray, rel_step: float = _HESS_STEP) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    k = x.size
    h = rel_step * np.maximum(1.0, np.abs(x))
    f0 = f(x)
    H = np.empty((k, k))
    for i in range(k):
        ei = np.zeros(k)
        ei[i] = h[i]
        H[i, i] = (f(x + ei) - 2.0 * f0 + f(x - ei)) / h[i] ** 2
        for j in range(i):
            ej = np.zeros(k)
            ej[j] = h[j]
            H[i, j] = H[j, i] = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4.0 * h[i] * h[j])
    return H


def _newton_polish(f, theta: np.ndarray, max_iter: int = 20) -> np.ndarray:
    current = f(theta)
    for _ in range(max_iter):
        grad = numeric_gradient(f, theta)
        if not np.all(np.isfinite(grad)) or np.linalg.norm(grad) < 1e-8:
            break
        H = numeric_hessian(f, theta)
        try:
            step = np.linalg.solve(-H, grad)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)) or grad @ step <= 0:
            break
        for _ in range(20):
            candidate = theta + step
            value = f(candidate)
            if np.isfinite(value) and value >= current:
                break
            step = step / 2.0
        else:
            break
        theta, current = candidate, value
    return theta


@dataclass(frozen=True, eq=False)
class AFTFit:
    family: str
    theta: np.ndarray
    covariance: np.ndarray
    loglik: float
    converged: bool
    hessian_ok: bool
    grad_norm: float
    n_events: int
    best_start: int
    start_logliks: Tuple[float, ...]

    @property
    def parameter_names(self) -> Tuple[str, ...]:
        return PARAMETER_NAMES[self.family]

    @property
    def beta0(self) -> float:
        return float(self.theta[0])

    @property
    def beta1(self) -> float:
        return float(self.theta[1])

    @property
    def sigma(self) -> float:
        return math.exp(self.theta[2])

    @property
    def params(self) -> Union[GGParams, GFParams]:
        """Family parameters for the reference arm (beta = beta0)."""
        return self.arm_params(0)

    def arm_params(self, arm: int) -> Union[GGParams, GFParams]:
        return _family_params(self.family, self.theta, self.beta0 + self.beta1 * arm)

    @property
    def standard_errors(self) -> Dict[str, float]:
        diag = np.diag(self.covariance)
        return {name: float(np.sqrt(v)) if v > 0 else float("nan") for name, v in zip(self.parameter_names, diag)}

    @property
    def var_beta1(self) -> float:
        return float(self.covariance[1, 1])

    @property
    def acceleration_factor(self) -> float:
        return math.exp(-self.beta1)

    @property
    def wald(self) -> Tuple[float, float]:
        """(W, p) for H0: beta1 = 0, W = beta1^2 / Var(beta1) ~ chi-square(1)."""
        var = self.var_beta1
        if not (np.isfinite(var) and var > 0):
            return float("nan"), float("nan")
        W = self.beta1 ** 2 / var
        return float(W), float(stats.chi2.sf(W, 1))

    def require_converged(self) -> None:
        if not self.converged:
            raise ConvergenceError(f"{self.family.upper()} fit did not converge (|grad|={self.grad_norm:.3g})")

    def to_dict(self) -> dict:
        W, p = self.wald
        return {
            "family": self.family,
            "estimates": dict(zip(self.parameter_names, (float(v) for v in self.theta))),
            "standard_errors": self.standard_errors,
            "params": self.params.to_dict(),
            "AF": self.acceleration_factor,
            "loglik": self.loglik,
            "converged": self.converged,
            "hessian_ok": self.hessian_ok,
            "wald_statistic": W,
            "wald_p": p,
        }


def aft_fit(data: SurvivalDataset, family: str = "gg",
            starts: Optional[Sequence[Sequence[float]]] = None) -> AFTFit:
    """Maximum-likelihood AFT fit with the arm indicator as covariate.

    BFGS is run from every shape start in `starts` (defaults to SHAPE_STARTS),
    the best optimum is polished by Newton steps on a central-difference
    Hessian, and the covariance is the inverse observed information.
    """
    loglik = AFTLogLikelihood(data, family)
    n_events = data.n_events
    if n_events < MIN_EVENTS:
        raise DataError(f"AFT fitting needs at least {MIN_EVENTS} events, got {n_events}")
    starts = SHAPE_STARTS[family] if starts is None else tuple(tuple(s) for s in starts)
    n_shape = len(PARAMETER_NAMES[family]) - 3
    if any(len(s) != n_shape for s in starts):
        raise DataError(f"each {family} start needs {n_shape} shape value(s)")

    beta0 = math.log(float(np.sum(data.time)) / n_events)
    start_logliks = []
    best_x, best_value, best_start = None, float("inf"), -1
    for index, shape in enumerate(starts):
        x0 = np.array([beta0, 0.0, 0.0, *shape], dtype=float)
        start_logliks.append(loglik(x0))
        with np.errstate(all="ignore"):
            res = optimize.minimize(loglik.objective, x0, method="BFGS", options={"gtol": 1e-6, "maxiter": 1000})
        if res.fun < best_value:
            best_x, best_value, best_start = res.x, float(res.fun), index

    if best_x is None or best_value >= _PENALTY:
        warnings.warn(f"{family.upper()} likelihood is not finite at any start", ConvergenceWarning)
        theta = np.array([beta0, 0.0, 0.0, *starts[0]], dtype=float)
        k = theta.size
        return AFTFit(family=family, theta=theta, covariance=np.full((k, k), np.nan), loglik=float("-inf"),
                      converged=False, hessian_ok=False, grad_norm=float("nan"), n_events=n_events,
                      best_start=-1, start_logliks=tuple(start_logliks))

    theta = _newton_polish(loglik, best_x)
    value = loglik(theta)
    grad_norm = float(np.linalg.norm(numeric_gradient(loglik, theta)))
    information = -numeric_hessian(loglik, theta)
    information = 0.5 * (information + information.T)

    hessian_ok = bool(np.all(np.isfinite(information)) and np.linalg.eigvalsh(information).min() > 0)
    if hessian_ok:
        covariance = np.linalg.inv(information)
    else:
        covariance = np.linalg.pinv(information) if np.all(np.isfinite(information)) else np.full_like(information, np.nan)
        warnings.warn(f"{family.upper()} observed information is not positive definite", ConvergenceWarning)

    converged = bool(np.isfinite(value) and grad_norm < GRAD_TOL)
    if not converged:
        warnings.warn(f"{family.upper()} fit did not converge (|grad|={grad_norm:.3g})", ConvergenceWarning)
    return AFTFit(family=family, theta=theta, covariance=covariance, loglik=value, converged=converged,
                  hessian_ok=hessian_ok, grad_norm=grad_norm, n_events=n_events, best_start=best_start,
                  start_logliks=tuple(start_logliks))


@dataclass(frozen=True)
class AFTPrediction:
    family: str
    params: Union[GGParams, GFParams]

    def survival(self, t: ArrayLike) -> ArrayLike:
        t = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t)
        out = np.ones_like(flat)
        positive = flat > 0
        if np.any(positive):
            fn = gg_survival if self.family == "gg" else gf_survival
            out[positive] = np.atleast_1d(fn(flat[positive], self.params))
        return float(out[0]) if t.ndim == 0 else out.reshape(t.shape)

    def hazard(self, t: ArrayLike) -> ArrayLike:
        fn = gg_hazard if self.family == "gg" else gf_hazard
        return fn(t, self.params)

    def quantile(self, u: ArrayLike) -> ArrayLike:
        fn = gg_quantile if self.family == "gg" else gf_quantile
        return fn(u, self.params)

    def median(self, horizon: Optional[float] = None) -> Optional[float]:
        """Parametric median; None when it lies past `horizon` (not reached within follow-up)."""
        value = float(self.quantile(0.5))
        if horizon is not None and value > horizon:
            return None
        return value

    def _integrate(self, a: float, b: float) -> float:
        value, _ = integrate.quad(lambda s: float(self.survival(s)), a, b, epsabs=_RMST_EPS, epsrel=_RMST_EPS,
                                  limit=200)
        return float(value)

    def rmst(self, t_star: float) -> float:
        return self._integrate(0.0, t_star) if t_star > 0 else 0.0

    def rmst_grid(self, times: Sequence[float]) -> np.ndarray:
        """RMST at each of the increasing `times`, integrated segment by segment."""
        times = np.asarray(times, dtype=float)
        if np.any(np.diff(times) < 0) or np.any(times < 0):
            raise DataError("RMST grid must be non-negative and increasing")
        edges = np.concatenate(([0.0], times))
        return np.cumsum([self._integrate(a, b) for a, b in zip(edges[:-1], edges[1:])])


def aft_predict(fit: AFTFit, arm: int) -> AFTPrediction:
    fit.require_converged()
    if arm not in (0, 1):
        raise DataError("arm must be 0 or 1")
    return AFTPrediction(family=fit.family, params=fit.arm_params(arm))
