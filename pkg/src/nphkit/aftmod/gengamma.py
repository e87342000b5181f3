"""Generalized Gamma distribution on the AFT scale, GG(beta, sigma, tau).

With w = (log t - beta) / sigma and u = tau^-2 exp(tau w), u follows a
Gamma(tau^-2, 1) law for tau != 0; tau = 0 is the log-normal limit.
Special cases: tau = sigma = 1 exponential, tau = 1 Weibull,
tau = sigma gamma, tau = 0 log-normal.
"""
import math

import numpy as np
from dataclasses import dataclass
from scipy import special
from typing import Optional, Union

from ..exceptions import DataError

ArrayLike = Union[float, np.ndarray]

TAU_EPS = 1e-5
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GGParams:
    beta: float
    sigma: float
    tau: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise DataError(f"GG scale sigma must be positive, got {self.sigma}")
        if not np.isfinite(self.beta) or not np.isfinite(self.tau):
            raise DataError("GG location and shape must be finite")

    def shifted(self, delta: float) -> "GGParams":
        return GGParams(beta=self.beta + delta, sigma=self.sigma, tau=self.tau)

    def to_dict(self) -> dict:
        return {"beta": self.beta, "sigma": self.sigma, "tau": self.tau}


def _check_time(t: ArrayLike) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise DataError("time must be positive")
    return t


def _scalar(out: np.ndarray) -> ArrayLike:
    return float(out) if np.ndim(out) == 0 else out


# Vectorized kernels on log-time; beta may vary per observation (AFT covariates).

def gg_logpdf_kernel(log_t: np.ndarray, beta: ArrayLike, sigma: float, tau: float) -> np.ndarray:
    w = (log_t - beta) / sigma
    if abs(tau) < TAU_EPS:
        return -log_t - math.log(sigma) - _HALF_LOG_2PI - 0.5 * w ** 2
    a = tau ** -2
    with np.errstate(over="ignore"):
        u = a * np.exp(tau * w)
    return (math.log(abs(tau)) - math.log(sigma) - log_t - special.gammaln(a) + a * math.log(a)
            + a * tau * w - u)


def gg_logsf_kernel(log_t: np.ndarray, beta: ArrayLike, sigma: float, tau: float) -> np.ndarray:
    w = (log_t - beta) / sigma
    if abs(tau) < TAU_EPS:
        return special.log_ndtr(-w)
    a = tau ** -2
    with np.errstate(over="ignore"):
        u = a * np.exp(tau * w)
    sf = special.gammaincc(a, u) if tau > 0 else special.gammainc(a, u)
    with np.errstate(divide="ignore"):
        return np.log(sf)


def gg_quantile_kernel(u: np.ndarray, beta: ArrayLike, sigma: float, tau: float) -> np.ndarray:
    """log t(u) for the CDF level u."""
    if abs(tau) < TAU_EPS:
        return beta + sigma * special.ndtri(u)
    a = tau ** -2
    x = special.gammaincinv(a, u if tau > 0 else 1.0 - u)
    return beta + sigma * np.log(tau ** 2 * x) / tau


def gg_density(t: ArrayLike, params: GGParams) -> ArrayLike:
    log_t = np.log(_check_time(t))
    return _scalar(np.exp(gg_logpdf_kernel(log_t, params.beta, params.sigma, params.tau)))


def gg_survival(t: ArrayLike, params: GGParams) -> ArrayLike:
    log_t = np.log(_check_time(t))
    return _scalar(np.exp(gg_logsf_kernel(log_t, params.beta, params.sigma, params.tau)))


def gg_hazard(t: ArrayLike, params: GGParams) -> ArrayLike:
    log_t = np.log(_check_time(t))
    log_h = (gg_logpdf_kernel(log_t, params.beta, params.sigma, params.tau)
             - gg_logsf_kernel(log_t, params.beta, params.sigma, params.tau))
    return _scalar(np.exp(log_h))


def gg_quantile(u: ArrayLike, params: GGParams) -> ArrayLike:
    """Time at which the CDF reaches u, so gg_survival(gg_quantile(u)) = 1 - u."""
    u = np.asarray(u, dtype=float)
    if np.any((u <= 0) | (u >= 1)):
        raise DataError("quantile level must lie in (0, 1)")
    return _scalar(np.exp(gg_quantile_kernel(u, params.beta, params.sigma, params.tau)))


def gg_median(params: GGParams) -> float:
    return gg_quantile(0.5, params)


def gg_sample(params: GGParams, size: int, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    rng = np.random.default_rng() if rng is None else rng
    u = rng.uniform(size=size)
    # uniform() can return exactly 0
    u = np.clip(u, np.finfo(float).tiny, 1.0 - np.finfo(float).eps)
    return np.exp(gg_quantile_kernel(u, params.beta, params.sigma, params.tau))
