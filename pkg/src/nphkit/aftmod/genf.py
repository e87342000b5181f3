"""Generalized F distribution in the (beta, sigma, q, p) parameterization.

delta = sqrt(q^2 + 2p), m1 = 2 / (q^2 + 2p + q delta), m2 = 2 / (q^2 + 2p - q delta).
For p > 0 both m1 and m2 are positive. p = 0 is the Generalized Gamma
boundary with tau = q; q = 0, p = 1 is log-logistic.
"""
import math

import numpy as np
from dataclasses import dataclass
from scipy import optimize, special
from typing import Union

from ..exceptions import DataError
from .gengamma import (
    ArrayLike,
    GGParams,
    _check_time,
    _scalar,
    gg_logpdf_kernel,
    gg_logsf_kernel,
    gg_quantile_kernel,
)

P_EPS = 1e-8
_QUANTILE_XTOL = 1e-10


@dataclass(frozen=True)
class GFParams:
    beta: float
    sigma: float
    q: float
    p: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise DataError(f"GF scale sigma must be positive, got {self.sigma}")
        if not self.p >= 0:
            raise DataError(f"GF shape p must be non-negative, got {self.p}")
        if not np.isfinite(self.beta) or not np.isfinite(self.q) or not np.isfinite(self.p):
            raise DataError("GF parameters must be finite")

    @property
    def is_gg_boundary(self) -> bool:
        return self.p < P_EPS

    @property
    def delta(self) -> float:
        return math.sqrt(self.q ** 2 + 2.0 * self.p)

    @property
    def m1(self) -> float:
        return _shapes(self.q, self.p)[1]

    @property
    def m2(self) -> float:
        return _shapes(self.q, self.p)[2]

    def as_gg(self) -> GGParams:
        return GGParams(beta=self.beta, sigma=self.sigma, tau=self.q)

    def shifted(self, delta: float) -> "GFParams":
        return GFParams(beta=self.beta + delta, sigma=self.sigma, q=self.q, p=self.p)

    def to_dict(self) -> dict:
        return {"beta": self.beta, "sigma": self.sigma, "q": self.q, "p": self.p}


def _shapes(q: float, p: float):
    tmp = q ** 2 + 2.0 * p
    delta = math.sqrt(tmp)
    if p < P_EPS:
        return delta, float("inf"), float("inf")
    # (tmp + q delta)(tmp - q delta) = 2 p tmp; use it for the side that cancels
    plus, minus = tmp + q * delta, tmp - q * delta
    if q >= 0:
        return delta, 2.0 / plus, plus / (p * tmp)
    return delta, minus / (p * tmp), 2.0 / minus


def gf_logpdf_kernel(log_t: np.ndarray, beta: ArrayLike, sigma: float, q: float, p: float) -> np.ndarray:
    if p < P_EPS:
        return gg_logpdf_kernel(log_t, beta, sigma, q)
    delta, m1, m2 = _shapes(q, p)
    dw = delta * (log_t - beta) / sigma
    log_ratio = math.log(m1) - math.log(m2)
    return (math.log(delta) + m1 * dw + m1 * log_ratio - math.log(sigma) - log_t
            - (m1 + m2) * np.logaddexp(0.0, log_ratio + dw) - special.betaln(m1, m2))


def gf_logsf_kernel(log_t: np.ndarray, beta: ArrayLike, sigma: float, q: float, p: float) -> np.ndarray:
    if p < P_EPS:
        return gg_logsf_kernel(log_t, beta, sigma, q)
    delta, m1, m2 = _shapes(q, p)
    dw = delta * (log_t - beta) / sigma
    # m2 / (m2 + m1 e^dw) written as a logistic to avoid overflow
    z = special.expit(-(math.log(m1) - math.log(m2) + dw))
    with np.errstate(divide="ignore"):
        return np.log(special.betainc(m2, m1, z))


def _closed_form_log_quantile(u: float, params: GFParams) -> float:
    delta, m1, m2 = _shapes(params.q, params.p)
    z = special.betaincinv(m2, m1, 1.0 - u)
    if not 0.0 < z < 1.0:
        return params.beta
    dw = math.log(m2) - math.log(m1) + math.log1p(-z) - math.log(z)
    return params.beta + params.sigma * dw / delta


def _log_quantile(u: float, params: GFParams) -> float:
    """Root of log S(e^x) = log(1 - u) in log-time, bracketed around the closed-form guess."""
    target = math.log1p(-u)

    def f(x: float) -> float:
        return float(gf_logsf_kernel(np.asarray(x), params.beta, params.sigma, params.q, params.p)) - target

    x0 = _closed_form_log_quantile(u, params)
    if not np.isfinite(x0):
        x0 = params.beta
    step = max(params.sigma, 1e-3)
    lo, hi = x0 - step, x0 + step
    # S is decreasing: f(lo) > 0 > f(hi) once bracketed
    for _ in range(200):
        if f(lo) > 0:
            break
        lo -= step
        step *= 2.0
    step = max(params.sigma, 1e-3)
    for _ in range(200):
        if f(hi) < 0:
            break
        hi += step
        step *= 2.0
    return optimize.brentq(f, lo, hi, xtol=_QUANTILE_XTOL, rtol=4 * np.finfo(float).eps, maxiter=500)


def gf_density(t: ArrayLike, params: GFParams) -> ArrayLike:
    log_t = np.log(_check_time(t))
    return _scalar(np.exp(gf_logpdf_kernel(log_t, params.beta, params.sigma, params.q, params.p)))


def gf_survival(t: ArrayLike, params: GFParams) -> ArrayLike:
    log_t = np.log(_check_time(t))
    return _scalar(np.exp(gf_logsf_kernel(log_t, params.beta, params.sigma, params.q, params.p)))


def gf_hazard(t: ArrayLike, params: GFParams) -> ArrayLike:
    log_t = np.log(_check_time(t))
    log_h = (gf_logpdf_kernel(log_t, params.beta, params.sigma, params.q, params.p)
             - gf_logsf_kernel(log_t, params.beta, params.sigma, params.q, params.p))
    return _scalar(np.exp(log_h))


def gf_quantile(u: ArrayLike, params: GFParams) -> ArrayLike:
    """Time at which the CDF reaches u."""
    u_arr = np.asarray(u, dtype=float)
    if np.any((u_arr <= 0) | (u_arr >= 1)):
        raise DataError("quantile level must lie in (0, 1)")
    if params.is_gg_boundary:
        return _scalar(np.exp(gg_quantile_kernel(u_arr, params.beta, params.sigma, params.q)))
    out = np.exp(np.array([_log_quantile(float(v), params) for v in u_arr.ravel()])).reshape(u_arr.shape)
    return _scalar(out)


def gf_median(params: GFParams) -> float:
    return gf_quantile(0.5, params)
