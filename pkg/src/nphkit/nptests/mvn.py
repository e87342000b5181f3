"""Probability that a centred normal vector lies in a symmetric box."""
import math

import numpy as np
from scipy import integrate, stats
from scipy.special import ndtr
from typing import Optional

from ..exceptions import DataError, NotPositiveSemidefiniteError

_PSD_TOL = 1e-8
_DEGENERATE_SD = 1e-10
_QUAD_EPS = 1e-10
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _validate(correlation: np.ndarray) -> np.ndarray:
    R = np.asarray(correlation, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise DataError("correlation must be a square matrix")
    if not np.allclose(R, R.T, atol=1e-12):
        raise DataError("correlation must be symmetric")
    if not np.allclose(np.diag(R), 1.0, atol=1e-12):
        raise DataError("correlation must have a unit diagonal")
    if np.linalg.eigvalsh(R).min() < -_PSD_TOL:
        raise NotPositiveSemidefiniteError("correlation matrix is not positive semidefinite")
    return R


def _drop_duplicates(R: np.ndarray) -> np.ndarray:
    # |Z_j| <= z is the same event as |Z_i| <= z when Z_j = +-Z_i
    keep = []
    for j in range(R.shape[0]):
        if not any(abs(R[i, j]) > 1.0 - 1e-12 for i in keep):
            keep.append(j)
    return R[np.ix_(keep, keep)]


def _interval_probability(mean: float, sd: float, z: float) -> float:
    if sd < _DEGENERATE_SD:
        return float(abs(mean) <= z)
    return float(ndtr((z - mean) / sd) - ndtr((-z - mean) / sd))


def _box_probability(mean: np.ndarray, cov: np.ndarray, z: float) -> float:
    """P(|X_i| <= z for all i), X ~ N(mean, cov), by conditioning on X_0."""
    if mean.shape[0] == 1:
        return _interval_probability(mean[0], np.sqrt(max(cov[0, 0], 0.0)), z)

    var0 = cov[0, 0]
    rest_cov = cov[1:, 1:]
    if var0 < _DEGENERATE_SD ** 2:
        if abs(mean[0]) > z:
            return 0.0
        return _box_probability(mean[1:], rest_cov, z)

    sd0 = np.sqrt(var0)
    slope = cov[1:, 0] / var0
    cond_cov = rest_cov - np.outer(cov[1:, 0], cov[1:, 0]) / var0

    def integrand(x: float) -> float:
        cond_mean = mean[1:] + slope * (x - mean[0])
        density = math.exp(-0.5 * ((x - mean[0]) / sd0) ** 2) / (sd0 * _SQRT_2PI)
        return density * _box_probability(cond_mean, cond_cov, z)

    value, _ = integrate.quad(integrand, -z, z, epsabs=_QUAD_EPS, epsrel=_QUAD_EPS, limit=200)
    return float(value)


def mvn_box_probability(correlation: np.ndarray, z: float, method: str = "quadrature",
                        seed: Optional[int] = 0) -> float:
    """P(|Z_1| <= z, ..., |Z_k| <= z) for Z ~ N(0, correlation).

    `quadrature` integrates the chain of conditional normals with adaptive
    quadrature and is deterministic; `qmc` uses scipy's randomized lattice
    rule seeded with `seed`.
    """
    if not z > 0:
        raise DataError("z must be positive")
    R = _drop_duplicates(_validate(correlation))
    k = R.shape[0]

    if method == "quadrature":
        value = _box_probability(np.zeros(k), R, float(z))
    elif method == "qmc":
        if k == 1:
            value = _interval_probability(0.0, 1.0, z)
        else:
            dist = stats.multivariate_normal(mean=np.zeros(k), cov=R, allow_singular=True, seed=seed)
            upper = np.full(k, float(z))
            value = float(dist.cdf(upper, lower_limit=-upper))
    else:
        raise DataError(f"Unknown integration method '{method}'")
    return float(np.clip(value, 0.0, 1.0))
