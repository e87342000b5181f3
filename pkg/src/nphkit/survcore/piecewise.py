"""Piecewise-exponential survival: closed-form truth functions and sampling."""
import numpy as np
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple, Union

from ..exceptions import DataError

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class PiecewiseExpSpec:
    """Constant hazard `rates[j]` on each interval starting at `knots[j]`.

    `knots` either lists the interval starts (one per rate) or also carries the
    nominal end of the last interval, as the case-study tables print it. The
    last interval is unbounded either way.
    """

    knots: Tuple[float, ...]
    rates: Tuple[float, ...]

    def __post_init__(self):
        knots = tuple(float(k) for k in self.knots)
        rates = tuple(float(r) for r in self.rates)
        if not rates:
            raise DataError("a piecewise-exponential spec needs at least one rate")
        if len(knots) not in (len(rates), len(rates) + 1):
            raise DataError(f"{len(knots)} knots do not match {len(rates)} rates")
        if knots[0] != 0.0:
            raise DataError("the first knot must be 0")
        if any(b <= a for a, b in zip(knots, knots[1:])):
            raise DataError("knots must be strictly increasing")
        if any(not np.isfinite(r) or r <= 0 for r in rates):
            raise DataError("all hazard rates must be positive")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "rates", rates)

    @classmethod
    def exponential(cls, rate: float) -> "PiecewiseExpSpec":
        return cls((0.0,), (rate,))

    @classmethod
    def from_hazard_ratios(cls, base_rate: float, knots: Sequence[float], hazard_ratios: Sequence[float]) -> "PiecewiseExpSpec":
        return cls(tuple(knots), tuple(base_rate * hr for hr in hazard_ratios))

    @property
    def starts(self) -> np.ndarray:
        return np.asarray(self.knots[:len(self.rates)])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(np.append(self.starts, np.inf))

    def hazard_at_starts(self) -> np.ndarray:
        finite = np.asarray(self.rates[:-1]) * self.widths[:-1]
        return np.concatenate(([0.0], np.cumsum(finite)))

    def hazard(self, t: ArrayLike) -> ArrayLike:
        idx = np.searchsorted(self.starts, t, side="right") - 1
        out = np.asarray(self.rates)[np.maximum(idx, 0)]
        return float(out) if np.ndim(out) == 0 else out

    def cumulative_hazard(self, t: ArrayLike) -> ArrayLike:
        t = np.asarray(t, dtype=float)
        exposure = np.clip(t[..., None] - self.starts, 0.0, self.widths)
        out = exposure @ np.asarray(self.rates)
        return float(out) if out.ndim == 0 else out

    def survival(self, t: ArrayLike) -> ArrayLike:
        out = np.exp(-np.asarray(self.cumulative_hazard(t)))
        return float(out) if out.ndim == 0 else out

    def inverse_cumulative_hazard(self, target: ArrayLike) -> ArrayLike:
        target = np.asarray(target, dtype=float)
        at_starts = self.hazard_at_starts()
        idx = np.searchsorted(at_starts, target, side="right") - 1
        out = self.starts[idx] + (target - at_starts[idx]) / np.asarray(self.rates)[idx]
        return float(out) if out.ndim == 0 else out

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Event times by inversion of the cumulative hazard."""
        u = rng.random(size)
        return np.asarray(self.inverse_cumulative_hazard(-np.log1p(-u)))

    def hazard_ratios(self, other: "PiecewiseExpSpec") -> np.ndarray:
        """Rate ratio other/self per interval; both specs must share their knots."""
        if self.starts.shape != other.starts.shape or not np.allclose(self.starts, other.starts):
            raise DataError("hazard ratios need specs with identical intervals")
        return np.asarray(other.rates) / np.asarray(self.rates)

    def to_dict(self) -> Dict:
        return {"knots": list(self.knots), "rates": list(self.rates)}

    @classmethod
    def from_dict(cls, data: Dict) -> "PiecewiseExpSpec":
        try:
            return cls(tuple(data["knots"]), tuple(data["rates"]))
        except (KeyError, TypeError) as e:
            raise DataError(f"invalid piecewise-exponential spec: {e}")


def pwexp_survival(spec: PiecewiseExpSpec, t: ArrayLike) -> ArrayLike:
    """S(t) = exp(-Lambda(t))."""
    if np.any(np.asarray(t) < 0):
        raise DataError("t must be >= 0")
    return spec.survival(t)


def pwexp_rmst(spec: PiecewiseExpSpec, t_star: float) -> float:
    """Closed-form area under S on [0, t_star]."""
    if t_star <= 0:
        return 0.0
    starts = spec.starts
    ends = np.minimum(np.append(starts[1:], np.inf), t_star)
    rates = np.asarray(spec.rates)
    inside = starts < t_star
    s_start = np.exp(-spec.hazard_at_starts())
    lengths = ends[inside] - starts[inside]
    pieces = s_start[inside] * -np.expm1(-rates[inside] * lengths) / rates[inside]
    return float(np.sum(pieces))


def pwexp_quantile(spec: PiecewiseExpSpec, u: ArrayLike) -> ArrayLike:
    """Smallest t with 1 - S(t) >= u."""
    u_arr = np.asarray(u, dtype=float)
    if np.any((u_arr <= 0) | (u_arr >= 1)):
        raise DataError("u must lie strictly between 0 and 1")
    return spec.inverse_cumulative_hazard(-np.log1p(-u_arr))
