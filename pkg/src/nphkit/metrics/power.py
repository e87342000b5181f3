import math

from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence

from ..exceptions import DataError
from ..simeng import ReplicationResult


@dataclass(frozen=True)
class PowerEstimate:
    method: str
    rejection: float
    se: float
    n_used: int
    n_failed: int

    def to_dict(self) -> dict:
        return {"method": self.method, "rejection": self.rejection, "se": self.se, "n_used": self.n_used,
                "n_failed": self.n_failed}

    @classmethod
    def from_dict(cls, data: dict) -> "PowerEstimate":
        def real(v):
            return float("nan") if v is None else float(v)

        return cls(method=data["method"], rejection=real(data["rejection"]), se=real(data["se"]),
                   n_used=int(data["n_used"]), n_failed=int(data["n_failed"]))


def power_summary(results: Iterable[ReplicationResult], alpha: float,
                  methods: Optional[Sequence[str]] = None) -> Dict[str, PowerEstimate]:
    """Fraction of successful replications with p < alpha, per method, with SE sqrt(f(1-f)/n)."""
    if not 0.0 < alpha < 1.0:
        raise DataError("alpha must lie in (0, 1)")
    rejected: Dict[str, int] = {}
    used: Dict[str, int] = {}
    failed: Dict[str, int] = {}
    n_results = 0
    for result in results:
        n_results += 1
        for outcome in result.outcomes:
            if methods is not None and outcome.method not in methods:
                continue
            used.setdefault(outcome.method, 0)
            failed.setdefault(outcome.method, 0)
            rejected.setdefault(outcome.method, 0)
            if not outcome.ok:
                failed[outcome.method] += 1
                continue
            used[outcome.method] += 1
            rejected[outcome.method] += int(outcome.p_value < alpha)
    if n_results == 0:
        raise DataError("power needs at least one replication")

    summary = {}
    for method in used:
        n = used[method]
        if n:
            f = rejected[method] / n
            se = math.sqrt(f * (1.0 - f) / n)
        else:
            f = se = float("nan")
        summary[method] = PowerEstimate(method=method, rejection=f, se=se, n_used=n, n_failed=failed[method])
    return summary
