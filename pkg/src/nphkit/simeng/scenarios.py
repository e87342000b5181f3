"""Trial scenarios: the three case studies, the null and the cancel-out designs."""
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Union

from ..exceptions import DataError
from ..helper import load_json
from ..survcore import PiecewiseExpSpec


@dataclass(frozen=True)
class Scenario:
    name: str
    arm0: PiecewiseExpSpec
    arm1: PiecewiseExpSpec
    n0: int
    n1: int
    followup: float
    random_censor_rate: float = 0.0
    alpha: float = 0.05
    description: str = ""

    def __post_init__(self):
        if not self.name:
            raise DataError("scenario name must not be empty")
        if self.n0 < 2 or self.n1 < 2:
            raise DataError(f"scenario '{self.name}': each arm needs at least 2 subjects")
        if not self.followup > 0:
            raise DataError(f"scenario '{self.name}': followup must be positive")
        if self.random_censor_rate < 0:
            raise DataError(f"scenario '{self.name}': censoring rate must be >= 0")
        if not 0.0 < self.alpha < 1.0:
            raise DataError(f"scenario '{self.name}': alpha must lie in (0, 1)")

    @property
    def n_total(self) -> int:
        return self.n0 + self.n1

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "description": self.description,
            "arm0": self.arm0.to_dict(),
            "arm1": self.arm1.to_dict(),
            "n0": self.n0,
            "n1": self.n1,
            "followup": self.followup,
            "random_censor_rate": self.random_censor_rate,
            "alpha": self.alpha,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "Scenario":
        try:
            return cls(
                name=str(data["name"]),
                arm0=PiecewiseExpSpec.from_dict(data["arm0"]),
                arm1=PiecewiseExpSpec.from_dict(data["arm1"]),
                n0=int(data["n0"]),
                n1=int(data["n1"]),
                followup=float(data["followup"]),
                random_censor_rate=float(data.get("random_censor_rate", 0.0)),
                alpha=float(data.get("alpha", 0.05)),
                description=str(data.get("description", "")),
            )
        except DataError:
            raise
        except KeyError as e:
            raise DataError(f"scenario config is missing field {e}")
        except (TypeError, ValueError) as e:
            raise DataError(f"invalid scenario config: {e}")


def _cancel_out(name: str, knots, hazard_ratios, description: str) -> Scenario:
    control = PiecewiseExpSpec.from_hazard_ratios(0.1, knots, [1.0] * len(hazard_ratios))
    treatment = PiecewiseExpSpec.from_hazard_ratios(0.1, knots, hazard_ratios)
    return Scenario(name=name, arm0=control, arm1=treatment, n0=500, n1=500, followup=24.0,
                    random_censor_rate=0.01, description=description)


def builtin_scenarios() -> List[Scenario]:
    return [
        Scenario(
            name="first",
            arm0=PiecewiseExpSpec((0, 8, 20, 30, 60), (0.028, 0.033, 0.050, 0.015)),
            arm1=PiecewiseExpSpec((0, 8, 20, 30, 60), (0.031, 0.027, 0.022, 0.009)),
            n0=541, n1=541, followup=60.0,
            description="FIRST: delayed treatment effect",
        ),
        Scenario(
            name="inovate",
            arm0=PiecewiseExpSpec((0, 4, 8, 12, 16, 42), (0.106, 0.100, 0.075, 0.144, 0.144)),
            arm1=PiecewiseExpSpec((0, 4, 8, 12, 16, 42), (0.068, 0.122, 0.083, 0.040, 0.020)),
            n0=163, n1=163, followup=42.0,
            description="INO-VATE: crossing survival curves",
        ),
        Scenario(
            name="gog0218",
            arm0=PiecewiseExpSpec((0, 6, 15, 20, 30, 42), (0.023, 0.097, 0.061, 0.032, 0.017)),
            arm1=PiecewiseExpSpec((0, 6, 15, 20, 30, 42), (0.015, 0.044, 0.065, 0.150, 0.055)),
            n0=624, n1=624, followup=42.0,
            description="GOG-0218: diminishing treatment effect",
        ),
        Scenario(
            name="null",
            arm0=PiecewiseExpSpec.exponential(0.1),
            arm1=PiecewiseExpSpec.exponential(0.1),
            n0=163, n1=163, followup=42.0,
            description="No treatment effect, exponential rate 0.1 in both arms",
        ),
        _cancel_out("cancel1", (0, 6, 10, 24), (1.3, 0.1, 1.1), "Cancel-out effect, mild"),
        _cancel_out("cancel2", (0, 5, 12, 24), (1.6, 0.1, 1.2), "Cancel-out effect, moderate"),
        _cancel_out("cancel3", (0, 4, 13, 24), (2.0, 0.1, 1.3), "Cancel-out effect, strong"),
    ]


def scenario_names() -> List[str]:
    return [s.name for s in builtin_scenarios()]


def get_scenario(name: str) -> Scenario:
    key = name.lower().replace("-", "").replace("_", "")
    for scenario in builtin_scenarios():
        if scenario.name == key:
            return scenario
    raise DataError(f"Unknown scenario '{name}'; builtins are {', '.join(scenario_names())}")


def load_scenario(name_or_path: Union[str, Path]) -> Scenario:
    """A builtin scenario by name, or a scenario JSON file."""
    path = Path(name_or_path)
    if path.suffix.lower() != ".json" and not path.is_file():
        return get_scenario(str(name_or_path))
    data = load_json(path)
    if not isinstance(data, dict):
        raise DataError(f"{path}: a scenario config must be a JSON object")
    return Scenario.from_dict(data)
