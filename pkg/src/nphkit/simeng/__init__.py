from .runner import (
    BIAS_GRID_POINTS,
    BiasEstimate,
    MethodOutcome,
    ReplicationPlan,
    ReplicationResult,
    bias_grid_times,
    run_plan,
    run_replication,
)
from .scenarios import Scenario, builtin_scenarios, get_scenario, load_scenario, scenario_names
from .simulate import replication_seed, simulate_trial

__all__ = [
    'Scenario', 'builtin_scenarios', 'get_scenario', 'load_scenario', 'scenario_names',
    'replication_seed', 'simulate_trial',
    'BIAS_GRID_POINTS', 'bias_grid_times', 'ReplicationPlan', 'MethodOutcome', 'BiasEstimate',
    'ReplicationResult', 'run_replication', 'run_plan',
]
