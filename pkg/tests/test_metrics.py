import math

import numpy as np
import pandas as pd
import pytest

from nphkit.exceptions import DataError
from nphkit.metrics import (
    TIDY_COLUMNS,
    BiasGrid,
    PowerEstimate,
    ScenarioReport,
    bias_curves,
    build_report,
    power_summary,
    true_theta,
)
from nphkit.simeng import (
    BiasEstimate,
    MethodOutcome,
    ReplicationPlan,
    ReplicationResult,
    Scenario,
    bias_grid_times,
    get_scenario,
    run_plan,
)
from nphkit.survcore import PiecewiseExpSpec, pwexp_rmst


def outcome(rep, method, p):
    if p is None:
        return MethodOutcome(rep=rep, method=method, ok=False, error="DataError: no events")
    return MethodOutcome(rep=rep, method=method, ok=True, statistic=1.0, p_value=p, reject=p < 0.05)


@pytest.fixture
def fake_results():
    p_logrank = [0.01, 0.2, 0.03, None]
    p_rmst = [0.5, 0.6, 0.001, 0.04]
    return [ReplicationResult(rep=i, outcomes=(outcome(i, "logrank", a), outcome(i, "rmst_diff", b)))
            for i, (a, b) in enumerate(zip(p_logrank, p_rmst))]


class TestPower:
    def test_rejection_fraction(self, fake_results):
        summary = power_summary(fake_results, 0.05)
        logrank = summary["logrank"]
        assert logrank.rejection == pytest.approx(2 / 3)
        assert logrank.se == pytest.approx(math.sqrt(2 / 3 * 1 / 3 / 3))
        assert (logrank.n_used, logrank.n_failed) == (3, 1)
        assert summary["rmst_diff"].rejection == pytest.approx(0.5)

    def test_alpha_changes_decisions(self, fake_results):
        assert power_summary(fake_results, 0.001)["rmst_diff"].rejection == 0.0
        assert power_summary(fake_results, 0.5)["rmst_diff"].rejection == 0.5

    def test_method_filter(self, fake_results):
        assert list(power_summary(fake_results, 0.05, methods=("rmst_diff",))) == ["rmst_diff"]

    def test_all_failed(self):
        results = [ReplicationResult(rep=0, outcomes=(outcome(0, "gf", None),))]
        estimate = power_summary(results, 0.05)["gf"]
        assert estimate.n_used == 0 and estimate.n_failed == 1
        assert math.isnan(estimate.rejection)

    def test_invalid(self, fake_results):
        with pytest.raises(DataError):
            power_summary([], 0.05)
        with pytest.raises(DataError):
            power_summary(fake_results, 1.0)

    def test_dict_form(self):
        estimate = PowerEstimate(method="logrank", rejection=0.8, se=0.01, n_used=100, n_failed=2)
        assert PowerEstimate.from_dict(estimate.to_dict()) == estimate


class TestTruth:
    def test_null_scenario(self):
        truth = true_theta(get_scenario("null"), bias_grid_times(42.0))
        np.testing.assert_allclose(truth.rmst_diff, 0.0, atol=1e-12)
        np.testing.assert_allclose(truth.surv_diff, 0.0, atol=1e-12)
        assert truth.median0 == pytest.approx(math.log(2) / 0.1)

    def test_scalar_time(self):
        scenario = get_scenario("first")
        truth = true_theta(scenario, 60.0)
        assert isinstance(truth.rmst_diff, float)
        assert truth.rmst_diff == pytest.approx(pwexp_rmst(scenario.arm1, 60.0) - pwexp_rmst(scenario.arm0, 60.0))
        assert truth.surv_diff == pytest.approx(scenario.arm1.survival(60.0) - scenario.arm0.survival(60.0))

    def test_cancel_out_crosses_zero(self):
        truth = true_theta(get_scenario("cancel3"), bias_grid_times(24.0))
        # early harm then late benefit
        assert truth.surv_diff[0] < 0 < truth.surv_diff[-1]

    def test_outside_followup(self):
        with pytest.raises(DataError):
            true_theta(get_scenario("null"), [0.0, 10.0])
        with pytest.raises(DataError):
            true_theta(get_scenario("null"), 43.0)


def bias_result(rep, times, offset, median0=5.0, median1=None, ok=True):
    if not ok:
        est = BiasEstimate(rep=rep, model="cox", ok=False, error="ConvergenceError: monotone")
    else:
        est = BiasEstimate(rep=rep, model="cox", ok=True, rmst_diff=np.full(len(times), offset),
                           surv_diff=np.full(len(times), offset / 10), median0=median0, median1=median1)
    return ReplicationResult(rep=rep, outcomes=(), bias=(est,))


class TestBias:
    def test_grid_must_have_thirty_points(self):
        with pytest.raises(DataError):
            BiasGrid(times=np.linspace(1, 10, 10), estimates={}, medians={})

    def test_curves_against_truth(self):
        times = bias_grid_times(42.0)
        results = [bias_result(0, times, 1.0), bias_result(1, times, 2.0), bias_result(2, times, 6.0),
                   bias_result(3, times, 0.0, ok=False)]
        grid = BiasGrid.from_results(times, results)
        assert grid.n_used("cox") == 3
        truth = true_theta(get_scenario("null"), times)
        curves = bias_curves(grid, truth)["cox"]
        np.testing.assert_allclose(curves.median_bias["rmst_diff"], 2.0, atol=1e-12)
        np.testing.assert_allclose(curves.mean_bias["rmst_diff"], 3.0, atol=1e-12)
        np.testing.assert_allclose(curves.median_bias["surv_diff"], 0.2, atol=1e-12)
        assert curves.n_failed == 1
        assert curves.mst_median_bias[0] == pytest.approx(5.0 - math.log(2) / 0.1)
        assert curves.mst_not_reached == {0: 0, 1: 3}
        assert curves.mst_median_bias[1] is None

    def test_replication_order_does_not_matter(self):
        times = bias_grid_times(42.0)
        rng = np.random.default_rng(4)
        results = [bias_result(i, times, offset, median0=m0, median1=None if i % 3 == 0 else 8.0 + i,
                               ok=i != 5)
                   for i, (offset, m0) in enumerate(zip(rng.normal(size=12), rng.uniform(3, 9, size=12)))]
        shuffled = [results[i] for i in rng.permutation(len(results))]
        truth = true_theta(get_scenario("null"), times)
        forward = bias_curves(BiasGrid.from_results(times, results), truth)["cox"]
        backward = bias_curves(BiasGrid.from_results(times, shuffled), truth)["cox"]
        assert forward.to_dict() == backward.to_dict()
        assert (backward.n_used, backward.n_failed) == (11, 1)

    def test_model_without_successes_is_absent(self):
        times = bias_grid_times(42.0)
        grid = BiasGrid.from_results(times, [bias_result(0, times, 0.0, ok=False)])
        assert bias_curves(grid, true_theta(get_scenario("null"), times)) == {}


@pytest.fixture(scope="module")
def small_report():
    scenario = Scenario(name="small", arm0=PiecewiseExpSpec((0, 6), (0.1, 0.15)),
                        arm1=PiecewiseExpSpec((0, 6), (0.1, 0.05)), n0=60, n1=60, followup=24.0)
    plan = ReplicationPlan(scenario, n_reps=3, methods=("logrank", "rmst_diff"), bias_models=("cox",))
    return build_report(plan, run_plan(plan))


class TestReport:
    def test_contents(self, small_report):
        assert small_report.scenario == "small"
        assert small_report.n_reps == 3
        assert set(small_report.power) == {"logrank", "rmst_diff"}
        assert len(small_report.bias_times) == 30
        assert set(small_report.bias) | set(small_report.absent_models) == {"cox"}

    def test_json_round_trip(self, small_report, tmp_path):
        path = tmp_path / "report.json"
        small_report.to_json(path)
        loaded = ScenarioReport.from_json(path)
        assert loaded.to_dict() == small_report.to_dict()

    def test_tidy_frame(self, small_report):
        frame = small_report.to_tidy_frame()
        assert tuple(frame.columns) == TIDY_COLUMNS
        rejection = frame[(frame.method == "logrank") & (frame.metric == "rejection")]
        assert len(rejection) == 1
        assert rejection.value.iloc[0] == pytest.approx(small_report.power["logrank"].rejection)
        truth = frame[(frame.method == "truth") & (frame.metric == "rmst_diff")]
        assert len(truth) == 30

    def test_csv(self, small_report, tmp_path):
        path = tmp_path / "report.csv"
        small_report.write(path, "csv")
        frame = pd.read_csv(path)
        assert list(frame.columns) == list(TIDY_COLUMNS)
        with pytest.raises(DataError):
            small_report.write(path, "xlsx")

    def test_not_a_report(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(DataError):
            ScenarioReport.from_json(path)
        with pytest.raises(DataError):
            ScenarioReport.from_dict({"scenario": "x"})

    def test_rejection_out_of_range(self):
        with pytest.raises(DataError):
            ScenarioReport(scenario="x", n_reps=1, base_seed=7, alpha=0.05,
                           power={"logrank": PowerEstimate("logrank", 1.5, 0.0, 1, 0)})
