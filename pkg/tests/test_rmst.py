import math

import numpy as np
import pytest

from conftest import exponential_trial
from nphkit.exceptions import DataError, DegenerateStatisticError
from nphkit.rmst import rmst_difference_test, rmst_estimate, select_t_star
from nphkit.survcore import PiecewiseExpSpec, SurvivalDataset, km_estimate, pwexp_rmst


def test_single_sample_area_and_variance():
    data = SurvivalDataset.from_arrays([1, 2, 3], [1, 1, 1])
    mu, var = rmst_estimate(data, 3.0)
    assert mu == pytest.approx(2.0)
    # the last row (everyone at risk fails) contributes nothing
    assert var == pytest.approx(2 / 9)


def test_area_is_linear_after_last_step():
    data = SurvivalDataset.from_arrays([1, 2, 3], [1, 0, 1])
    mu, _ = rmst_estimate(data, 10.0)
    assert mu == pytest.approx(1 + 2 / 3 * 2)


def test_truncation_before_first_event():
    mu, var = rmst_estimate(SurvivalDataset.from_arrays([2, 3], [1, 1]), 1.5)
    assert mu == 1.5
    assert var == 0.0


def test_close_to_closed_form():
    data = exponential_trial(3000, 0, 0.1, 0.1, seed=8)
    mu, var = rmst_estimate(data, 10.0)
    truth = pwexp_rmst(PiecewiseExpSpec.exponential(0.1), 10.0)
    assert abs(mu - truth) < 4 * math.sqrt(var)
    assert 0 < var < 0.01


def test_hand_difference(hand_dataset):
    result = rmst_difference_test(hand_dataset)
    assert result.t_star == 3.0
    assert result.mu0 == pytest.approx(2.0)
    assert result.mu1 == pytest.approx(2.5)
    assert result.delta == pytest.approx(0.5)
    assert result.var0 == pytest.approx(0.5)
    assert result.var1 == pytest.approx(0.125)
    assert result.Z == pytest.approx(0.5 / math.sqrt(0.625))
    assert result.t_star_rule == "event"


def test_t_star_rules():
    data = SurvivalDataset.from_records([(1, 1, 0), (5, 0, 0), (2, 1, 1), (4, 1, 1)])
    assert select_t_star(data) == 1.0
    assert select_t_star(data, rule="followup") == 4.0
    with pytest.raises(DataError):
        select_t_star(data, rule="median")


def test_arm_without_events():
    data = SurvivalDataset.from_records([(1, 0, 0), (5, 0, 0), (2, 1, 1), (4, 1, 1)])
    with pytest.raises(DataError):
        rmst_difference_test(data)
    assert rmst_difference_test(data, rule="followup").t_star == 4.0


def test_fixed_t_star(hand_dataset):
    result = rmst_difference_test(hand_dataset, t_star=2.5)
    assert result.t_star_rule == "fixed"
    assert result.t_star == 2.5
    with pytest.raises(DataError):
        rmst_difference_test(hand_dataset, t_star=0.0)


def test_zero_variance(hand_dataset):
    with pytest.raises(DegenerateStatisticError) as info:
        rmst_difference_test(hand_dataset, t_star=0.5)
    assert info.value.component == "rmst_diff"


def test_swap_flips_sign():
    data = exponential_trial(60, 60, 0.1, 0.05, seed=13, followup=24.0)
    a = rmst_difference_test(data)
    b = rmst_difference_test(data.swap_arms())
    assert b.delta == pytest.approx(-a.delta)
    assert b.p_two_sided == pytest.approx(a.p_two_sided)


def test_identical_arms(identical_arms):
    result = rmst_difference_test(identical_arms)
    assert result.delta == pytest.approx(0.0, abs=1e-12)
    assert result.p_two_sided == pytest.approx(1.0)


def test_needs_two_arms():
    with pytest.raises(DataError):
        rmst_difference_test(SurvivalDataset.from_arrays([1, 2], [1, 1]))


def test_to_dict_keys(hand_dataset):
    keys = set(rmst_difference_test(hand_dataset).to_dict())
    assert keys == {"t_star", "t_star_rule", "rmst0", "rmst1", "delta", "se", "Z", "p_value"}


def step_area(curve, t_star):
    knots = np.unique(np.concatenate(([0.0], curve.time[curve.time < t_star], [t_star])))
    return float(np.sum(curve(knots[:-1]) * np.diff(knots)))


def test_area_grows_with_truncation_time():
    data = exponential_trial(60, 60, 0.1, 0.07, seed=8, followup=20.0).arm_subset(0)
    grid = np.linspace(0.5, 25.0, 50)
    mu = np.array([rmst_estimate(data, t)[0] for t in grid])
    assert np.all(np.diff(mu) >= 0)
    assert np.all(mu <= grid)


def test_uncensored_area_is_truncated_mean():
    data = exponential_trial(80, 80, 0.1, 0.07, seed=12)
    assert data.event.all()
    for arm in (0, 1):
        sample = data.arm_subset(arm)
        for t_star in (3.0, 8.0, 15.0):
            mu, _ = rmst_estimate(sample, t_star)
            assert mu == pytest.approx(np.mean(np.minimum(sample.time, t_star)), abs=1e-12)


def test_difference_is_area_between_curves():
    data = exponential_trial(70, 70, 0.1, 0.06, seed=19, followup=18.0)
    result = rmst_difference_test(data)
    expected = step_area(km_estimate(data, arm=1), result.t_star) - step_area(km_estimate(data, arm=0), result.t_star)
    assert result.delta == pytest.approx(expected, abs=1e-12)
