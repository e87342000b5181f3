import math

import numpy as np
import pytest
from scipy import integrate, stats

from conftest import exponential_trial
from nphkit.exceptions import DataError, DegenerateStatisticError, NotPositiveSemidefiniteError, StatisticalWarning
from nphkit.nptests import (
    EARLY,
    LATE,
    LOGRANK,
    MAXCOMBO_WEIGHTS,
    MIDDLE,
    FHWeight,
    fh_weight_values,
    maxcombo,
    mvn_box_probability,
    weighted_logrank,
)
from nphkit.nptests.logrank import component_weights, score_terms
from nphkit.survcore import SurvivalDataset, build_event_table, km_estimate


def naive_logrank(data: SurvivalDataset):
    """Log-rank U and variance from an explicit loop over event times."""
    U = V = 0.0
    for t in np.unique(data.time[data.event]):
        at_risk = data.time >= t
        y = at_risk.sum()
        y1 = (at_risk & (data.arm == 1)).sum()
        d = ((data.time == t) & data.event).sum()
        d1 = ((data.time == t) & data.event & (data.arm == 1)).sum()
        U += d1 - d * y1 / y
        if y > 1:
            V += d * (y1 / y) * (1 - y1 / y) * (y - d) / (y - 1)
    return U, V


class TestWeights:
    def test_labels(self):
        assert [w.label for w in MAXCOMBO_WEIGHTS] == ["FH(1,0)", "FH(0,1)", "FH(1,1)"]
        assert LOGRANK.label == "FH(0,0)"

    def test_apply(self):
        s = np.array([1.0, 0.75, 0.5, 0.0])
        np.testing.assert_allclose(LOGRANK.apply(s), [1, 1, 1, 1])
        np.testing.assert_allclose(EARLY.apply(s), s)
        np.testing.assert_allclose(LATE.apply(s), 1 - s)
        np.testing.assert_allclose(MIDDLE.apply(s), s * (1 - s))
        np.testing.assert_allclose(FHWeight(2, 0.5).apply(s), s ** 2 * np.sqrt(1 - s))

    def test_negative_exponents_rejected(self):
        with pytest.raises(DataError):
            FHWeight(-1, 0)

    def test_values_use_left_limit(self, hand_dataset):
        curve = km_estimate(hand_dataset)
        times = np.array([1.0, 2.0, 3.0, 4.0])
        np.testing.assert_allclose(fh_weight_values(curve, times, LATE), [0.0, 0.25, 0.5, 0.75])
        np.testing.assert_allclose(fh_weight_values(curve, times, LATE, left_limit=False), [0.25, 0.5, 0.75, 1.0])


class TestWeightedLogrank:
    def test_hand_example(self, hand_dataset):
        result = weighted_logrank(hand_dataset)
        assert result.U == pytest.approx(-2 / 3)
        assert result.se ** 2 == pytest.approx(13 / 18)
        assert result.Z == pytest.approx((-2 / 3) / math.sqrt(13 / 18))
        assert result.p_two_sided == pytest.approx(2 * stats.norm.sf(abs(result.Z)))

    def test_hand_example_fh_weights(self, hand_dataset):
        early = weighted_logrank(hand_dataset, EARLY)
        assert early.U == pytest.approx(-0.5)
        assert early.se ** 2 == pytest.approx(7 / 16)
        late = weighted_logrank(hand_dataset, LATE)
        assert late.U == pytest.approx(-1 / 6)
        assert late.se ** 2 == pytest.approx(11 / 144)

    def test_identical_arms(self, identical_arms):
        result = weighted_logrank(identical_arms)
        assert result.U == pytest.approx(0.0, abs=1e-12)
        assert result.p_two_sided == pytest.approx(1.0)

    def test_swap_flips_sign(self):
        data = exponential_trial(80, 80, 0.1, 0.06, seed=2, followup=15.0)
        for w in (LOGRANK,) + MAXCOMBO_WEIGHTS:
            a = weighted_logrank(data, w)
            b = weighted_logrank(data.swap_arms(), w)
            assert b.Z == pytest.approx(-a.Z, rel=1e-10)
            assert b.p_two_sided == pytest.approx(a.p_two_sided, rel=1e-10)

    def test_matches_explicit_loop_with_ties(self):
        rng = np.random.default_rng(9)
        time = rng.integers(1, 15, size=120).astype(float)
        event = rng.random(120) < 0.75
        arm = rng.integers(0, 2, size=120)
        data = SurvivalDataset(time, event, arm)
        U, V = naive_logrank(data)
        result = weighted_logrank(data)
        assert result.U == pytest.approx(U, rel=1e-10)
        assert result.se == pytest.approx(math.sqrt(V), rel=1e-10)

    @pytest.mark.parametrize("c", [0.5, 7.0])
    def test_rescaled_weights_keep_z(self, c):
        data = exponential_trial(80, 80, 0.1, 0.06, seed=2, followup=15.0)
        table = build_event_table(data)
        oe, variance = score_terms(table)
        w = c * component_weights(table, [MIDDLE])[0]
        z = np.sum(w * oe) / math.sqrt(np.sum(w ** 2 * variance))
        assert z == pytest.approx(weighted_logrank(data, MIDDLE).Z, rel=1e-12)

    def test_detects_a_strong_effect(self):
        data = exponential_trial(200, 200, 0.2, 0.1, seed=4)
        result = weighted_logrank(data)
        assert result.Z < -3
        assert result.p_two_sided < 1e-3

    def test_no_events(self):
        data = SurvivalDataset.from_records([(1, 0, 0), (2, 0, 1)])
        with pytest.raises(DataError):
            weighted_logrank(data)

    def test_zero_variance_names_component(self):
        data = SurvivalDataset.from_records([(1, 1, 0), (2, 0, 0), (1, 1, 1), (2, 0, 1)])
        with pytest.raises(DegenerateStatisticError) as info:
            weighted_logrank(data, LATE)
        assert info.value.component == "FH(0,1)"


class TestMaxCombo:
    def test_components_match_single_tests(self):
        data = exponential_trial(100, 100, 0.1, 0.07, seed=21, followup=20.0)
        result = maxcombo(data)
        for component, w in zip(result.components, MAXCOMBO_WEIGHTS):
            assert component.Z == pytest.approx(weighted_logrank(data, w).Z, rel=1e-12)
        assert result.Z_max == pytest.approx(max(abs(z) for z in result.component_Z))

    def test_correlation_is_a_correlation(self):
        result = maxcombo(exponential_trial(100, 100, 0.1, 0.07, seed=21, followup=20.0))
        R = result.correlation
        np.testing.assert_allclose(np.diag(R), 1.0)
        np.testing.assert_allclose(R, R.T)
        assert np.all(np.abs(R) <= 1.0 + 1e-12)
        assert np.linalg.eigvalsh(R).min() > -1e-10

    def test_p_value_bounds(self):
        # the max of correlated statistics is less significant than its best component
        data = exponential_trial(150, 150, 0.1, 0.07, seed=5, followup=20.0)
        result = maxcombo(data)
        best = min(c.p_two_sided for c in result.components)
        assert best <= result.p_two_sided <= min(1.0, 3 * best)

    def test_identity_correlation(self):
        data = exponential_trial(150, 150, 0.1, 0.07, seed=5, followup=20.0)
        result = maxcombo(data, correlation="identity")
        expected = 1 - (2 * stats.norm.cdf(result.Z_max) - 1) ** 3
        assert result.p_two_sided == pytest.approx(expected, rel=1e-6)
        assert result.correlation_mode == "identity"

    def test_identical_arms(self, identical_arms):
        result = maxcombo(identical_arms)
        assert result.Z_max == pytest.approx(0.0, abs=1e-12)
        assert result.p_two_sided == pytest.approx(1.0)

    def test_swap_invariant(self):
        data = exponential_trial(80, 80, 0.1, 0.06, seed=2, followup=15.0)
        assert maxcombo(data.swap_arms()).p_two_sided == pytest.approx(maxcombo(data).p_two_sided, rel=1e-8)

    def test_degenerate_component(self):
        data = SurvivalDataset.from_records([(1, 1, 0), (2, 0, 0), (1, 1, 1), (2, 0, 1)])
        with pytest.raises(DegenerateStatisticError) as info:
            maxcombo(data)
        assert info.value.component == "FH(0,1)"

    def test_collinear_components_warn(self):
        # FH(0,1) and FH(1,1) only weight the second event time
        data = SurvivalDataset.from_records([(1, 1, 0), (3, 0, 0), (2, 1, 1), (3, 0, 1)])
        with pytest.warns(StatisticalWarning):
            result = maxcombo(data)
        assert result.correlation[1, 2] == pytest.approx(1.0)
        assert 0.0 <= result.p_two_sided <= 1.0

    def test_unknown_mode(self, hand_dataset):
        with pytest.raises(DataError):
            maxcombo(hand_dataset, correlation="pooled")


def exchangeable_box(rho: float, z: float, k: int) -> float:
    """Box probability for an equicorrelated normal, via its one-factor form."""
    a, b = math.sqrt(rho), math.sqrt(1 - rho)

    def integrand(x):
        inner = stats.norm.cdf((z - a * x) / b) - stats.norm.cdf((-z - a * x) / b)
        return stats.norm.pdf(x) * inner ** k

    value, _ = integrate.quad(integrand, -np.inf, np.inf, epsabs=1e-12)
    return value


class TestMvnBoxProbability:
    def test_identity(self):
        z = 2.1
        assert mvn_box_probability(np.eye(3), z) == pytest.approx((2 * stats.norm.cdf(z) - 1) ** 3, rel=1e-8)

    def test_univariate(self):
        assert mvn_box_probability(np.eye(1), 1.96) == pytest.approx(0.95, abs=1e-4)

    def test_perfect_correlation_collapses(self):
        R = np.array([[1.0, 1.0, -1.0], [1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]])
        assert mvn_box_probability(R, 1.5) == pytest.approx(2 * stats.norm.cdf(1.5) - 1, rel=1e-10)

    @pytest.mark.parametrize("rho", [0.3, 0.8])
    def test_exchangeable(self, rho):
        R = np.full((3, 3), rho)
        np.fill_diagonal(R, 1.0)
        expected = exchangeable_box(rho, 2.2, 3)
        assert mvn_box_probability(R, 2.2) == pytest.approx(expected, abs=1e-7)
        assert mvn_box_probability(R, 2.2, method="qmc", seed=3) == pytest.approx(expected, abs=2e-3)

    def test_monotone_in_z(self):
        R = np.array([[1.0, 0.5, 0.2], [0.5, 1.0, 0.6], [0.2, 0.6, 1.0]])
        values = [mvn_box_probability(R, z) for z in (1.0, 1.5, 2.0, 3.0)]
        assert values == sorted(values)
        assert 0 < values[0] and values[-1] < 1

    def test_not_psd(self):
        R = np.array([[1.0, 0.9, -0.9], [0.9, 1.0, 0.9], [-0.9, 0.9, 1.0]])
        with pytest.raises(NotPositiveSemidefiniteError):
            mvn_box_probability(R, 2.0)

    def test_bad_inputs(self):
        with pytest.raises(DataError):
            mvn_box_probability(np.eye(2), 0.0)
        with pytest.raises(DataError):
            mvn_box_probability(np.array([[1.0, 0.2], [0.3, 1.0]]), 2.0)
        with pytest.raises(DataError):
            mvn_box_probability(np.eye(2), 2.0, method="genz")
