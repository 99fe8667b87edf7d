"""Task outage, outage probability, epsilon-capacity, and the region boundary."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from wdl.outage import (
    BoundaryEstimate,
    OutageRecord,
    achievable_boundary,
    epsilon_capacity,
    outage_indicator,
    outage_probability,
)


class TestIndicator:
    def test_inside(self):
        assert outage_indicator(0.3, 0.3, 0.1) == 0

    def test_boundary_inclusive(self):
        assert outage_indicator(0.4, 0.3, 0.1) == 1

    def test_far_outside(self):
        assert outage_indicator(0.5, 0.3, 0.1) == 1

    def test_negative_bound_rejected(self):
        with pytest.raises(ValueError):
            outage_indicator(0.5, 0.3, -0.1)


class TestOutageProbability:
    def test_all_clear(self):
        assert outage_probability([0, 0, 0, 0]).value == 0.0

    def test_counting(self):
        est = outage_probability([1, 0, 1, 0])
        assert est.value == 0.5
        assert est.std_error == pytest.approx(np.sqrt(0.25 / 4))

    def test_accepts_records(self):
        records = [
            OutageRecord(0.4, 0.3, 0.05, outage_indicator(0.4, 0.3, 0.05), 2.0, 0),
            OutageRecord(0.31, 0.3, 0.05, outage_indicator(0.31, 0.3, 0.05), 2.0, 1),
        ]
        assert outage_probability(records).value == 0.5

    def test_two_tailed_gaussian(self):
        # losses ~ N(L, (G/2)^2): P(|l - L| >= G) = 2 Phi(-2)
        rng = np.random.default_rng(0)
        l_hat, g_hat, n = 0.5, 0.2, 10**5
        losses = rng.normal(l_hat, g_hat / 2, n)
        flags = (np.abs(losses - l_hat) >= g_hat).astype(int)
        est = outage_probability(flags)
        expected = 2 * stats.norm.cdf(-2.0)
        assert expected == pytest.approx(0.04550, abs=5e-6)
        assert abs(est.value - expected) < 3 * np.sqrt(expected * (1 - expected) / n)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            outage_probability([])


class TestEpsilonCapacity:
    def test_zero_epsilon_returns_capacity(self):
        assert epsilon_capacity(3.4594, 0.0) == 3.4594

    def test_reference_values(self):
        assert epsilon_capacity(2.0574, 0.2881) == pytest.approx(2.8900, abs=5e-4)
        assert epsilon_capacity(3.4594, 0.2697) == pytest.approx(4.7369, abs=5e-4)

    @given(eps=st.floats(0.0, 0.99, exclude_max=False))
    @settings(max_examples=50, deadline=None)
    def test_dominates_capacity(self, eps):
        assert epsilon_capacity(2.0, eps) >= 2.0

    def test_strictly_increasing_in_epsilon(self):
        values = [epsilon_capacity(2.0, e) for e in np.linspace(0.0, 0.9, 25)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_epsilon_one_rejected(self):
        with pytest.raises(ValueError):
            epsilon_capacity(2.0, 1.0)
        with pytest.raises(ValueError):
            epsilon_capacity(2.0, -0.1)


class TestAchievableBoundary:
    def test_all_in_region(self):
        est = achievable_boundary([1, 2, 4], [0.3, 0.3, 0.3], 0.3, 0.5)
        assert est.rate == 4.0
        assert est.refined == 4.0
        assert est.in_region.all()

    def test_interpolated_crossing(self):
        l_hat, g_hat = 0.3, 0.1
        est = achievable_boundary([2, 4], [l_hat, l_hat + 2 * g_hat], l_hat, g_hat)
        assert est.rate == 2.0
        assert est.refined == pytest.approx(3.0)

    def test_no_region(self):
        est = achievable_boundary([1, 2], [2.0, 3.0], 0.0, 0.1)
        assert est.rate is None
        assert est.refined is None
        assert est.diagnostic

    def test_unsorted_input_handled(self):
        est = achievable_boundary([4, 2], [0.5, 0.3], 0.3, 0.1)
        assert est.rate == 2.0

    def test_needs_two_points(self):
        with pytest.raises(ValueError):
            achievable_boundary([2.0], [0.3], 0.3, 0.1)
