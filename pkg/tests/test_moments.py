import math

import numpy as np
import pytest

from mbrecon import (OverflowRisk, SeriesTooShort, TimeSeries, TimeSeries2D,
                     functional_moments, functional_moments_2d,
                     moment_hierarchy, moment_hierarchy_2d)

# Even moments of the full-logistic invariant measure: central binomial / 4^k.
ARCSINE = [1.0, 0.5, 0.375, 0.3125, 35 / 128, 63 / 256, 231 / 1024]


def test_constant_series_moments():
    m = moment_hierarchy(TimeSeries([0.7] * 50), 5)
    for k in range(6):
        assert m[k] == pytest.approx(0.7 ** k, rel=1e-12)


def test_two_point_series_moments():
    m = moment_hierarchy(TimeSeries([0.0, 1.0, 0.0, 1.0]), 3)
    assert m[0] == 1.0
    assert m[1] == m[2] == m[3] == 0.5


def test_arcsine_moments(quad4):
    train, _ = quad4
    m = moment_hierarchy(train, 3)
    assert m[1] == pytest.approx(0.5, abs=0.01)
    assert m[2] == pytest.approx(0.375, abs=0.01)
    assert m[3] == pytest.approx(0.3125, abs=0.01)


def test_estimator_consistency_five_sigma(quad4):
    # Sampling error of each empirical moment within 5 sigma of the CLT scale.
    train, _ = quad4
    x = train.values
    m = moment_hierarchy(train, 6)
    for k in range(1, 7):
        band = 5.0 * float(np.std(x ** k)) / math.sqrt(len(x))
        assert abs(m[k] - ARCSINE[k]) <= band


def test_cauchy_schwarz_on_estimates(quad38):
    train, _ = quad38
    m = moment_hierarchy(train, 12)
    for k in range(1, 7):
        assert m[k] ** 2 <= m[2 * k] * (1 + 1e-12)


def test_moment_permutation_invariance(quad38):
    train, _ = quad38
    m1 = moment_hierarchy(train, 6)
    rng = np.random.default_rng(0)
    shuffled = TimeSeries(rng.permutation(train.values))
    m2 = moment_hierarchy(shuffled, 6)
    # fsum is exactly rounded, so any ordering of the same multiset agrees.
    assert np.array_equal(m1.values, m2.values)


def test_compensated_matches_naive_within_tolerance(quad38):
    train, _ = quad38
    m = moment_hierarchy(train, 8)
    for k in range(1, 9):
        naive = float(np.sum(train.values ** k)) / len(train)
        assert abs(m[k] - naive) <= 1e-10 * max(abs(naive), 1e-30)


def test_overflow_guard():
    with pytest.raises(OverflowRisk):
        moment_hierarchy(TimeSeries([10.0, 9.0]), 400)


def test_too_short():
    with pytest.raises(SeriesTooShort):
        moment_hierarchy(TimeSeries([1.0]), 2)


class TestFunctionalMoments:
    def test_constant_series(self):
        g = functional_moments(TimeSeries([0.3] * 20), 4)
        for j in range(5):
            assert g[j] == pytest.approx(0.3 ** (j + 1), rel=1e-12)

    def test_direct_sum(self):
        g = functional_moments(TimeSeries([1.0, 2.0, 3.0]), 1)
        assert g[0] == 2.5
        assert g[1] == 4.0

    def test_quad4_analytic_values(self, quad4):
        train, _ = quad4
        g = functional_moments(train, 1)
        assert g[0] == pytest.approx(0.5, abs=0.01)
        assert g[1] == pytest.approx(0.25, abs=0.01)

    def test_order_sensitivity(self):
        g_fwd = functional_moments(TimeSeries([1.0, 2.0, 3.0, 4.0]), 1)
        g_shuf = functional_moments(TimeSeries([2.0, 1.0, 4.0, 3.0]), 1)
        assert g_fwd[1] != g_shuf[1]

    def test_bounded_by_series_max(self, quad38):
        train, _ = quad38
        m = moment_hierarchy(train, 6)
        g = functional_moments(train, 6)
        top = float(np.max(np.abs(train.values)))
        for j in range(7):
            assert abs(g[j]) <= top * m[j] * (1 + 1e-9)


class TestMoments2D:
    def test_constant(self):
        m = moment_hierarchy_2d(TimeSeries2D([(0.5, 0.25)] * 10), 3)
        for (i, j), v in m.values.items():
            assert v == pytest.approx(0.5 ** i * 0.25 ** j, rel=1e-12)

    def test_two_point_cloud(self):
        m = moment_hierarchy_2d(TimeSeries2D([(1.0, 0.0), (0.0, 1.0)]), 2)
        assert m[1, 0] == 0.5
        assert m[0, 1] == 0.5
        assert m[1, 1] == 0.0

    def test_even_moments_nonnegative(self, henon):
        train, _ = henon
        m = moment_hierarchy_2d(train, 4)
        assert m[2, 0] >= 0.0
        assert m[0, 2] >= 0.0
        assert m[2, 2] >= 0.0

    def test_henon_marginal_relation(self, henon):
        # The second component is 0.3 times the previous first component, so
        # the marginal moments agree up to one boundary term.
        train, _ = henon
        m = moment_hierarchy_2d(train, 2)
        assert m[0, 1] == pytest.approx(0.3 * m[1, 0], abs=0.005)


class TestFunctionalMoments2D:
    def test_constant(self):
        g = functional_moments_2d(TimeSeries2D([(0.5, 0.25)] * 10), 2)
        for (s, h, k), v in g.values.items():
            extra = 0.5 if s == 1 else 0.25
            assert v == pytest.approx(extra * 0.5 ** h * 0.25 ** k, rel=1e-12)

    def test_direct_sum(self):
        g = functional_moments_2d(TimeSeries2D([(1.0, 2.0), (3.0, 4.0)]), 2)
        assert g[1, 0, 0] == 3.0
        assert g[2, 1, 1] == 8.0

    def test_henon_component_relation(self, henon):
        train, _ = henon
        m = moment_hierarchy_2d(train, 3)
        g = functional_moments_2d(train, 2)
        for h, k in ((0, 0), (1, 0), (0, 1), (1, 1)):
            assert g[2, h, k] == pytest.approx(0.3 * m[h + 1, k], abs=0.005)
