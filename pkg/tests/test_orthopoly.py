import math

import numpy as np
import pytest

from mbrecon import (IllConditioned, MomentHierarchy, TimeSeries, eval_poly,
                     gram_oracle, moment_hierarchy, natural_poly_system)

SQRT2 = math.sqrt(2.0)


def arcsine_moments(order: int) -> MomentHierarchy:
    """Analytic moments of the full-logistic invariant measure."""
    vals = [math.comb(2 * k, k) / 4.0 ** k for k in range(order + 1)]
    return MomentHierarchy(np.array(vals), sample_count=0)


def point_mass_moments(c: float, order: int) -> MomentHierarchy:
    return MomentHierarchy(np.array([c ** k for k in range(order + 1)]),
                           sample_count=0)


class TestNaturalSystem:
    def test_arcsine_degree_one(self):
        sys_ = natural_poly_system(arcsine_moments(2), 1)
        assert sys_.norms[1] == pytest.approx(0.125, rel=1e-12)
        assert sys_.coeffs[1, 0] == pytest.approx(-SQRT2, rel=1e-12)
        assert sys_.coeffs[1, 1] == pytest.approx(2 * SQRT2, rel=1e-12)

    def test_arcsine_degree_two(self):
        sys_ = natural_poly_system(arcsine_moments(4), 2)
        assert sys_.norms[2] == pytest.approx(1.0 / 128.0, rel=1e-12)
        assert sys_.coeffs[2, 2] == pytest.approx(8 * SQRT2, rel=1e-12)
        # The full degree-2 row is sqrt(2) * (8 x^2 - 8 x + 1).
        assert sys_.coeffs[2, 1] == pytest.approx(-8 * SQRT2, rel=1e-12)
        assert sys_.coeffs[2, 0] == pytest.approx(SQRT2, rel=1e-12)

    def test_point_mass_is_degenerate(self):
        with pytest.raises(IllConditioned) as err:
            natural_poly_system(point_mass_moments(0.3, 2), 1)
        assert err.value.index == 1

    def test_leading_coefficient_is_inverse_root_norm(self):
        sys_ = natural_poly_system(arcsine_moments(8), 4)
        for k in range(1, 5):
            assert sys_.coeffs[k, k] == pytest.approx(
                1.0 / math.sqrt(sys_.norms[k]), rel=1e-12)
            assert sys_.coeffs[k, k] > 0

    def test_requires_enough_moments(self):
        with pytest.raises(ValueError):
            natural_poly_system(arcsine_moments(3), 2)

    def test_order_cap(self):
        with pytest.raises(ValueError):
            natural_poly_system(arcsine_moments(30), 13)


class TestEvalPoly:
    def test_degree_zero_is_one(self):
        sys_ = natural_poly_system(arcsine_moments(4), 2)
        assert eval_poly(sys_, 0, 123.456) == 1.0

    def test_degree_one_vanishes_at_mean(self):
        sys_ = natural_poly_system(arcsine_moments(4), 2)
        assert eval_poly(sys_, 1, 0.5) == pytest.approx(0.0, abs=1e-14)

    def test_degree_two_constant_term(self):
        sys_ = natural_poly_system(arcsine_moments(4), 2)
        assert eval_poly(sys_, 2, 0.0) == pytest.approx(SQRT2, rel=1e-12)

    def test_out_of_range(self):
        sys_ = natural_poly_system(arcsine_moments(4), 2)
        with pytest.raises(IndexError):
            eval_poly(sys_, 3, 0.5)


class TestGramOracle:
    def test_matches_recursion_on_arcsine(self):
        nat = natural_poly_system(arcsine_moments(4), 2)
        ora = gram_oracle(arcsine_moments(4), 2)
        assert np.allclose(nat.coeffs, ora.coeffs, rtol=1e-12, atol=1e-12)

    def test_point_mass_is_degenerate(self):
        with pytest.raises(IllConditioned):
            gram_oracle(point_mass_moments(0.3, 2), 1)

    def test_symmetric_two_point_measure(self):
        m = moment_hierarchy(TimeSeries([0.0, 1.0, 0.0, 1.0]), 2)
        sys_ = gram_oracle(m, 1)
        assert sys_.norms[1] == pytest.approx(0.25, rel=1e-12)
        assert sys_.coeffs[1, 1] == pytest.approx(2.0, rel=1e-12)
        assert sys_.coeffs[1, 0] == pytest.approx(-1.0, rel=1e-12)


@pytest.mark.parametrize("dataset,order", [
    ("quad38", 8), ("quad4", 8), ("expquad", 8), ("henon_delay", 8),
])
def test_oracle_equivalence_on_empirical_data(dataset, order, request):
    train, _ = request.getfixturevalue(dataset)
    m = moment_hierarchy(train, 2 * order)
    nat = natural_poly_system(m, order)
    ora = gram_oracle(m, order)
    for k in range(order + 1):
        for j in range(k + 1):
            a, b = nat.coeffs[k, j], ora.coeffs[k, j]
            scale = max(abs(a), abs(b), 1e-300)
            assert abs(a - b) / scale <= 1e-8


def test_empirical_gram_identity(quad38):
    # The basis is built from the same empirical moments the product sums
    # use, so orthonormality is an algebraic identity up to rounding.
    train, _ = quad38
    n = 6
    m = moment_hierarchy(train, 2 * n)
    sys_ = natural_poly_system(m, n)
    x = train.values
    vals = np.empty((n + 1, len(x)))
    for k in range(n + 1):
        acc = np.zeros_like(x)
        for j in range(k, -1, -1):
            acc = acc * x + sys_.coeffs[k, j]
        vals[k] = acc
    gram = vals @ vals.T / len(x)
    assert np.max(np.abs(gram - np.eye(n + 1))) <= 1e-6
