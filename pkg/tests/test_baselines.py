import numpy as np
import pytest

from mbrecon import (NotEnoughNeighbors, SingularNormalEquations, TimeSeries,
                     analog_predict, ar_fit, ar_predict, fit, monomial_ls_fit)


class TestAnalog:
    TRAIN = TimeSeries([0.1, 0.9, 0.2, 0.8])

    def test_single_neighbour(self):
        # 0.1 and 0.2 are equidistant from the query; the tie resolves to
        # the earlier index, whose successor is 0.9.
        assert analog_predict(self.TRAIN, 1, 1, 0.15, s=1) == 0.9

    def test_two_neighbours(self):
        assert analog_predict(self.TRAIN, 1, 1, 0.15, s=2) == pytest.approx(0.85)

    def test_not_enough_neighbours(self):
        with pytest.raises(NotEnoughNeighbors):
            analog_predict(self.TRAIN, 1, 1, 0.15, s=10)

    def test_exact_query_returns_true_successor(self, quad38):
        train, _ = quad38
        t = 1234
        query = train.values[t]
        assert analog_predict(train, 1, 1, query, s=1) == train.values[t + 1]

    def test_embedded_query(self, quad38):
        train, _ = quad38
        t = 777
        query = train.values[t:t + 2]
        assert analog_predict(train, 2, 1, query, s=1) == train.values[t + 2]


class TestARFit:
    def test_exact_linear_recursion(self):
        x = [1.0]
        for _ in range(99):
            x.append(0.5 * x[-1])
        model = ar_fit(TimeSeries(x), 1)
        assert model.coefficients[0] == pytest.approx(0.5, abs=1e-12)
        assert model.residual_variance == pytest.approx(0.0, abs=1e-20)

    def test_constant_nonzero_series(self):
        model = ar_fit(TimeSeries([0.7] * 50), 1)
        assert model.coefficients[0] == pytest.approx(1.0, rel=1e-12)
        assert model.residual_variance == pytest.approx(0.0, abs=1e-20)

    def test_zero_series_singular(self):
        with pytest.raises(SingularNormalEquations):
            ar_fit(TimeSeries([0.0] * 50), 1)

    def test_recovers_ar2_coefficients(self):
        # Noise-free oscillating decay: complex roots, well separated lags.
        x = [1.0, 0.7]
        for _ in range(98):
            x.append(0.5 * x[-1] - 0.3 * x[-2])
        model = ar_fit(TimeSeries(x), 2)
        assert model.coefficients[0] == pytest.approx(0.5, abs=1e-8)
        assert model.coefficients[1] == pytest.approx(-0.3, abs=1e-8)

    def test_linear_model_cannot_match_quadratic_map(self, quad38):
        train, _ = quad38
        ar = ar_fit(train, 2)
        model = fit(train, 2)
        x = train.values
        mse = np.mean([(model.eval(x[t]) - x[t + 1]) ** 2
                       for t in range(0, len(x) - 1, 173)])
        assert ar.residual_variance > mse


class TestARPredict:
    def test_geometric_decay(self):
        from mbrecon.baselines import ARModel
        model = ARModel(1, np.array([0.5]), 0.0)
        out = ar_predict(model, [1.0], 3)
        assert out.values.tolist() == [0.5, 0.25, 0.125]

    def test_unit_root_holds_constant(self):
        from mbrecon.baselines import ARModel
        model = ARModel(1, np.array([1.0]), 0.0)
        out = ar_predict(model, [0.3], 5)
        assert np.all(out.values == 0.3)

    def test_zero_coefficients(self):
        from mbrecon.baselines import ARModel
        model = ARModel(1, np.array([0.0]), 0.0)
        out = ar_predict(model, [123.0], 4)
        assert np.all(out.values == 0.0)

    def test_history_length_checked(self):
        from mbrecon.baselines import ARModel
        model = ARModel(2, np.array([0.5, 0.1]), 0.0)
        with pytest.raises(ValueError):
            ar_predict(model, [1.0], 3)


class TestMonomialLS:
    def test_quad38(self, quad38):
        model = monomial_ls_fit(quad38[0], 2)
        assert model.coefficients[0] == pytest.approx(0.0, abs=1e-8)
        assert model.coefficients[1] == pytest.approx(3.8, abs=1e-8)
        assert model.coefficients[2] == pytest.approx(-3.8, abs=1e-8)

    def test_quad4(self, quad4):
        model = monomial_ls_fit(quad4[0], 2)
        assert model.coefficients[1] == pytest.approx(4.0, abs=1e-8)
        assert model.coefficients[2] == pytest.approx(-4.0, abs=1e-8)

    def test_henon_2d(self, henon):
        model = monomial_ls_fit(henon[0], 2)
        by_index = {tuple(ij): p for p, ij in enumerate(model.indices)}
        f1, f2 = model.coefficients
        assert f1[by_index[(0, 0)]] == pytest.approx(1.0, abs=1e-8)
        assert f1[by_index[(1, 1)]] == pytest.approx(1.0, abs=1e-8)
        assert f1[by_index[(2, 0)]] == pytest.approx(-1.4, abs=1e-8)
        assert f2[by_index[(1, 0)]] == pytest.approx(0.3, abs=1e-8)
        for ij in ((1, 0), (2, 1), (2, 2)):
            assert f1[by_index[ij]] == pytest.approx(0.0, abs=1e-8)

    def test_eval_1d(self, quad38):
        model = monomial_ls_fit(quad38[0], 2)
        assert model.eval(0.5) == pytest.approx(0.95, abs=1e-8)

    def test_degenerate(self):
        with pytest.raises(SingularNormalEquations):
            monomial_ls_fit(TimeSeries([0.5] * 30), 2)
