import numpy as np
import pytest

from mbrecon import (MixedColumnCount, ParseError, TimeSeries, TimeSeries2D,
                     fit)
from mbrecon.cli import main, parse_eps_grid
from mbrecon.dataio import read_series, write_csv, write_series


class TestReadSeries:
    def test_scalar_file(self, tmp_path):
        p = tmp_path / "a.txt"
        p.write_text("0.1\n0.2\n")
        series = read_series(p)
        assert isinstance(series, TimeSeries)
        assert series.values.tolist() == [0.1, 0.2]

    def test_planar_file_with_comment(self, tmp_path):
        p = tmp_path / "b.txt"
        p.write_text("# header\n1 2\n3 4\n")
        series = read_series(p)
        assert isinstance(series, TimeSeries2D)
        assert series.values.tolist() == [[1.0, 2.0], [3.0, 4.0]]

    def test_mixed_columns(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("1 2\n3\n")
        with pytest.raises(MixedColumnCount) as err:
            read_series(p)
        assert err.value.line_no == 2

    def test_bad_token(self, tmp_path):
        p = tmp_path / "d.txt"
        p.write_text("1.0\nnot-a-number\n")
        with pytest.raises(ParseError) as err:
            read_series(p)
        assert err.value.line_no == 2

    def test_write_read_round_trip_bit_exact(self, tmp_path, quad38):
        train, _ = quad38
        p = tmp_path / "orbit.txt"
        write_series(train, p)
        back = read_series(p)
        assert np.array_equal(back.values, train.values)

    def test_round_trip_refit_identical(self, tmp_path, quad38):
        train, _ = quad38
        p = tmp_path / "orbit.txt"
        write_series(train, p)
        back = read_series(p)
        assert np.array_equal(fit(back, 2).to_monomial(),
                              fit(train, 2).to_monomial())


class TestWriteCsv:
    def test_rows_and_header(self, tmp_path):
        p = tmp_path / "out.csv"
        write_csv(p, ("epsilon", "T"), [(0.01, 5), (0.05, 9)])
        lines = p.read_text().splitlines()
        assert lines[0] == "epsilon,T"
        assert len(lines) == 3

    def test_empty_rows(self, tmp_path):
        p = tmp_path / "out.csv"
        write_csv(p, ("a", "b"), [])
        assert p.read_text() == "a,b\n"

    def test_unwritable_path(self, tmp_path):
        with pytest.raises(OSError):
            write_csv(tmp_path / "missing" / "out.csv", ("a",), [])


class TestEpsGrid:
    def test_basic(self):
        assert parse_eps_grid("0.01:0.05:0.01") == pytest.approx(
            [0.01, 0.02, 0.03, 0.04, 0.05])

    def test_single_point(self):
        assert parse_eps_grid("0.05:0.05:0.01") == [0.05]

    def test_rejects_garbage(self):
        import argparse
        with pytest.raises(argparse.ArgumentTypeError):
            parse_eps_grid("nope")


class TestCliFlows:
    def test_generate_fit_predict_eval(self, tmp_path):
        data = tmp_path / "quad.txt"
        model = tmp_path / "model.txt"
        pred = tmp_path / "pred.txt"
        curve = tmp_path / "curve.csv"
        assert main(["generate", "--map", "quadratic", "--mu", "3.8",
                     "--n", "3000", "--out", str(data)]) == 0
        assert main(["fit", "--data", str(data), "--order", "2",
                     "--out", str(model)]) == 0
        assert model.read_text().startswith("mbr1 n=2 N=3000")
        assert main(["predict", "--model", str(model), "--start", "0.5",
                     "--steps", "20", "--out", str(pred)]) == 0
        truth = tmp_path / "truth.txt"
        truth.write_text(pred.read_text())
        assert main(["eval", "predlen", "--pred", str(pred), "--truth",
                     str(truth), "--eps", "0.01:0.05:0.01",
                     "--out", str(curve)]) == 0
        lines = curve.read_text().splitlines()
        assert lines[0] == "epsilon,T"
        assert all(ln.endswith(",20") for ln in lines[1:])

    def test_predlen_model_modes(self, tmp_path):
        data = tmp_path / "quad.txt"
        model = tmp_path / "model.txt"
        main(["generate", "--map", "quadratic", "--mu", "3.8",
              "--n", "5100", "--out", str(data)])
        lines = data.read_text().splitlines()
        train = tmp_path / "train.txt"
        truth = tmp_path / "truth.txt"
        train.write_text("\n".join(lines[:5000]) + "\n")
        truth.write_text("\n".join(lines[5000:]) + "\n")
        main(["fit", "--data", str(train), "--order", "2", "--out", str(model)])
        end_csv = tmp_path / "end.csv"
        assert main(["eval", "predlen", "--model", str(model), "--data",
                     str(train), "--truth", str(truth), "--mode", "end-of-set",
                     "--eps", "0.01:0.05:0.02", "--out", str(end_csv)]) == 0
        rows = [ln.split(",") for ln in end_csv.read_text().splitlines()[1:]]
        assert all(int(t) >= 5 for _, t in rows)
        mean_csv = tmp_path / "mean.csv"
        assert main(["eval", "predlen", "--model", str(model), "--data",
                     str(train), "--mode", "mean-over-set",
                     "--eps", "0.01:0.05:0.02", "--out", str(mean_csv)]) == 0
        rows = [ln.split(",") for ln in mean_csv.read_text().splitlines()[1:]]
        assert all(int(t) >= 1 for _, t in rows)

    def test_predlen_requires_inputs(self, tmp_path):
        assert main(["eval", "predlen", "--eps", "0.01:0.05:0.02",
                     "--out", str(tmp_path / "x.csv")]) == 3

    def test_noise_and_spectrum(self, tmp_path):
        data = tmp_path / "quad.txt"
        main(["generate", "--map", "quadratic", "--n", "512", "--out", str(data)])
        noisy = tmp_path / "noisy.txt"
        assert main(["noise", "--data", str(data), "--level", "0.05",
                     "--seed", "3", "--out", str(noisy)]) == 0
        spec = tmp_path / "spec.csv"
        assert main(["eval", "spectrum", "--data", str(noisy),
                     "--out", str(spec)]) == 0
        assert spec.read_text().splitlines()[0] == "omega,period,I"

    def test_fit_2d_model(self, tmp_path):
        data = tmp_path / "henon.txt"
        model = tmp_path / "model2.txt"
        main(["generate", "--map", "henon2d", "--n", "2000", "--out", str(data)])
        assert main(["fit", "--data", str(data), "--order", "2",
                     "--out", str(model)]) == 0
        assert model.read_text().startswith("mbr2 n=2")
        pred = tmp_path / "pred2.txt"
        assert main(["predict", "--model", str(model), "--start", "0.1,0.1",
                     "--steps", "5", "--out", str(pred)]) == 0
        back = read_series(pred)
        assert isinstance(back, TimeSeries2D)

    def test_diagnose2d_exit_ok(self, tmp_path, capsys):
        data = tmp_path / "henon.txt"
        main(["generate", "--map", "henon2d", "--n", "5000", "--out", str(data)])
        out = tmp_path / "diag.csv"
        assert main(["diagnose2d", "--data", str(data), "--order", "2",
                     "--out", str(out)]) == 0
        header = out.read_text().splitlines()[0]
        assert header == "i,j,N_legacy,N_oracle,status"
        assert "first failure at (2,0)" in capsys.readouterr().out

    def test_missing_file_is_data_error(self, tmp_path):
        assert main(["fit", "--data", str(tmp_path / "nope.txt"),
                     "--order", "2", "--out", str(tmp_path / "m.txt")]) == 3

    def test_degenerate_fit_is_numerical_error(self, tmp_path):
        data = tmp_path / "const.txt"
        data.write_text("".join("0.5\n" for _ in range(100)))
        assert main(["fit", "--data", str(data), "--order", "2",
                     "--out", str(tmp_path / "m.txt")]) == 4

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as err:
            main(["generate", "--map", "not-a-map", "--n", "10", "--out", "x"])
        assert err.value.code == 2


class TestExperimentsSmoke:
    def test_replicate_1d_small(self, tmp_path):
        out = tmp_path / "rep"
        assert main(["experiment", "replicate-1d", "--out", str(out),
                     "--n", "3000", "--eps", "0.01:0.05:0.02"]) == 0
        names = {p.name for p in out.iterdir()}
        assert "quad_predlen_end.csv" in names
        assert "quad_predlen_mean.csv" in names
        assert "expquad_spectrum_actual.csv" in names
        assert "quad_lag_residuals.csv" in names
        assert "manifest.txt" in names

    def test_diagnose_2d_small(self, tmp_path):
        out = tmp_path / "diag"
        assert main(["experiment", "diagnose-2d", "--out", str(out),
                     "--n", "4000", "--eps", "0.05:0.35:0.1"]) == 0
        manifest = (out / "manifest.txt").read_text()
        assert "first_failure=(2,0)" in manifest
        assert "n20_closed_form=-" in manifest
        assert (out / "diagnosis.csv").exists()
        assert (out / "corrected_coefficients.csv").exists()
        assert (out / "delay_predlen.csv").exists()

    def test_noise_sweep_small_and_deterministic(self, tmp_path):
        args = ["experiment", "noise-sweep", "--n", "2000",
                "--eps", "0.01:0.05:0.02", "--seeds", "0,1,2"]
        out1 = tmp_path / "s1"
        out2 = tmp_path / "s2"
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        for name in ("noise_predlen.csv", "noise_median_predlen.csv",
                     "manifest.txt"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
