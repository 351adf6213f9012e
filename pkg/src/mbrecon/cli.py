"""Command-line interface.

Subcommands: ``generate``, ``fit``, ``predict``, ``eval predlen|spectrum|lag``,
``noise``, ``diagnose2d``, ``experiment <id>``.  Everything is controlled by
long flags on the command line; there is no environment-variable
configuration.  Tolerance grids are given as ``start:stop:step``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from . import analysis, mbr1d, mbr2d
from .analysis import NoiseScaling, PredictionMode
from .dataio import read_series, write_csv, write_series
from .errors import DataError, MbrError, NumericalError
from .experiments import EXPERIMENT_IDS, ExperimentConfig, run_experiment
from .generators import (MapKind, MapSpec, TimeSeries, TimeSeries2D,
                         generate_orbit)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


def parse_eps_grid(text: str) -> List[float]:
    """Parse ``start:stop:step`` into an inclusive increasing grid."""
    try:
        start, stop, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start or start <= 0:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    count = int(round((stop - start) / step)) + 1
    grid = [start + k * step for k in range(count)]
    return [round(g, 12) for g in grid if g <= stop + step * 1e-9]


def _parse_initial(text: str) -> List[float]:
    try:
        return [float(p) for p in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad initial state {text!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mbrecon",
        description="Model chaotic series through moment-based polynomial reconstruction.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a test orbit")
    gen.add_argument("--map", required=True,
                     choices=[k.value for k in MapKind])
    gen.add_argument("--mu", type=float, default=None)
    gen.add_argument("--k", type=float, default=None)
    gen.add_argument("--a", type=float, default=1.4)
    gen.add_argument("--b", type=float, default=0.3)
    gen.add_argument("--x0", type=_parse_initial, default=None,
                     help="initial state; two comma-separated values for planar maps")
    gen.add_argument("--burn", type=int, default=1000)
    gen.add_argument("--n", type=int, required=True, help="number of samples")
    gen.add_argument("--out", required=True)

    fit = sub.add_parser("fit", help="fit a model to a series file")
    fit.add_argument("--data", required=True)
    fit.add_argument("--order", type=int, required=True)
    fit.add_argument("--out", required=True)

    pred = sub.add_parser("predict", help="iterate a fitted model")
    pred.add_argument("--model", required=True)
    pred.add_argument("--start", type=_parse_initial, required=True)
    pred.add_argument("--steps", type=int, required=True)
    pred.add_argument("--out", required=True)

    ev = sub.add_parser("eval", help="evaluation metrics")
    evsub = ev.add_subparsers(dest="metric", required=True)
    predlen = evsub.add_parser(
        "predlen", help="prediction-length curve",
        description="Either compare a predicted series against a true one "
                    "(--pred/--truth), or drive a fitted model over training "
                    "data (--model/--data) in one of two modes.")
    predlen.add_argument("--pred", help="predicted series file")
    predlen.add_argument("--truth", help="true continuation file")
    predlen.add_argument("--model", help="fitted model file")
    predlen.add_argument("--data", help="training series file (with --model)")
    predlen.add_argument("--mode", choices=[m.value for m in PredictionMode],
                         default=PredictionMode.END_OF_SET.value)
    predlen.add_argument("--eps", type=parse_eps_grid, required=True)
    predlen.add_argument("--out", required=True)
    spectrum = evsub.add_parser("spectrum", help="periodogram")
    spectrum.add_argument("--data", required=True)
    spectrum.add_argument("--out", required=True)
    lag = evsub.add_parser("lag", help="lag pairs")
    lag.add_argument("--data", required=True)
    lag.add_argument("--lag", type=int, default=1)
    lag.add_argument("--out", required=True)

    noise = sub.add_parser("noise", help="add deterministic Gaussian noise")
    noise.add_argument("--data", required=True)
    noise.add_argument("--level", type=float, required=True)
    noise.add_argument("--seed", type=int, required=True)
    noise.add_argument("--scaling", choices=[s.value for s in NoiseScaling],
                       default=NoiseScaling.RELATIVE_TO_STD.value)
    noise.add_argument("--out", required=True)

    diag = sub.add_parser("diagnose2d", help="norm diagnosis of the 2-d constructions")
    diag.add_argument("--data", required=True)
    diag.add_argument("--order", type=int, default=2)
    diag.add_argument("--eta-subscript", choices=mbr2d.ETA_SUBSCRIPT_READINGS,
                      default="k", dest="eta_subscript")
    diag.add_argument("--out", required=True)

    exp = sub.add_parser("experiment", help="run a canned experiment")
    exp.add_argument("experiment_id", choices=EXPERIMENT_IDS)
    exp.add_argument("--out", required=True, help="output directory")
    exp.add_argument("--n", type=int, default=None)
    exp.add_argument("--order", type=int, default=None)
    exp.add_argument("--eps", type=parse_eps_grid, default=None)
    exp.add_argument("--seeds", default=None,
                     help="comma-separated seed list")
    return parser


def _cmd_generate(args) -> int:
    kind = MapKind(args.map)
    initial = args.x0
    if kind is MapKind.QUADRATIC:
        spec = MapSpec.quadratic(mu=3.8 if args.mu is None else args.mu,
                                 x0=initial[0] if initial else 0.123456789,
                                 burn_in=args.burn)
    elif kind is MapKind.EXP_QUADRATIC:
        spec = MapSpec.exp_quadratic(mu=10.0 if args.mu is None else args.mu,
                                     k=2.51705 if args.k is None else args.k,
                                     x0=initial[0] if initial else 0.123456789,
                                     burn_in=args.burn)
    elif kind is MapKind.HENON2D:
        x0, y0 = initial if initial else (0.12, 0.22)
        spec = MapSpec.henon(a=args.a, b=args.b, x0=x0, y0=y0, burn_in=args.burn)
    else:
        xp, xc = initial if initial else (0.12, 0.22)
        spec = MapSpec.henon_delay(a=args.a, b=args.b, x_prev=xp, x_curr=xc,
                                   burn_in=args.burn)
    write_series(generate_orbit(spec, args.n), args.out)
    return EXIT_OK


def _cmd_fit(args) -> int:
    series = read_series(args.data)
    if isinstance(series, TimeSeries):
        model = mbr1d.fit(series, args.order)
    else:
        model = mbr2d.fit2d(series, args.order)
    with open(args.out, "w", encoding="ascii") as fh:
        fh.write(model.to_text())
    return EXIT_OK


def _load_model(path):
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    head = text.split(None, 1)[0] if text.strip() else ""
    if head == "mbr1":
        return mbr1d.ReconstructedMap1D.from_text(text)
    if head == "mbr2":
        return mbr2d.ReconstructedMap2D.from_text(text)
    raise DataError(f"{path}: unrecognized model header {head!r}")


def _cmd_predict(args) -> int:
    model = _load_model(args.model)
    if isinstance(model, mbr1d.ReconstructedMap1D):
        if len(args.start) != 1:
            raise DataError("scalar model takes one start value")
        out = model.predict(args.start[0], args.steps)
    else:
        if len(args.start) != 2:
            raise DataError("planar model takes two start values")
        out = model.predict(tuple(args.start), args.steps)
    write_series(out, args.out)
    return EXIT_OK


def _cmd_eval(args) -> int:
    if args.metric == "predlen":
        if args.model:
            if not args.data:
                raise DataError("--model needs --data (the training series)")
            mode = PredictionMode(args.mode)
            if mode is PredictionMode.END_OF_SET and not args.truth:
                raise DataError("end-of-set mode needs --truth")
            model = _load_model(args.model)
            train = read_series(args.data)
            truth = read_series(args.truth) if args.truth else train
            report = analysis.prediction_curve(model, train, truth,
                                               args.eps, mode)
            rows = [(float(e), int(t))
                    for e, t in zip(report.epsilons, report.lengths)]
        else:
            if not (args.pred and args.truth):
                raise DataError("predlen needs --pred and --truth, or --model and --data")
            pred = read_series(args.pred)
            truth = read_series(args.truth)
            rows = [(e, prediction_length_for(pred, truth, e)) for e in args.eps]
        write_csv(args.out, ("epsilon", "T"), rows)
    elif args.metric == "spectrum":
        series = read_series(args.data)
        if not isinstance(series, TimeSeries):
            raise DataError("spectrum expects a scalar series")
        spec = analysis.periodogram(series)
        write_csv(args.out, ("omega", "period", "I"),
                  list(zip(map(float, spec.omegas), map(float, spec.periods),
                           map(float, spec.ordinates))))
    else:
        series = read_series(args.data)
        if not isinstance(series, TimeSeries):
            raise DataError("lag pairs expect a scalar series")
        pairs = analysis.lag_pairs(series, args.lag)
        write_csv(args.out, ("x_t", "x_t_plus_lag"),
                  [(float(a), float(b)) for a, b in pairs])
    return EXIT_OK


def prediction_length_for(pred, truth, eps: float) -> int:
    return analysis.prediction_length(pred, truth, eps)


def _cmd_noise(args) -> int:
    series = read_series(args.data)
    if not isinstance(series, TimeSeries):
        raise DataError("noise injection expects a scalar series")
    noisy = analysis.add_gaussian_noise(series, args.level, args.seed,
                                        NoiseScaling(args.scaling))
    write_series(noisy, args.out)
    return EXIT_OK


def _cmd_diagnose2d(args) -> int:
    series = read_series(args.data)
    if not isinstance(series, TimeSeries2D):
        raise DataError("diagnosis expects a planar series")
    diag = mbr2d.diagnose2d(series, args.order, args.eta_subscript)
    rows = []
    for row in diag.rows:
        rows.append((row.index.i, row.index.j,
                     "" if row.n_legacy is None else float(row.n_legacy),
                     "" if row.n_oracle is None else float(row.n_oracle),
                     row.status))
    write_csv(args.out, ("i", "j", "N_legacy", "N_oracle", "status"), rows)
    if diag.first_failure is not None:
        print(f"first failure at ({diag.first_failure.i},{diag.first_failure.j}); "
              f"closed-form N[2,0] = {diag.n20_closed}")
    return EXIT_OK


def _cmd_experiment(args) -> int:
    kwargs = {}
    if args.eps is not None:
        kwargs["epsilons"] = tuple(args.eps)
    if args.seeds is not None:
        kwargs["seeds"] = tuple(int(s) for s in args.seeds.split(","))
    config = ExperimentConfig(args.experiment_id, Path(args.out),
                              n_points=args.n, order=args.order, **kwargs)
    for path in run_experiment(config):
        print(path)
    return EXIT_OK


_HANDLERS = {
    "generate": _cmd_generate,
    "fit": _cmd_fit,
    "predict": _cmd_predict,
    "eval": _cmd_eval,
    "noise": _cmd_noise,
    "diagnose2d": _cmd_diagnose2d,
    "experiment": _cmd_experiment,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except NumericalError as err:
        print(f"numerical error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DataError as err:
        print(f"data error: {err}", file=sys.stderr)
        return EXIT_DATA
    except MbrError as err:  # pragma: no cover - safety net
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
