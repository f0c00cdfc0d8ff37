"""Command-line front end.

Exit codes: 0 success, 2 input or configuration error, 3 numerical or fit
failure. Every run echoes its effective configuration as JSON on stderr.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._accel import BACKEND
from .calibration import FitConfig, fit, scan_tc
from .data_io import (
    FitReport,
    SeriesFileSchema,
    read_params,
    read_series,
    write_plot_data,
    write_profile,
    write_report,
    write_series,
)
from .diagnostics import (
    detrend_power_law,
    forecast_date,
    frequency_grid,
    log_periodogram,
    residuals,
    sanity_check,
)
from .exceptions import (
    DegenerateDataError,
    DegenerateRegressorsError,
    InsufficientDataError,
    LpplError,
)
from .model import REFERENCE_PPI_PARAMS, evaluate_series, monthly_timestamps
from .synthesis import SyntheticSpec, generate

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3

_NUMERIC_ERRORS = (InsufficientDataError, DegenerateDataError, DegenerateRegressorsError, FloatingPointError)


class CliError(Exception):
    def __init__(self, message, code=EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _year_month(text: str) -> tuple[int, int]:
    try:
        y, m = text.split("-")
        return int(y), int(m)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected YYYY-MM, got {text!r}") from None


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _add_schema_flags(p):
    p.add_argument("--date-column", default="date")
    p.add_argument("--value-column", default="value")


def _add_config_flags(p):
    g = p.add_argument_group("search configuration")
    g.add_argument("--alpha-bounds", nargs=2, type=float, metavar=("LO", "HI"))
    g.add_argument("--omega-bounds", nargs=2, type=float, metavar=("LO", "HI"))
    g.add_argument("--tc-bounds", nargs=2, type=float, metavar=("LO", "HI"))
    g.add_argument("--grid", nargs=3, type=_positive_int, metavar=("N_TC", "N_ALPHA", "N_OMEGA"))
    g.add_argument("--max-iter", type=_positive_int)
    g.add_argument("--tol", type=float)
    g.add_argument("--seed", type=int)
    g.add_argument("--random-starts", type=int)
    g.add_argument("--polish-starts", type=_positive_int)
    g.add_argument("--workers", type=_positive_int)


def _add_params_flags(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--params", type=Path, help="JSON parameter file or fit report")
    g.add_argument("--reference-params", action="store_true", help="use the 1913-2012 PPI reference fit")


def _config_from(args) -> FitConfig:
    kw = {}
    for flag, key in (
        ("alpha_bounds", "alpha_bounds"),
        ("omega_bounds", "omega_bounds"),
        ("tc_bounds", "tc_bounds"),
        ("grid", "multistart_grid"),
        ("max_iter", "local_max_iterations"),
        ("tol", "local_tolerance"),
        ("seed", "seed"),
        ("random_starts", "random_starts"),
        ("polish_starts", "polish_starts"),
        ("workers", "workers"),
    ):
        v = getattr(args, flag, None)
        if v is not None:
            kw[key] = tuple(v) if isinstance(v, list) else v
    return FitConfig(**kw)


def _schema_from(args) -> SeriesFileSchema:
    return SeriesFileSchema(date_column=args.date_column, value_column=args.value_column)


def _params_from(args):
    return REFERENCE_PPI_PARAMS if args.reference_params else read_params(args.params)


def _echo(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True, default=str), file=sys.stderr)


def _input_info(path, series) -> dict:
    return {
        "path": str(path),
        "rows": len(series),
        "first_t": float(series.t[0]),
        "last_t": float(series.t[-1]),
    }


def _result_config(config, series) -> dict:
    # workers only changes scheduling, never results, so reports omit it
    d = config.to_dict(series)
    d.pop("workers")
    return d


def cmd_fit(args) -> int:
    schema = _schema_from(args)
    series = read_series(args.input, schema)
    config = _config_from(args)
    config.validate(series)
    _echo({"command": "fit", "backend": BACKEND, "config": config.to_dict(series)})
    result = fit(series, config)
    report = FitReport(
        input=_input_info(args.input, series),
        params=result.params,
        objective=result.objective,
        singularity_date=forecast_date(result.params.t_c).isoformat(),
        sanity=sanity_check(result.params, series, config).to_list(),
        tool_version=__version__,
        config=_result_config(config, series),
        fit={
            "converged": result.converged,
            "n_points": result.n_points,
            "starts_evaluated": result.starts_evaluated,
        },
    )
    write_report(report, args.report)
    if args.plot_data:
        write_plot_data(series, result.params, args.plot_data)
    print(f"t_c = {result.params.t_c!r} ({report.singularity_date}), objective = {result.objective!r}")
    return EXIT_OK


def _tc_grid(start: float, stop: float, step: float) -> np.ndarray:
    if not (math.isfinite(start) and math.isfinite(stop) and start < stop):
        raise CliError(f"need tc-from < tc-to, got {start!r}, {stop!r}")
    if not step > 0.0:
        raise CliError(f"step must be positive, got {step!r}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def cmd_scan(args) -> int:
    grid = _tc_grid(args.tc_from, args.tc_to, args.step)
    series = read_series(args.input, _schema_from(args))
    config = _config_from(args)
    config.validate()
    _echo(
        {
            "command": "scan",
            "backend": BACKEND,
            "config": config.to_dict(),
            "grid": {"from": args.tc_from, "to": args.tc_to, "step": args.step, "size": int(grid.size)},
        }
    )
    profile = scan_tc(series, grid, config)
    write_profile(profile, args.output)
    print(f"argmin t_c = {profile.best_tc!r} (index {profile.best_index}, {forecast_date(profile.best_tc).isoformat()})")
    return EXIT_OK


def cmd_eval(args) -> int:
    params = _params_from(args)
    if args.input is not None:
        t = read_series(args.input, _schema_from(args)).t
    else:
        t = np.array(args.t, dtype=np.float64)
    _echo({"command": "eval", "params": params.as_dict(), "points": int(t.size)})
    values = evaluate_series(params, t)
    lines = ["t,value"] + [f"{a!r},{b!r}" for a, b in zip(t.tolist(), values.tolist())]
    text = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_generate(args) -> int:
    params = _params_from(args)
    if args.timestamps_from is not None:
        ts = read_series(args.timestamps_from).t
    else:
        ts = monthly_timestamps(args.start, args.end)
    spec = SyntheticSpec(params=params, timestamps=ts, noise_sigma=args.noise, seed=args.seed)
    _echo(
        {"command": "generate", "params": params.as_dict(), "points": int(ts.size), "noise": args.noise, "seed": args.seed}
    )
    write_series(generate(spec), args.output)
    return EXIT_OK


def cmd_diagnose(args) -> int:
    series = read_series(args.input, _schema_from(args))
    params = _params_from(args)
    config = _config_from(args)
    freqs = frequency_grid(args.freq_min, args.freq_max, args.freq_step)
    _echo({"command": "diagnose", "params": params.as_dict(), "frequencies": [args.freq_min, args.freq_max, args.freq_step]})
    report = sanity_check(params, series, config)
    out = {"sanity": report.to_list(), "params": params.as_dict(), "input": _input_info(args.input, series)}
    try:
        primary = log_periodogram(detrend_power_law(series, params), params.t_c, freqs)
        res = residuals(series, params)
        res = type(res)(res.t, res.values - res.values.mean())
        nested = log_periodogram(res, params.t_c, freqs)
    except LpplError as exc:
        out["periodogram_error"] = str(exc)
        primary = nested = None
    if primary is not None:
        out["detrended_peak_frequency"] = primary.peak_frequency
        out["residual_peak_frequency"] = nested.peak_frequency
        if args.spectrum:
            rows = ["omega,detrended_power,residual_power"] + [
                f"{w!r},{p!r},{q!r}"
                for w, p, q in zip(freqs.tolist(), primary.power.tolist(), nested.power.tolist())
            ]
            Path(args.spectrum).write_text("\n".join(rows) + "\n", encoding="utf-8")
    text = json.dumps(out, sort_keys=True, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_forecast(args) -> int:
    _echo({"command": "forecast", "t_c": args.t_c})
    print(forecast_date(args.t_c).isoformat())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lpplfit", description="Log-periodic power-law calibration toolkit")
    parser.add_argument("--version", action="version", version=f"lpplfit {__version__} ({BACKEND})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit all seven parameters to a series file")
    p.add_argument("input", type=Path)
    p.add_argument("--report", type=Path, required=True)
    p.add_argument("--plot-data", type=Path)
    _add_schema_flags(p)
    _add_config_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("scan", help="profile the objective over a t_c grid")
    p.add_argument("input", type=Path)
    p.add_argument("--tc-from", type=float, required=True)
    p.add_argument("--tc-to", type=float, required=True)
    p.add_argument("--step", type=float, default=1.0 / 365.0)
    p.add_argument("--output", type=Path, required=True)
    _add_schema_flags(p)
    _add_config_flags(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("eval", help="evaluate the model at given timestamps")
    _add_params_flags(p)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", type=Path, help="take timestamps from a series file")
    src.add_argument("--t", type=float, nargs="+", help="decimal-year timestamps")
    p.add_argument("--output", type=Path)
    _add_schema_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("generate", help="write a synthetic series")
    _add_params_flags(p)
    p.add_argument("--start", type=_year_month, default=(1913, 1))
    p.add_argument("--end", type=_year_month, default=(2012, 3))
    p.add_argument("--timestamps-from", type=Path)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", type=Path, required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("diagnose", help="sanity checks and log-periodograms for a parameter set")
    p.add_argument("input", type=Path)
    _add_params_flags(p)
    p.add_argument("--freq-min", type=float, default=2.0)
    p.add_argument("--freq-max", type=float, default=25.0)
    p.add_argument("--freq-step", type=float, default=0.05)
    p.add_argument("--output", type=Path)
    p.add_argument("--spectrum", type=Path, help="write omega,power table")
    _add_schema_flags(p)
    _add_config_flags(p)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("forecast", help="calendar date of a decimal-year t_c")
    p.add_argument("t_c", type=float)
    p.set_defaults(func=cmd_forecast)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except _NUMERIC_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (LpplError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
