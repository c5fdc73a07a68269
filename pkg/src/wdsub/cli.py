"""Command-line front end.

Subcommands::

    wdsub simulate   --model ar1 --r 3 --n 2000 --seed 1
    wdsub estimate   --model ar1 --n 2000 --b 50 --epsilon 0.05 --normalize estimated
    wdsub experiment --model ar1 --r 3 --n 2000 --b 50 --epsilon 0.05 --reps 1000 --seed 7

Output goes to stdout unless ``--output`` is given. Floats are written in
Python's shortest round-trip form, so reloading them is lossless. A JSON file
passed with ``--config`` supplies defaults (keys are the long option names
with ``-`` replaced by ``_``); flags on the command line override it.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

import numpy as np

from .errors import WdsubError, ExperimentFailedError
from .extremes import (
    MAXIMUM,
    QuantilePinning,
    normalized_cdf,
    normalizers_from_stats,
    pilot_scale,
    theoretical_normalizers_ar1,
)
from .montecarlo import ExperimentConfig, default_experiment_grid, run_experiment
from .processes import Ar1Params, LarchParams, TimeSeries, simulate
from .subsample import (
    DEFAULT_GRID_POINTS,
    normalized_mean,
    rough_cdf,
    smooth_cdf,
    window_statistics,
)

DEFAULTS = {
    "model": "ar1",
    "r": 3,
    "x0": None,
    "a": 0.4,
    "input": "rademacher",
    "rho": 4.0,
    "burn_in": 1000,
    "n": 2000,
    "seed": 0,
    "b": 50,
    "epsilon": 0.05,
    "scheme": "overlapping",
    "estimator": "smooth",
    "stat": "max",
    "center": 0.0,
    "normalize": "none",
    "normalization": "estimated",
    "t1": 0.25,
    "t2": 0.75,
    "bandwidth_scale": "normalized",
    "grid_points": None,
    "grid_min": None,
    "grid_max": None,
    "raw_grid_points": DEFAULT_GRID_POINTS,
    "reps": 1000,
    "workers": None,
    "data": None,
    "format": "csv",
    "output": None,
}


class UsageError(Exception):
    pass


def _add_process_args(p):
    g = p.add_argument_group("process")
    g.add_argument("--model", choices=["ar1", "larch"])
    g.add_argument("--r", type=int, help="AR(1) base (integer >= 2)")
    g.add_argument("--x0", type=float, help="fixed AR(1) start in [0, 1]; default draws it uniformly")
    g.add_argument("--a", type=float, help="LARCH coefficient in (0, 1)")
    g.add_argument("--input", choices=["rademacher", "parabolic"], help="LARCH input law")
    g.add_argument("--rho", type=float, help="parabolic input exponent (> -1)")
    g.add_argument("--burn-in", type=int)
    g.add_argument("--n", type=int, help="series length")
    g.add_argument("--seed", type=int, help="unsigned seed; fixes all randomness")


def _add_estimator_args(p):
    g = p.add_argument_group("estimator")
    g.add_argument("--b", type=int, help="block length")
    g.add_argument("--epsilon", type=float, help="bandwidth of the smooth estimator")
    g.add_argument("--scheme", choices=["overlapping", "nonoverlapping"])
    g.add_argument("--estimator", choices=["smooth", "rough"])
    g.add_argument("--t1", type=float)
    g.add_argument("--t2", type=float)
    g.add_argument("--bandwidth-scale", choices=["normalized", "raw"],
                   help="scale on which --epsilon is measured for normalized maxima")
    g.add_argument("--grid-points", type=int)
    g.add_argument("--grid-min", type=float)
    g.add_argument("--grid-max", type=float)
    g.add_argument("--raw-grid-points", type=int, help="grid size used for quantiles of raw maxima")


def _add_output_args(p):
    p.add_argument("--config", help="JSON file with default option values")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--output", "-o", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wdsub", argument_default=argparse.SUPPRESS,
        description="Subsampling estimators for weakly dependent series.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", argument_default=argparse.SUPPRESS, help="simulate a series")
    _add_process_args(p)
    _add_output_args(p)

    p = sub.add_parser("estimate", argument_default=argparse.SUPPRESS,
                       help="subsampling CDF estimate from one series")
    _add_process_args(p)
    _add_estimator_args(p)
    p.add_argument("--data", help="CSV file with the series (column 'value', or one number per line)")
    p.add_argument("--stat", choices=["max", "mean"])
    p.add_argument("--center", type=float, help="centering of the normalized mean")
    p.add_argument("--normalize", choices=["none", "estimated", "theoretical"],
                   help="normalization of the maxima (max statistic only)")
    _add_output_args(p)

    p = sub.add_parser("experiment", argument_default=argparse.SUPPRESS,
                       help="Monte Carlo study of the normalized estimators")
    _add_process_args(p)
    _add_estimator_args(p)
    p.add_argument("--normalization", choices=["estimated", "theoretical"])
    p.add_argument("--reps", type=int, help="number of replications")
    p.add_argument("--workers", type=int, help="worker threads (default: WDSUB_THREADS, 0 = auto)")
    _add_output_args(p)
    return parser


def _load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    data = {k.replace("-", "_"): v for k, v in data.items()}
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return data


def _options(ns) -> dict:
    given = vars(ns)
    opts = dict(DEFAULTS)
    if "config" in given:
        opts.update(_load_config(given.pop("config")))
    opts.update(given)
    return opts


def _process(opts):
    if opts["model"] == "ar1":
        return Ar1Params(r=opts["r"], x0=opts["x0"])
    rho = opts["rho"] if opts["input"] == "parabolic" else None
    return LarchParams(a=opts["a"], rho=rho, burn_in=opts["burn_in"])


def _validate(opts, command):
    if opts["n"] is None or opts["n"] < 1:
        raise UsageError("--n must be >= 1")
    if opts["seed"] < 0:
        raise UsageError("--seed must be unsigned")
    try:
        _process(opts)
    except WdsubError as exc:
        raise UsageError(str(exc)) from exc
    if command == "simulate":
        return
    if not opts["epsilon"] > 0:
        raise UsageError(f"--epsilon must be > 0 (got {opts['epsilon']})")
    if not 0 < opts["t1"] < opts["t2"] < 1:
        raise UsageError(f"need 0 < t1 < t2 < 1 (got t1={opts['t1']}, t2={opts['t2']})")
    if opts["b"] < 1:
        raise UsageError("--b must be >= 1")
    if command == "experiment" or opts["data"] is None:
        if opts["b"] >= opts["n"]:
            raise UsageError(f"block length must satisfy b < n (got b={opts['b']}, n={opts['n']})")
    if command == "experiment" and opts["reps"] < 1:
        raise UsageError("--reps must be >= 1")
    if opts.get("grid_points") is not None and opts["grid_points"] < 2:
        raise UsageError("--grid-points must be >= 2")


def _grid(opts, default_lo, default_hi, default_points):
    lo = default_lo if opts["grid_min"] is None else opts["grid_min"]
    hi = default_hi if opts["grid_max"] is None else opts["grid_max"]
    points = default_points if opts["grid_points"] is None else opts["grid_points"]
    if not hi > lo:
        raise UsageError(f"grid bounds need min < max (got {lo}, {hi})")
    return np.linspace(lo, hi, points)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else repr(float(v)) if not isinstance(v, int) else v for v in row])
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _floats(a):
    return [float(v) for v in np.asarray(a)]


def _read_series(path) -> TimeSeries:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise UsageError(f"cannot read data file {path}: {exc}") from exc
    rows = [r for r in rows if r]
    if rows and "value" in rows[0]:
        col = rows[0].index("value")
        rows = rows[1:]
    else:
        col = 0
    try:
        values = [float(r[col]) for r in rows]
    except (ValueError, IndexError) as exc:
        raise UsageError(f"malformed data file {path}: {exc}") from exc
    return TimeSeries(values, model_tag=f"file:{path}")


def cmd_simulate(opts) -> str:
    params = _process(opts)
    series = simulate(opts["n"], params, opts["seed"])
    if opts["format"] == "json":
        return _json_text({"model": series.model_tag, "n": len(series), "seed": series.seed,
                           "values": _floats(series.values)})
    return _csv_text(["t", "value"], ((t, v) for t, v in enumerate(series.values, start=1)))


def cmd_estimate(opts) -> str:
    if opts["data"] is not None:
        series = _read_series(opts["data"])
        if opts["b"] >= len(series):
            raise UsageError(f"block length must satisfy b < n (got b={opts['b']}, n={len(series)})")
    else:
        series = simulate(opts["n"], _process(opts), opts["seed"])
    stat = MAXIMUM if opts["stat"] == "max" else normalized_mean(opts["center"])
    kind, eps = opts["estimator"], opts["epsilon"]
    pin = QuantilePinning(opts["t1"], opts["t2"])
    stats = window_statistics(series, opts["b"], stat, opts["scheme"])
    normalize = opts["normalize"]
    norm = None
    if normalize == "none":
        pad = 3 * eps if kind == "smooth" else 0.0
        grid = _grid(opts, float(stats.min()) - pad, float(stats.max()) + pad, DEFAULT_GRID_POINTS)
        values = smooth_cdf(stats, grid, eps) if kind == "smooth" else rough_cdf(stats, grid)
        h = eps
    else:
        if opts["stat"] != "max":
            raise UsageError("--normalize applies to the max statistic only")
        if normalize == "theoretical":
            if opts["model"] != "ar1" or opts["data"] is not None:
                raise UsageError("theoretical normalizers exist only for simulated AR(1) series")
            norm = theoretical_normalizers_ar1(opts["b"], opts["r"], pin)
            scale = norm.u
        else:
            scale = pilot_scale(stats, pin, opts["raw_grid_points"]) if kind == "smooth" else 1.0
        h = eps / scale if opts["bandwidth_scale"] == "normalized" else eps
        if norm is None:
            norm = normalizers_from_stats(stats, pin, kind, h, opts["b"], opts["scheme"],
                                          opts["raw_grid_points"])
        r = opts["r"] if opts["model"] == "ar1" else 3
        ref = default_experiment_grid(r, pin)
        grid = _grid(opts, ref[0], ref[-1], ref.size)
        values = normalized_cdf(stats, grid, norm, kind, h)
    if opts["format"] == "json":
        obj = {
            "config": {k: opts[k] for k in ("model", "n", "seed", "b", "epsilon", "scheme", "estimator",
                                            "stat", "normalize", "t1", "t2", "bandwidth_scale")},
            "source": series.model_tag,
            "raw_bandwidth": h if kind == "smooth" else None,
            "normalizers": None if norm is None else {"u": norm.u, "v": norm.v, "provenance": norm.provenance},
            "grid": _floats(grid),
            "values": _floats(values),
        }
        return _json_text(obj)
    return _csv_text(["x", "value"], zip(grid, values))


def _level_name(level):
    return f"q{round(level * 100):02d}"


def cmd_experiment(opts) -> str:
    pin = QuantilePinning(opts["t1"], opts["t2"])
    params = _process(opts)
    r = params.r if isinstance(params, Ar1Params) else 3
    ref = default_experiment_grid(r, pin)
    grid = _grid(opts, ref[0], ref[-1], ref.size)
    config = ExperimentConfig(
        process=params, n=opts["n"], b=opts["b"], epsilon=opts["epsilon"], scheme=opts["scheme"],
        estimator=opts["estimator"], normalization=opts["normalization"], pin=pin,
        replications=opts["reps"], grid=grid, base_seed=opts["seed"],
        bandwidth_scale=opts["bandwidth_scale"], raw_grid_points=opts["raw_grid_points"])
    summary = run_experiment(config, workers=opts["workers"])
    k_values = summary.reference_values
    if opts["format"] == "json":
        obj = {
            "config": config.to_dict(),
            "grid": _floats(summary.grid),
            "mean": _floats(summary.mean),
            "q_low": _floats(summary.q_low),
            "q_high": _floats(summary.q_high),
            "K": None if k_values is None else _floats(k_values),
            "sup_distance_stats": summary.sup_distance_stats,
            "failures": {"count": len(summary.failures),
                         "replications": [{"index": j, "error": msg} for j, msg in summary.failures]},
        }
        return _json_text(obj)
    header = ["x", "mean", _level_name(config.levels[0]), _level_name(config.levels[1])]
    columns = [summary.grid, summary.mean, summary.q_low, summary.q_high]
    if k_values is not None:
        header.append("K")
        columns.append(k_values)
    return _csv_text(header, zip(*columns))


COMMANDS = {"simulate": cmd_simulate, "estimate": cmd_estimate, "experiment": cmd_experiment}


def run(argv=None) -> int:
    """Run the CLI; returns 0 on success, 2 on usage errors, 1 on runtime errors."""
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    command = ns.command
    del ns.command
    try:
        opts = _options(ns)
        _validate(opts, command)
        text = COMMANDS[command](opts)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"wdsub {command}: error: {exc}", file=sys.stderr)
        return 2
    except (WdsubError, ExperimentFailedError) as exc:
        print(f"wdsub {command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if opts["output"]:
        try:
            with open(opts["output"], "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"wdsub {command}: cannot write {opts['output']}: {exc}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return 0


def main():
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
