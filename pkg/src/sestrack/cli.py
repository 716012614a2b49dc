"""Command-line front end.

Exit codes: 0 on success, 1 on domain or validation errors, 2 on usage
errors (including malformed model specs, echoed with the grammar), and 3
when ``verify`` finds the empirical tail above the bound.

Numbers are printed with 10 significant digits in text mode; ``--json``
output keeps full double precision.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from .bounds import exact_mse_sequence, optimize_alpha, tracking_bound
from .dataio import (
    format_csv,
    load_experiment_config,
    read_csv_column,
    write_csv,
    write_results,
)
from .experiments import (
    DEFAULT_FIGURE_SEED,
    ExperimentConfig,
    monte_carlo_mse,
    reproduce_figure,
    simulate_smoothed,
    verify_bound,
)
from .processes import AR1, MA1, MAq, Constant, Linear, Sinusoid, WhiteGaussian
from .smoothing import ses_run

SPEC_GRAMMAR = """\
model specs are written name:key=value,key=value
  noise: white:var=1
         ma1:a=2,var=1
         ar1:theta=0.2,var=1
         maq:b1=0.5,b2=-0.3,var=1
         (sigma=S gives the standard deviation instead of var=V)
  trend: const:level=5
         linear:start=2,slope=0.1
         sin:amp=1,rate=0.0031415926,phase=0
"""


class UsageError(ValueError):
    """Malformed flags or model specs; exits with code 2."""


def _fmt(value: float) -> str:
    return f"{float(value):.10g}"


def _parse_pairs(body: str, where: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    if not body:
        return pairs
    for item in body.split(","):
        key, sep, value = item.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise UsageError(f"{where}: expected key=value, got {item!r}")
        if key in pairs:
            raise UsageError(f"{where}: duplicate key {key!r}")
        pairs[key] = value
    return pairs


def _pop_float(pairs: dict[str, str], key: str, where: str, default=None) -> float:
    if key not in pairs:
        if default is None:
            raise UsageError(f"{where}: missing required key {key!r}")
        return default
    raw = pairs.pop(key)
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"{where}: {key}={raw!r} is not a number") from None


def _pop_variance(pairs: dict[str, str], where: str) -> float:
    if "var" in pairs and "sigma" in pairs:
        raise UsageError(f"{where}: give either var or sigma, not both")
    if "sigma" in pairs:
        sigma = _pop_float(pairs, "sigma", where)
        return sigma * sigma
    return _pop_float(pairs, "var", where, default=1.0)


def _reject_leftover(pairs: dict[str, str], where: str) -> None:
    if pairs:
        raise UsageError(f"{where}: unknown key(s) {sorted(pairs)}")


def parse_noise_spec(text: str):
    """Parse the noise mini-grammar, e.g. ``ar1:theta=0.2,var=1``."""
    name, _, body = text.partition(":")
    name = name.strip().lower()
    where = f"noise spec {text!r}"
    pairs = _parse_pairs(body, where)
    if name == "white":
        variance = _pop_variance(pairs, where)
        _reject_leftover(pairs, where)
        return WhiteGaussian(variance)
    if name == "ma1":
        a = _pop_float(pairs, "a", where)
        variance = _pop_variance(pairs, where)
        _reject_leftover(pairs, where)
        return MA1(a, variance)
    if name == "ar1":
        theta = _pop_float(pairs, "theta", where)
        variance = _pop_variance(pairs, where)
        _reject_leftover(pairs, where)
        return AR1(theta, variance)
    if name == "maq":
        coeffs = []
        while f"b{len(coeffs) + 1}" in pairs:
            coeffs.append(_pop_float(pairs, f"b{len(coeffs) + 1}", where))
        if not coeffs:
            raise UsageError(f"{where}: needs coefficients b1..bq")
        variance = _pop_variance(pairs, where)
        _reject_leftover(pairs, where)
        return MAq(tuple(coeffs), variance)
    raise UsageError(f"{where}: unknown noise kind {name!r}")


def parse_trend_spec(text: str):
    """Parse the trend mini-grammar, e.g. ``linear:start=2,slope=0.1``."""
    name, _, body = text.partition(":")
    name = name.strip().lower()
    where = f"trend spec {text!r}"
    pairs = _parse_pairs(body, where)
    if name == "const":
        level = _pop_float(pairs, "level", where)
        _reject_leftover(pairs, where)
        return Constant(level)
    if name == "linear":
        start = _pop_float(pairs, "start", where)
        slope = _pop_float(pairs, "slope", where)
        _reject_leftover(pairs, where)
        return Linear(start, slope)
    if name == "sin":
        amp = _pop_float(pairs, "amp", where)
        rate = _pop_float(pairs, "rate", where)
        phase = _pop_float(pairs, "phase", where, default=0.0)
        _reject_leftover(pairs, where)
        return Sinusoid(amp, rate, phase)
    raise UsageError(f"{where}: unknown trend kind {name!r}")


def parse_init(text: str):
    if text == "first":
        return "first"
    try:
        return float(text)
    except ValueError:
        raise UsageError(f'init must be "first" or a number, got {text!r}') from None


def _print_pairs(pairs: list[tuple[str, object]]) -> None:
    width = max(len(k) for k, _ in pairs)
    for key, value in pairs:
        rendered = _fmt(value) if isinstance(value, float) else str(value)
        print(f"{key.ljust(width)}  {rendered}")


def _report_pairs(report) -> list[tuple[str, object]]:
    return [
        ("alpha", report.alpha),
        ("variance_term", report.variance_term),
        ("correlation_term", report.correlation_term),
        ("trend_term", report.trend_term),
        ("total", report.total),
        ("truncation_lag", report.truncation_lag),
        ("truncation_residual_bound", report.truncation_residual_bound),
    ]


def _cmd_smooth(args) -> int:
    observations = read_csv_column(args.input, args.column)
    trajectory = ses_run(observations, args.alpha, parse_init(args.init))
    steps = np.arange(1, len(observations) + 1)
    header = ["t", "x", "m_hat"]
    columns = [steps, observations, trajectory[1:]]
    if args.out:
        write_csv(args.out, header, columns)
        print(args.out)
    else:
        print(format_csv(header, columns), end="")
    return 0


def _cmd_simulate(args) -> int:
    smoothed = simulate_smoothed(
        parse_noise_spec(args.noise),
        parse_trend_spec(args.trend),
        args.alpha,
        args.steps,
        args.seed,
        parse_init(args.init),
        args.burn_in,
    )
    if args.out:
        write_results(smoothed, args.out, "csv")
        print(args.out)
    else:
        header = ["t", "x", "m_star", "m_hat"]
        columns = [smoothed.steps, smoothed.observations, smoothed.trend, smoothed.estimates]
        print(format_csv(header, columns), end="")
    if args.svg:
        write_results(smoothed, args.svg, "svg")
        print(args.svg)
    return 0


def _cmd_bound(args) -> int:
    noise = parse_noise_spec(args.noise)
    report = tracking_bound(args.alpha, noise.autocovariance_fn(), args.k, tol=args.tol)
    if args.json:
        print(json.dumps(dataclasses.asdict(report)))
    else:
        _print_pairs(_report_pairs(report))
    return 0


def _cmd_optimize_alpha(args) -> int:
    noise = parse_noise_spec(args.noise)
    result = optimize_alpha(noise.autocovariance_fn(), args.k, search_tol=args.tol)
    if args.json:
        payload = {
            "alpha": result.alpha,
            "degenerate": result.degenerate,
            "report": dataclasses.asdict(result.report),
        }
        print(json.dumps(payload))
    else:
        _print_pairs([("alpha_star", result.alpha), ("degenerate", result.degenerate)])
        _print_pairs(_report_pairs(result.report))
    return 0


def _require(args, names: list[str], mode: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"mse --mode {mode} requires {', '.join(missing)}")


def _cmd_mse(args) -> int:
    noise = parse_noise_spec(args.noise)
    trend = parse_trend_spec(args.trend)
    if args.mode == "exact":
        _require(args, ["alpha", "steps"], "exact")
        sequence = exact_mse_sequence(
            args.alpha, noise.autocovariance_fn(), trend, args.steps, args.d1
        )
        if args.out:
            write_csv(args.out, ["t", "mse"], [np.arange(1, len(sequence) + 1), sequence])
            print(args.out)
        summary = {"final_mse": float(sequence[-1])}
    else:
        _require(args, ["alpha", "steps", "reps", "seed"], "mc")
        config = ExperimentConfig(
            noise,
            trend,
            args.alpha,
            args.steps,
            args.reps,
            args.seed,
            parse_init(args.init),
        )
        curve = monte_carlo_mse(config, workers=args.workers)
        if args.out:
            write_results(curve, args.out, "csv")
            print(args.out)
        summary = {
            "tail_mean": curve.tail_mean,
            "tail_se": curve.tail_se,
            "tail_max": curve.tail_max,
            "tail_start": curve.tail_start,
            "replications": curve.replications,
        }
    if args.json:
        print(json.dumps(summary))
    else:
        _print_pairs(list(summary.items()))
    return 0


def _cmd_verify(args) -> int:
    config, output = load_experiment_config(args.config)
    if args.reps is not None:
        config = dataclasses.replace(config, replications=args.reps)
    check = verify_bound(config, workers=args.workers)
    if output.get("csv"):
        write_results(check.curve, output["csv"], "csv")
    if output.get("svg"):
        write_results(check.curve, output["svg"], "svg")
    if args.json:
        payload = {
            "passed": check.passed,
            "empirical_tail": check.empirical_tail,
            "tail_se": check.tail_se,
            "bound_total": check.bound.total,
            "margin": check.margin,
            "bound": dataclasses.asdict(check.bound),
        }
        print(json.dumps(payload))
    else:
        _print_pairs(
            [
                ("empirical_tail", check.empirical_tail),
                ("tail_se", check.tail_se),
                ("bound_total", check.bound.total),
                ("margin", check.margin),
                ("result", "PASS" if check.passed else "FAIL"),
            ]
        )
    return 0 if check.passed else 3


def _cmd_reproduce(args) -> int:
    for path in reproduce_figure(args.figure, args.outdir, args.seed):
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sestrack",
        description="Exponential smoothing as constant-rate gradient tracking: "
        "simulate, smooth, bound, verify.",
        epilog=SPEC_GRAMMAR,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("smooth", help="smooth a CSV column")
    p.add_argument("--input", required=True, help="input CSV file")
    p.add_argument("--column", required=True, help="column holding the observations")
    p.add_argument("--alpha", type=float, required=True, help="smoothing parameter in (0,1)")
    p.add_argument("--init", default="first", help='initial estimate: "first" or a number')
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.set_defaults(handler=_cmd_smooth)

    p = sub.add_parser("simulate", help="simulate a trend-stationary path and smooth it")
    p.add_argument("--trend", required=True, help="trend spec (see grammar)")
    p.add_argument("--noise", required=True, help="noise spec (see grammar)")
    p.add_argument("--alpha", type=float, required=True, help="smoothing parameter in (0,1)")
    p.add_argument("--steps", type=int, required=True, help="horizon T")
    p.add_argument("--seed", type=int, required=True, help="64-bit seed")
    p.add_argument("--init", default="first", help='initial estimate: "first" or a number')
    p.add_argument("--burn-in", type=int, default=0, help="noise steps discarded before t=1")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.add_argument("--svg", help="also write an overlay plot to this path")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("bound", help="evaluate the asymptotic tracking bound")
    p.add_argument("--alpha", type=float, required=True, help="smoothing parameter in (0,1)")
    p.add_argument("--k", type=float, required=True, help="trend one-step increment bound")
    p.add_argument("--noise", required=True, help="noise spec (see grammar)")
    p.add_argument("--tol", type=float, default=1e-14, help="series truncation tolerance")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(handler=_cmd_bound)

    p = sub.add_parser("optimize-alpha", help="minimize the bound total over alpha")
    p.add_argument("--k", type=float, required=True, help="trend one-step increment bound")
    p.add_argument("--noise", required=True, help="noise spec (see grammar)")
    p.add_argument("--tol", type=float, default=1e-6, help="search tolerance in alpha")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(handler=_cmd_optimize_alpha)

    p = sub.add_parser("mse", help="exact or Monte Carlo mean squared tracking error")
    p.add_argument("--mode", choices=("exact", "mc"), required=True, help="evaluation mode")
    p.add_argument("--alpha", type=float, help="smoothing parameter in (0,1)")
    p.add_argument("--noise", required=True, help="noise spec (see grammar)")
    p.add_argument("--trend", required=True, help="trend spec (see grammar)")
    p.add_argument("--steps", type=int, help="horizon T")
    p.add_argument("--d1", choices=("paper", "variance"), default="paper",
                   help="initial condition of the exact recursion")
    p.add_argument("--reps", type=int, help="replications (mc mode)")
    p.add_argument("--seed", type=int, help="master seed (mc mode)")
    p.add_argument("--init", default="first", help='initial estimate (mc mode)')
    p.add_argument("--workers", type=int,
                   help="worker threads (mc mode; default: $SESTRACK_WORKERS or 1)")
    p.add_argument("--out", help="output CSV path")
    p.add_argument("--json", action="store_true", help="machine-readable summary")
    p.set_defaults(handler=_cmd_mse)

    p = sub.add_parser("verify", help="check the bound against an experiment config")
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--reps", type=int, help="override the configured replications")
    p.add_argument("--workers", type=int,
                   help="worker threads (default: $SESTRACK_WORKERS or 1)")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("reproduce", help="re-run a published figure configuration")
    p.add_argument("--figure", required=True, help="figure id: 1a 1b 2a 2b 3a 3b")
    p.add_argument("--outdir", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=DEFAULT_FIGURE_SEED, help="path seed")
    p.set_defaults(handler=_cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(SPEC_GRAMMAR, file=sys.stderr, end="")
        return 2
    except (ValueError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())
