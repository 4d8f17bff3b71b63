"""Command-line driver: ``simulate``, ``estimate``, ``km`` and ``rate-check``.

Exit status is 0 on success, 1 on a usage error and 2 on a data or
validation error. Output files are written only after all work succeeds.
The resolved configuration is printed to stderr as one JSON line (unless
``--quiet``) and embedded in JSON outputs.
"""

from __future__ import annotations

import argparse
import io
import json
import sys

from .harness import ExperimentConfig, MonteCarloError, run_monte_carlo
from .regression import GSource, estimate_on_grid
from .sampledata import DataError, EvaluationGrid, format_float, read_sample_csv, validate_sample, write_sample_csv
from .smoothing import BandwidthRule, KernelSpec, bandwidth_for
from .survival import km_censoring_survival
from .synthetic import FAMILIES, ModelSpec, generate_dataset, true_censoring_survival, true_regression


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _n_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers") from None


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--quiet", action="store_true")

    smoothing = _Parser(add_help=False)
    smoothing.add_argument("--kernel", choices=["gaussian", "epanechnikov"], default="gaussian")
    bw = smoothing.add_mutually_exclusive_group()
    bw.add_argument("--bandwidth-const", type=float, default=None, help="c in h = c (log n / n)^(1/(d+2))")
    bw.add_argument("--bandwidth", type=float, default=None, help="fixed bandwidth h")
    smoothing.add_argument("--grid-min", type=float, default=-1.5)
    smoothing.add_argument("--grid-max", type=float, default=1.5)
    smoothing.add_argument("--grid-points", type=_positive_int, default=61)

    model = _Parser(add_help=False)
    model.add_argument("--model", choices=FAMILIES, default="linear")
    model.add_argument("--rho", type=float, default=0.9)
    model.add_argument("--lambda", dest="lam", type=float, default=1.5)

    p = _Parser(prog="censkern", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", parents=[common, model], help="draw a synthetic censored sample")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--uncensored", action="store_true", help="set every censoring time to +inf")

    e = sub.add_parser("estimate", parents=[common, smoothing], help="censored kernel regression on a CSV sample")
    e.add_argument("--in", dest="input", required=True)
    e.add_argument("--g", choices=["km", "oracle", "none"], default="km")
    e.add_argument("--lambda", dest="lam", type=float, default=None, help="exponential censoring rate for --g oracle")
    e.add_argument("--truth", choices=FAMILIES, default=None, help="add an m_true column for this model")
    e.add_argument("--rho", type=float, default=0.9, help="rho used by --truth")

    k = sub.add_parser("km", parents=[common], help="Kaplan-Meier curve of the censoring law")
    k.add_argument("--in", dest="input", required=True)

    r = sub.add_parser("rate-check", parents=[common, model, smoothing], help="Monte Carlo rate study")
    r.add_argument("--n-list", type=_n_list, default=[250, 500, 1000, 2000, 4000])
    r.add_argument("--reps", type=_positive_int, default=200)
    r.add_argument("--g-sources", default="km,oracle")
    r.add_argument("--jobs", type=_positive_int, default=1, help="worker processes (does not change results)")
    r.add_argument("--raw-out", default=None, help="also write per-replication errors as CSV")
    return p


def _bandwidth_rule(args) -> BandwidthRule:
    if args.bandwidth is not None:
        return BandwidthRule.fixed(args.bandwidth)
    return BandwidthRule.optimal(1.0 if args.bandwidth_const is None else args.bandwidth_const)


def _echo(args, config: dict):
    if not args.quiet:
        print(json.dumps(config, sort_keys=True), file=sys.stderr)


def _emit(path, text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _load(path):
    with open(path, encoding="utf-8") as fh:
        sample = read_sample_csv(fh)
    report = validate_sample(sample)
    if not report.ok:
        v = report.violations[0]
        raise DataError(v.rule, v.index + 1)
    if len(sample) == 0:
        raise DataError("no observations")
    return sample


def _cmd_simulate(args):
    try:
        model = ModelSpec(args.model, args.rho, args.lam, args.n, args.seed, censored=not args.uncensored)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _echo(args, {"command": "simulate", "model": args.model, "rho": args.rho, "lambda": args.lam,
                 "n": args.n, "seed": args.seed, "uncensored": args.uncensored})
    buf = io.StringIO()
    write_sample_csv(generate_dataset(model), buf)
    _emit(args.out, buf.getvalue())


def _cmd_estimate(args):
    if args.g == "oracle" and args.lam is None:
        raise UsageError("--g oracle requires --lambda")
    if args.grid_max < args.grid_min:
        raise UsageError("--grid-max must not be below --grid-min")
    rule = _bandwidth_rule(args)
    sample = _load(args.input)
    d = sample.d
    spec = KernelSpec(args.kernel, d)
    if d == 1:
        grid = EvaluationGrid.linspace(args.grid_min, args.grid_max, args.grid_points)
    else:
        grid = EvaluationGrid.lattice([args.grid_min] * d, [args.grid_max] * d, args.grid_points)
    h = bandwidth_for(rule, len(sample), d)
    if args.g == "oracle":
        lam = args.lam
        g = GSource.oracle(lambda t: true_censoring_survival(lam, t))
    else:
        g = GSource(args.g)
    _echo(args, {"command": "estimate", "in": args.input, "kernel": args.kernel,
                 "bandwidth": {"kind": rule.kind, "value": rule.value}, "h": h, "n": len(sample),
                 "grid": [args.grid_min, args.grid_max, args.grid_points], "g": args.g, "lambda": args.lam,
                 "truth": args.truth, "rho": args.rho})
    est = estimate_on_grid(sample, spec, h, grid, g)
    xcols = ["x"] if d == 1 else [f"x{j + 1}" for j in range(d)]
    header = xcols + ["ell_n", "r1_n", "m_n"]
    truth = None
    if args.truth is not None:
        if d != 1:
            raise UsageError("--truth is only available for d = 1")
        truth = ModelSpec(args.truth, args.rho)
        header.append("m_true")
    lines = [",".join(header)]
    for e in est:
        row = [format_float(v) for v in e.x] + [format_float(e.ell), format_float(e.r1), format_float(e.m)]
        if truth is not None:
            row.append(format_float(true_regression(truth, e.x[0])))
        lines.append(",".join(row))
    _emit(args.out, "\n".join(lines) + "\n")


def _cmd_km(args):
    sample = _load(args.input)
    curve = km_censoring_survival(sample)
    _echo(args, {"command": "km", "in": args.input, "n": len(sample)})
    lines = ["t,value_right,value_left"]
    for t in curve.jump_times:
        lines.append(f"{format_float(t)},{format_float(curve(t, 'right'))},{format_float(curve(t, 'left'))}")
    _emit(args.out, "\n".join(lines) + "\n")


def _cmd_rate_check(args):
    try:
        config = ExperimentConfig(
            model=ModelSpec(args.model, args.rho, args.lam),
            n_values=tuple(args.n_list),
            replications=args.reps,
            grid=EvaluationGrid.linspace(args.grid_min, args.grid_max, args.grid_points),
            kernel=KernelSpec(args.kernel),
            bandwidth=_bandwidth_rule(args),
            g_sources=tuple(s.strip() for s in args.g_sources.split(",") if s.strip()),
            master_seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _echo(args, {"command": "rate-check", **config.to_dict()})

    def progress(n):
        if not args.quiet:
            print(f"n={n} done", file=sys.stderr)

    try:
        report = run_monte_carlo(config, n_jobs=args.jobs, progress=progress)
    except MonteCarloError as exc:
        raise DataError(str(exc)) from None
    text = report.to_json()
    raw = report.raw_csv() if args.raw_out else None
    _emit(args.out, text)
    if raw is not None:
        _emit(args.raw_out, raw)


_COMMANDS = {"simulate": _cmd_simulate, "estimate": _cmd_estimate, "km": _cmd_km, "rate-check": _cmd_rate_check}


def run(argv=None) -> int:
    """Run the CLI on ``argv`` and return the exit status."""
    try:
        args = _build_parser().parse_args(argv)
        _COMMANDS[args.command](args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
