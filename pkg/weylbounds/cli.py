"""Command-line front end: one subcommand per experiment."""

import argparse
import csv
import io
import json
import logging
import sys
import time
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence

from weylbounds import __version__
from weylbounds.completion import CompletionMode, completed_sum, domination_check
from weylbounds.config import apply_config, load_config
from weylbounds.core.phase import PhasePoint
from weylbounds.core.sums import WeightSequence, weyl_sum_direct, weyl_sum_fast
from weylbounds.covering import (
    COVERING_COLUMNS,
    DEFAULT_GRID_CAP,
    covering_sweep,
    dyadic_schedule,
    exponent_identity_residual,
    fit_count_exponent,
    random_bases,
    stability_sweep,
)
from weylbounds.dimension import TABLE_COLUMNS, dim_upper_bound, dim_upper_bound_exact, dimension_table
from weylbounds.errors import InvalidParameterError, WeylBoundsError
from weylbounds.exceptional import growth_profile, superlevel_fraction
from weylbounds.meanvalue import (
    DEFAULT_ENUMERATION_CAP,
    completed_moment,
    mc_moment,
    moment_exponent_fit,
    new_seed,
    s_of,
    vinogradov_count,
    vinogradov_count_naive,
)
from weylbounds.records import RunRecord, outputs_match, validate_output

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
# argparse dests that steer the run but not its result
RUN_CONTROL_DESTS = frozenset({"command", "verbose", "quiet", "config", "out", "format", "threads", "validate"})
STOCHASTIC_COMMANDS = frozenset({"moment", "stability", "exceptional"})
MOMENT_COLUMNS = ("N", "mean", "stderr", "samples", "s", "d", "seed", "functional")


@dataclass
class CommandResult:
    outputs: Dict[str, Any]
    rows: Optional[List[Dict[str, Any]]] = None
    columns: Sequence[str] = ()


def _point(args) -> PhasePoint:
    x = PhasePoint.parse(args.x) if args.x else PhasePoint.zero(args.d)
    if x.d != args.d:
        raise InvalidParameterError(f"-x has {x.d} coordinates but -d is {args.d}")
    return x


def _mode(args, default: CompletionMode) -> CompletionMode:
    return CompletionMode(args.mode) if args.mode else default


def cmd_sum(args) -> CommandResult:
    x = _point(args)
    value = weyl_sum_direct(x, args.N) if args.method == "direct" else weyl_sum_fast(x, args.N)
    return CommandResult(
        {
            "d": args.d,
            "N": args.N,
            "x": str(x),
            "method": args.method,
            "real": value.real,
            "imag": value.imag,
            "modulus": abs(value),
        }
    )


def cmd_completed(args) -> CommandResult:
    x = _point(args)
    mode = _mode(args, CompletionMode.SYMMETRIZED)
    outputs = completed_sum(x, args.N, mode).to_dict(include_spectrum=args.spectrum)
    outputs["x"] = str(x)
    if args.domination:
        outputs["domination"] = domination_check(x, args.N, mode).to_dict()
    return CommandResult(outputs)


def cmd_moment(args) -> CommandResult:
    s = args.s if args.s is not None else s_of(args.d)
    mode = _mode(args, CompletionMode.SYMMETRIZED)
    estimates = []
    for N in args.N:
        if args.completed:
            est = completed_moment(args.d, N, args.samples, args.seed, mode=mode, s=s, workers=args.threads)
        else:
            weights = WeightSequence.random_unimodular(N, args.seed) if args.weights == "random" else None
            est = mc_moment(args.d, N, s, weights, args.samples, args.seed, workers=args.threads)
        estimates.append(est)
    fit = moment_exponent_fit([(e.N, e.mean) for e in estimates]) if len(estimates) >= 3 else None
    rows = [{k: e.to_dict()[k] for k in MOMENT_COLUMNS} for e in estimates]
    outputs = {
        "seed": args.seed,
        "estimates": [e.to_dict() for e in estimates],
        "fit": fit.to_dict() if fit else None,
    }
    return CommandResult(outputs, rows, MOMENT_COLUMNS)


def cmd_vinogradov(args) -> CommandResult:
    s = args.s if args.s is not None else s_of(args.d)
    count = vinogradov_count_naive if args.naive else vinogradov_count
    return CommandResult(count(args.d, s, args.N, cap=args.cap).to_dict())


def cmd_boxes(args) -> CommandResult:
    mode = _mode(args, CompletionMode.LITERAL)
    rows = covering_sweep(
        args.d, args.alpha, args.eps, args.i_min, args.i_max, mode, workers=args.threads, cap=args.cap
    )
    fit = None
    if sum(1 for r in rows if r["counted_upper"] > 0) >= 3:
        fit = fit_count_exponent(rows)
    outputs = {
        "d": args.d,
        "alpha": args.alpha,
        "eps": args.eps,
        "mode": mode.value,
        "rows": rows,
        "fit": fit,
        "identity_residual": exponent_identity_residual(args.d, args.alpha, args.eps),
        "proxy": "finite-N superlevel boxes for the limsup set E_{d,alpha+eta}",
    }
    return CommandResult(outputs, rows, COVERING_COLUMNS)


def cmd_stability(args) -> CommandResult:
    mode = _mode(args, CompletionMode.SYMMETRIZED)
    if args.x:
        bases = [_point(args)]
    else:
        top = dyadic_schedule(args.i_min, args.i_max)[-1]
        bases = random_bases(args.d, top, args.alpha, args.bases, args.seed, mode)
    sweep = stability_sweep(
        bases, args.alpha, args.eps, args.i_min, args.i_max, args.probes, args.seed, mode
    )
    outputs = sweep.to_dict()
    outputs["seed"] = args.seed
    outputs["bases"] = [str(x) for x in bases]
    return CommandResult(outputs)


def cmd_dimbound(args) -> CommandResult:
    outputs = dim_upper_bound(args.d, args.alpha).to_dict()
    if args.exact:
        outputs["u_exact"] = str(dim_upper_bound_exact(args.d, args.alpha))
    return CommandResult(outputs)


def cmd_table(args) -> CommandResult:
    rows = dimension_table(args.ds, args.alphas)
    return CommandResult({"rows": rows}, rows, TABLE_COLUMNS)


def cmd_exceptional(args) -> CommandResult:
    fractions = [
        superlevel_fraction(args.d, N, args.alpha, args.samples, args.seed, args.threads).to_dict()
        for N in args.N
    ]
    profile = growth_profile(args.d, args.N, args.samples, args.seed, args.threads)
    outputs = {
        "seed": args.seed,
        "superlevel": fractions,
        "growth": profile.to_dict(),
        "proxy": "single-N estimates; no claim about limsup sets",
    }
    return CommandResult(outputs)


COMMANDS: Dict[str, Callable[[argparse.Namespace], CommandResult]] = {
    "sum": cmd_sum,
    "completed": cmd_completed,
    "moment": cmd_moment,
    "vinogradov": cmd_vinogradov,
    "boxes": cmd_boxes,
    "stability": cmd_stability,
    "dimbound": cmd_dimbound,
    "table": cmd_table,
    "exceptional": cmd_exceptional,
}


def _common_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("Run Control")
    group.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level")
    group.add_argument("-q", "--quiet", action="store_true", help="Log warnings and errors only")
    group.add_argument("--config", type=str, default=None, help="key=value file read below the flags")
    group.add_argument("--out", type=str, default=None, help="Directory for a content-addressed run record")
    group.add_argument("--format", choices=["json", "csv"], default="json", help="Output format (default: json)")
    group.add_argument("--threads", type=int, default=1, help="Worker threads (default: 1)")
    group.add_argument("--validate", action="store_true", help="Check the JSON output against its schema")
    return parent


def _add_point_args(parser: argparse.ArgumentParser, N_default: int = 100) -> None:
    group = parser.add_argument_group("Sum Options")
    group.add_argument("-d", type=int, default=2, help="Polynomial degree (default: 2)")
    group.add_argument("-N", type=int, default=N_default, help=f"Sum length (default: {N_default})")
    group.add_argument("-x", type=str, default=None, help="Point of T_d, e.g. 0.3,1/5 (default: origin)")


def _add_mode(group, default_label: str) -> None:
    group.add_argument(
        "--mode",
        choices=[m.value for m in CompletionMode],
        default=None,
        help=f"Completion weights (default: {default_label})",
    )


def _add_seed(group, samples: int) -> None:
    group.add_argument("--seed", type=int, default=None, help="64-bit seed (generated and logged if absent)")
    group.add_argument("--samples", type=int, default=samples, help=f"Monte Carlo samples (default: {samples})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weylbounds",
        description="Numerical experiments on Weyl sums and the dimension of their large-value sets",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s sum -d 2 -N 5 -x 0,0.2
  %(prog)s completed -d 2 -N 16 -x 0,0 --mode literal
  %(prog)s moment -d 2 -N 8 16 32 -s 3 --samples 100000 --seed 7
  %(prog)s vinogradov -d 2 -s 3 -N 2
  %(prog)s boxes -d 2 --alpha 0.7 --eps 0.05 --i-min 2 --i-max 6 --threads 8
  %(prog)s stability -d 2 --alpha 0.8 --eps 0.1 --i-min 6 --i-max 10 --bases 50 --seed 1
  %(prog)s dimbound -d 2 --alpha 0.75 --exact
  %(prog)s table --ds 2 3 4 --alphas 0.6 0.75 0.9 --format csv
  %(prog)s replay runs/moment-0123456789abcdef.json
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _common_parent()
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sum", parents=[common], help="Evaluate S_d(x; N)")
    _add_point_args(p)
    method = p.add_mutually_exclusive_group()
    method.add_argument("--fast", dest="method", action="store_const", const="fast", help="Difference recurrence (default)")
    method.add_argument("--direct", dest="method", action="store_const", const="direct", help="Exact term-by-term oracle")
    p.set_defaults(method="fast")

    p = sub.add_parser("completed", parents=[common], help="Completed sum W_d(x; N)")
    _add_point_args(p, N_default=16)
    group = p.add_argument_group("Completion Options")
    _add_mode(group, "symmetrized")
    group.add_argument("--spectrum", action="store_true", help="Include the N inner-sum moduli")
    group.add_argument("--domination", action="store_true", help="Also report max_M |S_d(x; M)| / W_d")

    p = sub.add_parser("moment", parents=[common], help="Monte Carlo moments and growth exponent")
    group = p.add_argument_group("Moment Options")
    group.add_argument("-d", type=int, default=2, help="Polynomial degree (default: 2)")
    group.add_argument("-N", type=int, nargs="+", default=[8], help="One or more sum lengths (default: 8)")
    group.add_argument("-s", type=int, default=None, help="Half-order of the moment (default: s(d))")
    group.add_argument("--completed", action="store_true", help="Moments of W_d instead of |S_d|")
    group.add_argument("--weights", choices=["unit", "random"], default="unit", help="a_n for |S_d| moments")
    _add_mode(group, "symmetrized")
    _add_seed(group, samples=100_000)

    p = sub.add_parser("vinogradov", parents=[common], help="Exact Vinogradov system count J_{s,d}(N)")
    group = p.add_argument_group("Enumeration Options")
    group.add_argument("-d", type=int, default=2, help="Polynomial degree (default: 2)")
    group.add_argument("-s", type=int, default=None, help="Number of variables per side (default: s(d))")
    group.add_argument("-N", type=int, default=2, help="Range [1, N] (default: 2)")
    group.add_argument("--naive", action="store_true", help="Brute-force over all 2s-tuples")
    group.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP, help="Largest N^(2s) to enumerate")

    p = sub.add_parser("boxes", parents=[common], help="Superlevel box counts along dyadic N")
    group = p.add_argument_group("Covering Options")
    group.add_argument("-d", type=int, default=2, help="Polynomial degree (default: 2)")
    group.add_argument("--alpha", type=float, default=0.7, help="Level exponent (default: 0.7)")
    group.add_argument("--eps", type=float, default=0.05, help="Box inflation exponent (default: 0.05)")
    group.add_argument("--i-min", type=int, default=2, help="First dyadic exponent (default: 2)")
    group.add_argument("--i-max", type=int, default=6, help="Last dyadic exponent (default: 6)")
    group.add_argument("--cap", type=int, default=DEFAULT_GRID_CAP, help="Largest box grid to evaluate")
    _add_mode(group, "literal")

    p = sub.add_parser("stability", parents=[common], help="Probe W_d on boxes around large values")
    group = p.add_argument_group("Stability Options")
    group.add_argument("-d", type=int, default=2, help="Polynomial degree (default: 2)")
    group.add_argument("-x", type=str, default=None, help="Single base point (default: random bases)")
    group.add_argument("--alpha", type=float, default=0.8, help="Level exponent (default: 0.8)")
    group.add_argument("--eps", type=float, default=0.1, help="Box shrink exponent (default: 0.1)")
    group.add_argument("--i-min", type=int, default=6, help="First dyadic exponent (default: 6)")
    group.add_argument("--i-max", type=int, default=8, help="Last dyadic exponent (default: 8)")
    group.add_argument("--bases", type=int, default=10, help="Random bases when -x is absent (default: 10)")
    group.add_argument("--probes", type=int, default=100, help="Probes per base (default: 100)")
    group.add_argument("--seed", type=int, default=None, help="64-bit seed (generated and logged if absent)")
    _add_mode(group, "symmetrized")

    p = sub.add_parser("dimbound", parents=[common], help="Closed-form bound u(d, alpha)")
    group = p.add_argument_group("Dimension Options")
    group.add_argument("-d", type=int, default=2, help="Polynomial degree (default: 2)")
    group.add_argument("--alpha", type=float, default=0.75, help="Level exponent (default: 0.75)")
    group.add_argument("--exact", action="store_true", help="Also give u as an exact rational")

    p = sub.add_parser("table", parents=[common], help="u(d, alpha) over a grid of d and alpha")
    group = p.add_argument_group("Table Options")
    group.add_argument("--ds", type=int, nargs="+", default=[2, 3, 4, 5, 6], help="Degrees")
    group.add_argument("--alphas", type=float, nargs="+", default=[0.6, 0.7, 0.8, 0.9], help="Level exponents")

    p = sub.add_parser("exceptional", parents=[common], help="Measure of {|S_d| >= N^alpha} and typical growth")
    group = p.add_argument_group("Exceptional Set Options")
    group.add_argument("-d", type=int, default=2, help="Polynomial degree (default: 2)")
    group.add_argument("-N", type=int, nargs="+", default=[64, 256, 1024], help="Sum lengths")
    group.add_argument("--alpha", type=float, default=0.75, help="Level exponent (default: 0.75)")
    _add_seed(group, samples=10_000)

    p = sub.add_parser("replay", parents=[common], help="Re-run a run record and compare outputs")
    p.add_argument("record", type=str, help="Path to a run record JSON file")
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    values = load_config(known.config)
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    known_keys = set()
    for sub in subparsers.choices.values():
        apply_config(sub, values)
        known_keys |= {a.dest for a in sub._actions}
    unknown = sorted(set(values) - known_keys)
    if unknown:
        raise InvalidParameterError(f"unknown config keys: {', '.join(unknown)}")


def _params(args: argparse.Namespace) -> Dict[str, Any]:
    return {k: v for k, v in sorted(vars(args).items()) if k not in RUN_CONTROL_DESTS and k != "seed"}


def format_csv(rows: List[Dict[str, Any]], columns: Sequence[str]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format(row[c], ".17g") if isinstance(row[c], float) else row[c] for c in columns])
    return buffer.getvalue()


def execute(args: argparse.Namespace) -> CommandResult:
    if args.command in STOCHASTIC_COMMANDS and args.seed is None:
        args.seed = new_seed()
        logger.info(f"No --seed given; using seed {args.seed}")
    return COMMANDS[args.command](args)


def replay(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    record = RunRecord.load(args.record)
    if record.command not in COMMANDS:
        raise InvalidParameterError(f"cannot replay command {record.command!r}")
    rerun = parser.parse_args([record.command])
    vars(rerun).update(record.params)
    rerun.seed = record.seed
    rerun.threads = args.threads
    result = execute(rerun)
    if outputs_match(result.outputs, record.outputs):
        logger.info(f"Replay of {args.record} reproduced its outputs")
        return 0
    logger.error(f"Replay of {args.record} produced different outputs")
    return 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.INFO, format=LOG_FORMAT)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    except WeylBoundsError as e:
        logger.error(str(e))
        return e.exit_code
    logging.getLogger().setLevel(logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO)
    if args.threads < 1:
        logger.error("--threads must be a positive integer")
        return 2

    try:
        if args.command == "replay":
            return replay(args, parser)
        started = time.perf_counter()
        result = execute(args)
        elapsed = time.perf_counter() - started
        if args.validate:
            validate_output(result.outputs, args.command)
        if args.format == "csv":
            if result.rows is None:
                raise InvalidParameterError(f"{args.command} has no CSV form; use --format json")
            sys.stdout.write(format_csv(result.rows, result.columns))
        else:
            sys.stdout.write(json.dumps(result.outputs, indent=2) + "\n")
        if args.out:
            record = RunRecord(
                command=args.command,
                params=_params(args),
                seed=getattr(args, "seed", None),
                outputs=result.outputs,
                elapsed=elapsed,
            )
            record.write(args.out)
        return 0
    except WeylBoundsError as e:
        logger.error(str(e))
        return e.exit_code
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return 1
