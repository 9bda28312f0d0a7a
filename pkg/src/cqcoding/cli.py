"""Command-line front end.

Exit codes: 0 pass, 1 property violation, 2 input/validation error,
3 optimizer failure, 4 resource cap.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import coding, suites
from . import io as cio
from . import operators as ops
from .channel import CapacityError, as_distribution, capacity
from .reports import Report, fmt, to_csv
from .sequences import EnumerationCapError

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_OPTIMIZER, EXIT_CAP = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _probability(text: str) -> float:
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError("must lie strictly between 0 and 1")
    return value


def _tau(text: str) -> float:
    value = float(text)
    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError("must lie in (0, 1]")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def cmd_capacity(args) -> int:
    channel = cio.load_channel(args.channel)
    result = capacity(channel, tol=args.tol)
    lines = [
        f"capacity_bits,{result.capacity:.6f}",
        f"gap_bound_bits,{fmt(result.gap_bound)}",
        f"iterations,{result.iterations}",
        "maximizer," + ";".join(f"{label}={fmt(p)}" for label, p in zip(channel.labels, result.maximizer)),
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    rows = suites.run_suite(args.suite, args.trials, args.seed, workers=args.workers)
    _emit(to_csv(rows), args.out)
    return EXIT_OK if all(r.passed for _, r in rows) else EXIT_VIOLATION


def _parse_dist(text: str | None, channel) -> np.ndarray | None:
    if text is None:
        return None
    try:
        return as_distribution([float(x) for x in text.split(",")], channel.a)
    except ValueError as exc:
        raise UsageError(f"--dist: {exc}") from exc


def cmd_code_build(args) -> int:
    channel = cio.load_channel(args.channel)
    cap_result = capacity(channel, tol=args.tol)
    probs = _parse_dist(args.dist, channel)
    if probs is None:
        probs = cap_result.maximizer
    if args.n is None or args.lam is None:
        raise UsageError("code-build needs --n and --lambda")
    code, report = suites.code_report(channel, probs, args.n, args.lam, args.tau, args.dense_cap, cap_result)
    record = cio.code_to_dict(code, channel, args.lam, str(args.channel))
    if args.code:
        cio.save_json(args.code, record)
    summary = [
        f"size,{code.size}",
        f"rate,{fmt(code.rate)}",
        f"error,{fmt(coding.error_probability(code, channel))}",
        f"theorem2_log_size_bound,{fmt(coding.theorem2_size_bound(channel, probs, args.n, args.lam, args.tau))}",
        f"converse_log_size_bound,{fmt(coding.strong_converse_full_bound(channel, args.n, args.lam, cap_result))}",
        f"sandwich,{'pass' if report.passed else 'fail'}",
    ]
    _emit("\n".join(summary) + "\n" + to_csv([(0, report)]), args.out)
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_converse_check(args) -> int:
    channel = cio.load_channel(args.channel)
    if args.code is None:
        raise UsageError("converse-check needs --code")
    code, lam = cio.code_from_dict(cio.load_json(args.code), channel)
    if args.lam is not None:
        lam = args.lam
    if not 0 < lam < 1:
        raise UsageError("lambda must lie in (0, 1)")
    cap_result = capacity(channel, tol=args.tol)
    report = Report("converse_code", f"n={code.n};lambda={lam};M={code.size}")
    report.upper("error", lam, coding.error_probability(code, channel))
    log_m = max(code.log_size, 0.0)
    report.upper("converse_full", coding.strong_converse_full_bound(channel, code.n, lam, cap_result), log_m)
    subcodes = coding.constant_composition_subcodes(code, channel.a)
    if args.cc_filter:
        if subcodes:
            # subcodes are keyed in sorted type order, so max keeps the first of any tie
            counts = max(subcodes, key=lambda k: subcodes[k].size)
            subcodes = {counts: subcodes[counts]}
    elif len(subcodes) > 1:
        raise UsageError("code is not constant-composition; pass --cc-filter to check its largest single-type subcode")
    rows = [(0, report)]
    for counts, sub in subcodes.items():
        P = np.asarray(counts, dtype=float) / code.n
        report.upper("converse_cc", coding.strong_converse_cc_bound(channel, P, code.n, lam),
                     sub.log_size, "type=" + "/".join(map(str, counts)))
        rows.append((0, coding.modified_decoder_check(sub, channel, lam, args.dense_cap)))
    _emit(to_csv(rows), args.out)
    return EXIT_OK if all(r.passed for _, r in rows) else EXIT_VIOLATION


def cmd_holevo_check(args) -> int:
    kwargs = {}
    if args.channel:
        kwargs["channel"] = cio.load_channel(args.channel)
    rows = suites.run_suite("holevo", args.trials, args.seed, workers=args.workers, **kwargs)
    _emit(to_csv(rows), args.out)
    return EXIT_OK if all(r.passed for _, r in rows) else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cqcoding", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--trials", type=_positive_int, default=100)
    common.add_argument("--workers", type=_positive_int, default=1)
    common.add_argument("--dense-cap", type=_positive_int, default=ops.DEFAULT_DENSE_CAP)
    common.add_argument("--tol", type=_positive_float, default=1e-9, help="capacity duality-gap tolerance (bits)")
    common.add_argument("--channel", help="channel JSON file")
    common.add_argument("--code", help="code JSON file")
    common.add_argument("--n", type=_positive_int)
    common.add_argument("--lambda", dest="lam", type=_probability)
    common.add_argument("--tau", type=_tau, default=1.0)

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("capacity", parents=[common], help="capacity of a channel file")
    p.set_defaults(func=cmd_capacity)
    p = sub.add_parser("verify", parents=[common], help="run a Monte Carlo lemma suite")
    p.add_argument("--suite", required=True, choices=sorted(suites.SUITES))
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("code-build", parents=[common], help="greedy maximal code construction")
    p.add_argument("--dist", help="input distribution, comma-separated (default: capacity maximizer)")
    p.set_defaults(func=cmd_code_build)
    p = sub.add_parser("converse-check", parents=[common], help="strong-converse checks on a code file")
    p.add_argument("--cc-filter", action="store_true",
                   help="check the largest constant-composition subcode of a mixed-type code")
    p.set_defaults(func=cmd_converse_check)
    p = sub.add_parser("holevo-check", parents=[common], help="Holevo information bound on random measurements")
    p.set_defaults(func=cmd_holevo_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("capacity", "code-build", "converse-check") and not args.channel:
        parser.error(f"{args.command} needs --channel")
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OPTIMIZER
    except (ops.DimensionCapError, EnumerationCapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
