"""Command-line front end.

Exit status is 0 whenever the evaluation ran, whatever the verdict. Errors map
to distinct codes: 2 usage, 3 malformed spec or configuration, 4 exponents
out of range, 5 unreadable or unwritable files.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import reports
from .criteria import eval_corollary, eval_theorem
from .errors import ConfigError, ExponentError, WeightError
from .normest import norm_growth_profile
from .operator import build_inclusion_matrix
from .reproduce import reproduce_example
from .transform import ExponentPair, Series, alternating, impulse, random_series, transform_differences
from .weights import parse_weight_spec, read_csv_values

OUTPUT_DIR_ENV = "NBAR_INCLUSION_OUTPUT_DIR"

EXIT_OK, EXIT_USAGE, EXIT_SPEC, EXIT_EXPONENT, EXIT_IO = 0, 2, 3, 4, 5


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_exponents(parser, need_s=True):
    parser.add_argument("--k", type=float, required=True, help="source exponent, 1 < k")
    if need_s:
        parser.add_argument("--s", type=float, default=None, help="target exponent, k <= s (default: k)")


def _add_grid(parser):
    parser.add_argument("--grid", type=_int_list, default=None, help="sample points m (default 2^4..2^12)")
    parser.add_argument("--truncation", type=int, default=None, help="truncation M for infinite tails (default 4*max(grid))")


def _add_output(parser):
    parser.add_argument("--output", "-o", default=None, help=f"output file (default: ${OUTPUT_DIR_ENV}/<command>.<format>, else stdout)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nbar-inclusion",
        description="Decide inclusions |N,p|_k => |N,q|_s between absolute weighted-mean summability methods.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="evaluate both inclusion conditions")
    p.add_argument("--p", required=True, help="weights p: family[:param[:offset]], inline JSON, or .json/.csv path")
    p.add_argument("--q", required=True, help="weights q (same forms as --p)")
    _add_exponents(p)
    _add_grid(p)
    _add_output(p)

    p = sub.add_parser("transform", help="weighted-mean transform of a series prefix")
    p.add_argument("--p", required=True)
    p.add_argument("--series", required=True, help="CSV path, or impulse:J, alternating, random:SEED")
    p.add_argument("--length", type=int, default=200, help="length for generated series")
    p.add_argument("--k", type=float, default=2.0, help="exponent for the summability functionals")
    _add_output(p)

    p = sub.add_parser("norm-profile", help="norm estimates on nested finite sections")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    _add_exponents(p)
    p.add_argument("--sections", type=_int_list, default=[64, 128, 256, 512, 1024])
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--witness-csv", default=None, help="write the largest section's witness vector here")
    _add_output(p)

    p = sub.add_parser("reproduce", help="reproduce worked example 1 or 2")
    p.add_argument("example", type=int, choices=(1, 2))
    p.add_argument("--k", type=float, default=2.0)
    p.add_argument("--s", type=float, default=3.0)
    _add_grid(p)
    _add_output(p)

    p = sub.add_parser("corollary", help="evaluate corollary 1, 2, 3 or 4")
    p.add_argument("number", type=int, choices=(1, 2, 3, 4))
    p.add_argument("--p", default=None)
    p.add_argument("--q", default=None)
    _add_exponents(p)
    _add_grid(p)
    _add_output(p)

    p = sub.add_parser("dump-matrix", help="dense CSV of a small finite section (N <= 100)")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    _add_exponents(p)
    p.add_argument("--N", type=int, default=20)
    p.add_argument("--output", "-o", required=True)
    return parser


def _exponents(args):
    s = args.k if getattr(args, "s", None) is None else args.s
    return ExponentPair(args.k, s)


def _weights(text, what):
    if text is None:
        return None
    try:
        return parse_weight_spec(text)
    except WeightError as exc:
        raise WeightError(f"--{what}: {exc}") from None


def _series(text, length):
    if text == "alternating":
        return alternating(length)
    head, _, arg = text.partition(":")
    try:
        if head == "impulse":
            return impulse(int(arg), length)
        if head == "random":
            return random_series(length, int(arg or 0))
    except (ValueError, IndexError):
        raise ConfigError(f"malformed series spec {text!r}") from None
    return Series(read_csv_values(text))


def _emit(args, json_payload, csv_header, csv_rows):
    text = reports.dumps(json_payload) if args.format == "json" else reports.to_csv(csv_header, csv_rows)
    path = args.output
    if path is None and os.environ.get(OUTPUT_DIR_ENV):
        path = Path(os.environ[OUTPUT_DIR_ENV]) / f"{args.command}.{args.format}"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def _run(args):
    if args.command == "check":
        exp = _exponents(args)
        verdict = eval_theorem(_weights(args.p, "p"), _weights(args.q, "q"), exp, args.grid, args.truncation)
        _emit(args, verdict.to_dict(), ["conditionId", "m", "value"], reports.verdict_rows(verdict))
    elif args.command == "transform":
        w = _weights(args.p, "p")
        result = transform_differences(w, _series(args.series, args.length), args.k)
        payload = {"params": {"p": w.to_dict(), "series": args.series}, **result.to_dict()}
        _emit(args, payload, ["n", "T", "X"], reports.transform_rows(result))
    elif args.command == "norm-profile":
        exp = _exponents(args)
        p, q = _weights(args.p, "p"), _weights(args.q, "q")
        profile = norm_growth_profile(p, q, exp, args.sections, restarts=args.restarts, seed=args.seed)
        payload = {
            "params": {"p": p.to_dict(), "q": q.to_dict(), "k": exp.k, "s": exp.s},
            "profile": [e.to_dict() for e in profile],
        }
        _emit(args, payload, ["N", "norm"], reports.profile_rows(profile))
        if args.witness_csv:
            reports.write_witness_csv(args.witness_csv, profile[-1].estimate.witness)
    elif args.command == "reproduce":
        report = reproduce_example(args.example, ExponentPair(args.k, args.s), args.grid, args.truncation)
        _emit(args, report.to_dict(), ["bound", "m", "value"], reports.example_rows(report))
    elif args.command == "corollary":
        exp = _exponents(args)
        verdict = eval_corollary(
            args.number, _weights(args.p, "p"), _weights(args.q, "q"), exp, args.grid, args.truncation
        )
        _emit(args, verdict.to_dict(), ["conditionId", "m", "value"], reports.verdict_rows(verdict))
    elif args.command == "dump-matrix":
        A = build_inclusion_matrix(_weights(args.p, "p"), _weights(args.q, "q"), _exponents(args), args.N)
        A.to_csv(args.output)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _run(args)
    except ExponentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXPONENT
    except (WeightError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except OSError as exc:
        print(f"error: cannot access {exc.filename or exc}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
