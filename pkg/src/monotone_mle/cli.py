"""Command-line entry point: ``monotone-mle {fit,simulate,selftest}``.

Exit status is 0 on success, 1 on invalid data or options, 2 on usage errors
(unknown flags, missing or unreadable input).
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .errors import MonotoneMLEError
from .families import BERNOULLI, FamilySpec, Kind
from .fit import Direction, fit
from .selftest import oracle_check
from .simulation import HypothesisSpec, Statistic, run_study
from .table import ObservationTable
from .tabular import Format, emit_fit, emit_report, load_dataset, parse_table

EXIT_INVALID = 1
EXIT_USAGE = 2


def _add_input(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="CSV file, or '-' for stdin")
    src.add_argument(
        "--builtin", action="store_true", help="use the bundled SAT-R no-show table"
    )
    p.add_argument("--format", choices=[f.value for f in Format], default="aggregate")
    p.add_argument("--family", choices=[k.value for k in Kind], default=None)
    p.add_argument("--sigma", type=float, default=None, help="standard deviation (normal only)")
    p.add_argument("--json", action="store_true", help="write JSON instead of CSV records")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="monotone-mle",
        description="Maximum-likelihood monotone response estimates for grouped data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a monotone estimate")
    _add_input(p)
    p.add_argument(
        "--direction", choices=[d.value for d in Direction], default="nondecreasing"
    )
    p.add_argument("--emit", choices=["blocks", "phi", "plotdata"], default="blocks")

    p = sub.add_parser("simulate", help="Monte-Carlo rank of a statistic")
    _add_input(p)
    p.add_argument(
        "--hypothesis", choices=["null-constant", "alternative-fit"], default="null-constant"
    )
    p.add_argument("--statistic", choices=[s.value for s in Statistic], default="delta")
    p.add_argument("--replicates", type=int, default=10_000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--refit", action="store_true", help="loglik at each replicate's own fit")
    p.add_argument(
        "--binomial", action="store_true", help="loglik of aggregated counts (bernoulli)"
    )

    p = sub.add_parser("selftest", help="cross-check the fitter on random tables")
    p.add_argument("--tables", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _read(args, parser: argparse.ArgumentParser) -> ObservationTable:
    if args.builtin:
        return load_dataset()
    if args.input == "-":
        return parse_table(sys.stdin, args.format)
    try:
        with open(args.input, encoding="utf-8", newline="") as fh:
            return parse_table(fh, args.format)
    except OSError as exc:
        parser.error(f"cannot read {args.input}: {exc.strerror}")


def _family(args) -> FamilySpec | None:
    if args.family is None:
        if args.sigma is not None:
            raise MonotoneMLEError("--sigma needs --family normal")
        return None
    return FamilySpec.parse(args.family, args.sigma)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = sys.stdout
    try:
        if args.command == "fit":
            table = _read(args, parser)
            family = _family(args)
            if family is not None:
                family.validate(table)
            estimate = fit(table, args.direction)
            emit_fit(estimate, table, out, family=family, emit=args.emit, as_json=args.json)
        elif args.command == "simulate":
            table = _read(args, parser)
            family = _family(args) or BERNOULLI
            build = (
                HypothesisSpec.null_constant
                if args.hypothesis == "null-constant"
                else HypothesisSpec.alternative_fit
            )
            report = run_study(
                table,
                build(table, family),
                args.statistic,
                args.replicates,
                args.seed,
                refit=args.refit,
                binomial=args.binomial,
                workers=args.workers,
            )
            summary = {"hypothesis": args.hypothesis, "family": str(family), **report.summary()}
            emit_report(summary, out, as_json=args.json)
        else:
            failures = oracle_check(args.tables, args.seed)
            print(f"selftest,tables,{args.tables}")
            print(f"selftest,mismatches,{len(failures)}")
            if failures:
                return EXIT_INVALID
    except MonotoneMLEError as exc:
        print(f"monotone-mle: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return 0


if __name__ == "__main__":
    sys.exit(main())
