"""Command line entry point: ``ainfty {eval,family,check-table,lift}``.

Exit status is 0 on success, 1 when check-table finds a failing witness and
2 on any parse, validation or parameter error.
"""
from __future__ import annotations

import argparse
import sys

from . import documents
from .conditions import evaluate, make_params, normalize_condition
from .errors import AinftyError
from .families import CUMULATIVE, FAMILIES, SINGLE, lift, make_family
from .relations import DIVERGENCE_THRESHOLD, WITNESSES, check_table, family_profile
from .subsets import STRATEGIES

EXIT_OK, EXIT_FAILED, EXIT_INVALID = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _add_condition_flags(p):
    p.add_argument("--condition", required=True, help="P1, P1', P2, ..., P8 (P1p also accepted)")
    p.add_argument("--p")
    p.add_argument("--q")
    p.add_argument("--delta")
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.add_argument("--s-grid", help="comma separated, e.g. 1/1000,1/10")
    p.add_argument("--strategy", choices=STRATEGIES)


def _add_output_flags(p):
    p.add_argument("--output", choices=("structured", "csv"), default="structured")
    p.add_argument("--out", help="write here instead of standard output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ainfty", description="Tightest constants of A-infinity type conditions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="constant of one condition on an instance document")
    p.add_argument("--instance", required=True)
    _add_condition_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("family", help="constant profile over a counterexample family")
    p.add_argument("--name", required=True, choices=FAMILIES)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--cumulative", action="store_true")
    _add_condition_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("check-table", help="verify the constructed witnesses, list every cell")
    p.add_argument("--threshold", type=float, default=DIVERGENCE_THRESHOLD)
    p.add_argument("--n-max", type=int, help="cap the level range of every witness family")
    _add_output_flags(p)

    p = sub.add_parser("lift", help="half-line lifting of an instance (or family level)")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--instance")
    src.add_argument("--name", choices=FAMILIES)
    p.add_argument("--level", type=int, help="family level for --name")
    _add_output_flags(p)
    return parser


def _params(args):
    cond = normalize_condition(args.condition)
    given = {k: getattr(args, k) for k in ("p", "q", "delta", "alpha", "beta")}
    if args.s_grid is not None:
        given["s_grid"] = [s for s in args.s_grid.split(",") if s.strip()]
    return cond, make_params(cond, defaults=True, **given)


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_eval(args):
    cond, params = _params(args)
    instance = documents.parse_instance(_read(args.instance))
    report = evaluate(instance, cond, params, args.strategy)
    if args.output == "csv":
        return documents.report_csv(report), EXIT_OK
    return documents.dumps(documents.report_document(report)), EXIT_OK


def _cmd_family(args):
    cond, params = _params(args)
    if args.n_max < 1:
        raise AinftyError("--n-max must be at least 1")
    mode = CUMULATIVE if args.cumulative else SINGLE
    profile = family_profile(cond, params, args.name, range(1, args.n_max + 1), mode, args.strategy)
    if args.output == "csv":
        print(f"verdict: {profile.verdict}", file=sys.stderr)
        return documents.profile_csv(profile), EXIT_OK
    return documents.dumps(documents.profile_document(profile)), EXIT_OK


def _cmd_check_table(args):
    levels = None
    if args.n_max is not None:
        levels = {cell: [n for n in check.levels if n <= args.n_max] for cell, check in WITNESSES.items()}
    report = check_table(args.threshold, levels)
    for r in report.witnesses:
        status = "verified" if r.passed else "FAILED"
        print(f"{r.cell[0]} =/=> {r.cell[1]} on {r.check.family}: {status}", file=sys.stderr)
        for _, n, msg in r.failures:
            print(f"  n={n}: {msg}", file=sys.stderr)
    text = documents.table_csv(report) if args.output == "csv" else documents.dumps(documents.table_document(report))
    return text, EXIT_OK if report.ok else EXIT_FAILED


def _cmd_lift(args):
    if args.instance is not None:
        if args.level is not None:
            raise AinftyError("--level only applies with --name")
        instance = documents.parse_instance(_read(args.instance))
    else:
        if args.level is None:
            raise AinftyError("--name needs --level")
        instance = make_family(args.name, args.level)
    lifted = lift(instance)
    if args.output == "csv":
        return documents.lifted_csv(lifted), EXIT_OK
    return documents.dumps(documents.lifted_document(lifted)), EXIT_OK


_COMMANDS = {"eval": _cmd_eval, "family": _cmd_family, "check-table": _cmd_check_table, "lift": _cmd_lift}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text, status = _COMMANDS[args.command](args)
    except (AinftyError, ValueError, OSError) as e:
        print(f"ainfty: error: {e}", file=sys.stderr)
        return EXIT_INVALID
    _emit(text, args.out)
    return status


if __name__ == "__main__":
    sys.exit(main())
