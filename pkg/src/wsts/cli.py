"""Command line front end.

Exit codes: 0 analysis completed (either verdict), 2 parse or usage
error, 3 unsupported analysis for the model class, 4 exhausted budget,
1 internal error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace as dc_replace
from pathlib import Path

from .analyses import DEFAULT_BASIS_BUDGET, DEFAULT_STATE_BUDGET
from .dsl import parse_model, parse_target
from .errors import (
    BudgetExceededError,
    ParseError,
    UnsupportedAnalysisError,
    UsageError,
    WstsError,
)
from .presburger import parse_formula
from .reports import DEFAULT_SEARCH_BUDGET, Query, emit_report, run_query

_CHECK_QUERIES = {
    "coverability": "coverability",
    "termination": "termination",
    "boundedness": "boundedness",
    "csr": "control-state-reachability",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format", choices=["json", "text", "dot"], default="json", help="report format"
    )
    common.add_argument(
        "--budget-states",
        type=int,
        default=DEFAULT_STATE_BUDGET,
        help="cap on explored tree nodes",
    )
    common.add_argument(
        "--budget-basis",
        type=int,
        default=DEFAULT_BASIS_BUDGET,
        help="cap on the backward basis size",
    )
    common.add_argument(
        "--oracle-cutoff",
        type=int,
        default=None,
        help="also run the bounded forward exploration at this cutoff and record it (test harness)",
    )

    parser = argparse.ArgumentParser(
        prog="wsts", description="Analyses for monotone counter and channel machines."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", parents=[common], help="decide a property")
    check.add_argument("model")
    check.add_argument("--query", required=True, choices=sorted(_CHECK_QUERIES))
    check.add_argument("--target", help='target configuration, e.g. "q1 (0,1)"')
    check.add_argument("--state", help="target control state for csr")

    km = sub.add_parser("km", parents=[common], help="coverability tree and clover")
    km.add_argument("model")
    km.add_argument("--dot", help="also write the tree in DOT form to this file")

    ab = sub.add_parser("abstract", parents=[common], help="monotone over-approximation")
    ab.add_argument("model")
    ab.add_argument("--mode", required=True, choices=["drop-zero", "reset", "lossy"])

    mono = sub.add_parser("mono", parents=[common], help="check strong monotonicity")
    mono.add_argument("model")
    mono.add_argument("--order", help="file holding an ordering formula over u1..ud, v1..vd")
    mono.add_argument("--strict", action="store_true", help="also require the strict variant")

    find = sub.add_parser("find-order", parents=[common], help="search for a structuring ordering")
    find.add_argument("model")
    find.add_argument(
        "--budget",
        type=int,
        default=DEFAULT_SEARCH_BUDGET,
        help=f"candidate orderings to examine (default {DEFAULT_SEARCH_BUDGET})",
    )

    dec = sub.add_parser("decide", parents=[common], help="decide a closed sentence")
    dec.add_argument("sentence")
    return parser


def _load_model(path: str):
    text = Path(path).read_text(encoding="utf-8")
    parsed = parse_model(text)
    for note in parsed.diagnostics:
        print(f"note: {note}", file=sys.stderr)
    model = parsed.model
    return dc_replace(model, name=Path(path).stem)


def _build_query(args, model) -> Query:
    budgets = {
        "budget_states": args.budget_states,
        "budget_basis": args.budget_basis,
        "oracle_cutoff": args.oracle_cutoff,
    }
    if args.command == "check":
        analysis = _CHECK_QUERIES[args.query]
        if analysis == "coverability":
            if args.target is None:
                raise UsageError("coverability needs --target")
            return Query(analysis, target=parse_target(model, args.target), **budgets)
        if analysis == "control-state-reachability":
            if args.state is None:
                raise UsageError("csr needs --state")
            return Query(analysis, state=args.state, **budgets)
        return Query(analysis, **budgets)
    if args.command == "km":
        return Query("karp-miller", **budgets)
    if args.command == "abstract":
        return Query("abstract", mode=args.mode, **budgets)
    if args.command == "mono":
        ordering = None
        if args.order is not None:
            ordering = parse_formula(Path(args.order).read_text(encoding="utf-8"))
        kind = "strong-strict" if args.strict else "strong"
        return Query("check-monotonicity", ordering=ordering, kind=kind, **budgets)
    if args.command == "find-order":
        return Query("find-ordering", budget=args.budget, **budgets)
    raise UsageError(f"unknown command {args.command!r}")


def _run(args) -> int:
    if args.command == "decide":
        text = Path(args.sentence).read_text(encoding="utf-8")
        query = Query(
            "decide",
            sentence=parse_formula(text),
            model_name=Path(args.sentence).stem,
            oracle_cutoff=None,
        )
        report = run_query(None, query)
    else:
        model = _load_model(args.model)
        report = run_query(model, _build_query(args, model))
    sys.stdout.buffer.write(emit_report(report, args.format))
    sys.stdout.buffer.flush()
    if args.command == "km" and args.dot is not None:
        Path(args.dot).write_bytes(emit_report(report, "dot"))
    return report.exit_code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except UnsupportedAnalysisError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except BudgetExceededError as e:
        print(f"error: budget exhausted: {e}", file=sys.stderr)
        return 4
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except WstsError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # pragma: no cover
        print(f"internal error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
