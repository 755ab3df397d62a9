import argparse
import json
import os
import sys

# Import CLI logic from cli/ directory
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from cli.luce_cli import (
    REGULARITY_MODES,
    REPRESENT_TARGETS,
    cmd_axioms,
    cmd_fmt,
    cmd_history,
    cmd_oracle,
    cmd_overload,
    cmd_regularity,
    cmd_represent,
)
from cli.axioms import DEFAULT_WITNESS_CAP
from cli.oracle import TheoremId
from cli.reports_db import DB_PATH
from cli.welfare import DEFAULT_SPOT_CHECKS


def emit(exit_code, output):
    if isinstance(output, str):
        print(output, end="")
    else:
        print(json.dumps(output.model_dump(), ensure_ascii=False, indent=2))
    return exit_code


def _add_common(parser, with_file=True):
    if with_file:
        parser.add_argument("file", type=str, help="Dataset file (see datasets/ for examples)")
    parser.add_argument("--assert", dest="asserts", action="append", default=[], metavar="PATH[=VALUE]",
                        help="Dotted path into the results that must be truthy (or equal VALUE); repeatable")
    parser.add_argument("--db", type=str, default=None, help=f"Store the report in this sqlite file (e.g. {DB_PATH})")


def main():
    parser = argparse.ArgumentParser(description="Luce choice overload explorer CLI")
    subparsers = parser.add_subparsers(dest="command")

    # Axioms and revealed relations
    axioms_parser = subparsers.add_parser(
        "axioms",
        help="Check choice axioms and revealed relations",
        description="Check alpha, beta, gamma, theta, path independence, Outcast, the fixed point property and "
                    "local theta on a dataset, and report the revealed relations R, Q and S with their cycles."
    )
    _add_common(axioms_parser)
    axioms_parser.add_argument("--cap", type=int, default=DEFAULT_WITNESS_CAP, help="Maximum witnesses listed per axiom")

    # Regularity of Luce rules
    regularity_parser = subparsers.add_parser(
        "regularity",
        help="Decide regularity of Luce rules on the dataset",
        description="Look for a regular aligned Luce utility (exists), test every aligned utility (all), "
                    "test the uniform rule (uniform) or solve the linear regularity system (feasibility)."
    )
    _add_common(regularity_parser)
    regularity_parser.add_argument("--mode", choices=REGULARITY_MODES, default="uniform", help="Regularity question to answer")
    regularity_parser.add_argument("--utility", type=str, help="Utility as JSON {label: \"num/den\"} or a JSON file path")
    regularity_parser.add_argument("--aligned", action="store_true", help="Feasibility mode: also require alignment with R")
    regularity_parser.add_argument("--cap", type=int, default=DEFAULT_WITNESS_CAP, help="Maximum violations listed")

    # Choice overload
    overload_parser = subparsers.add_parser(
        "overload",
        help="Classify regularity violations by their welfare effect",
        description="Compute the Luce rule for a utility aligned with R and report whether any regularity "
                    "violation lowers welfare (choice overload)."
    )
    _add_common(overload_parser)
    source = overload_parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--utility", type=str, help="Utility as JSON {label: \"num/den\"} or a JSON file path")
    source.add_argument("--auto", action="store_true", help="Use 2^i along the first linear extension of R")
    overload_parser.add_argument("--spot-checks", type=int, default=DEFAULT_SPOT_CHECKS,
                                 help="Random aligned utilities used to cross-check each dominance verdict")

    # Representations
    represent_parser = subparsers.add_parser(
        "represent",
        help="Build or verify a threshold or limited attention representation",
        description="Construct a concave threshold, general threshold, semiorder or limited attention "
                    "representation of the dataset, or verify a supplied threshold representation."
    )
    _add_common(represent_parser)
    represent_parser.add_argument("--target", choices=REPRESENT_TARGETS, default="concave-threshold",
                                  help="Representation to construct")
    represent_parser.add_argument("--verify-rep", type=str, help="JSON file with {\"v\": ..., \"eps\": ...} to verify")

    # Theorem oracle
    oracle_parser = subparsers.add_parser(
        "oracle",
        help="Verify a theorem over all or sampled datasets",
        description="Enumerate every choice correspondence on n alternatives (sampling beyond n=3 unless "
                    "--exhaustive) and check one statement on each, reporting any counterexample."
    )
    oracle_parser.add_argument("--theorem", type=str, required=True, choices=[t.value for t in TheoremId],
                               help="Statement id")
    oracle_parser.add_argument("--n", type=int, default=3, help="Number of alternatives")
    oracle_parser.add_argument("--exhaustive", action="store_true", help="Enumerate every instance at n=4")
    oracle_parser.add_argument("--seed", type=int, default=0, help="Sampling seed")
    oracle_parser.add_argument("--budget", type=int, default=None, help="Number of sampled instances")
    oracle_parser.add_argument("--workers", type=int, default=1, help="Worker processes for exhaustive runs")
    oracle_parser.add_argument("--verbose", action="store_true", help="Print progress to stderr")
    _add_common(oracle_parser, with_file=False)

    # Canonical dataset text
    fmt_parser = subparsers.add_parser(
        "fmt",
        help="Print a dataset in canonical form",
        description="Parse a dataset file and print it with menus sorted and singletons written out."
    )
    fmt_parser.add_argument("file", type=str, help="Dataset file")

    # Stored verification runs
    history_parser = subparsers.add_parser(
        "history",
        help="List stored verification runs",
        description="List the theorem verification runs saved with --db."
    )
    history_parser.add_argument("--db", type=str, default=DB_PATH, help="sqlite file to read")
    history_parser.add_argument("--theorem", type=str, default=None, help="Only runs of this statement")

    args = parser.parse_args()
    if args.command == "axioms":
        return emit(*cmd_axioms(file=args.file, cap=args.cap, asserts=args.asserts, db=args.db))
    elif args.command == "regularity":
        return emit(*cmd_regularity(file=args.file, mode=args.mode, utility=args.utility, aligned=args.aligned,
                                    cap=args.cap, asserts=args.asserts, db=args.db))
    elif args.command == "overload":
        return emit(*cmd_overload(file=args.file, utility=args.utility, auto=args.auto,
                                  spot_checks=args.spot_checks, asserts=args.asserts, db=args.db))
    elif args.command == "represent":
        return emit(*cmd_represent(file=args.file, target=args.target, verify_rep=args.verify_rep,
                                   asserts=args.asserts, db=args.db))
    elif args.command == "oracle":
        return emit(*cmd_oracle(theorem=args.theorem, n=args.n, exhaustive=args.exhaustive, seed=args.seed,
                                budget=args.budget, workers=args.workers, verbose=args.verbose,
                                asserts=args.asserts, db=args.db))
    elif args.command == "fmt":
        return emit(*cmd_fmt(file=args.file))
    elif args.command == "history":
        return emit(*cmd_history(db=args.db, theorem=args.theorem))
    else:
        parser.print_help()
        return 0


if __name__ == "__main__":
    sys.exit(main())
