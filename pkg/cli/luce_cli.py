import json
import os
import sys
from typing import Any, Dict, List, Optional

from pydantic import BaseModel

from cli.axioms import (
    AXIOMS,
    DEFAULT_WITNESS_CAP,
    RELATION_KINDS,
    check_axiom,
    describe_relation,
    first_linear_extension,
    holds,
    rationalizable_acyclic,
    require_acyclic,
    revealed_relation,
)
from cli.core import (
    ConsistencyError,
    DatasetError,
    PreconditionError,
    dataset_digest,
    format_menu,
    load_dataset,
    serialize_dataset,
)
from cli.feasibility import alignment_constraints, fm_feasible, regularity_system, replay_certificate
from cli.lam import lam_to_json, trivial_lam
from cli.luce import (
    Utility,
    all_aligned_regular,
    describe_violations,
    is_aligned,
    logit,
    power_utility,
    regularity_violations,
    uniform,
    witness_regular_logit,
)
from cli.oracle import verify_theorem
from cli.reports_db import DB_PATH, init_db, list_runs, save_analysis, save_verification
from cli.represent import (
    concave_threshold_rep,
    corollary1_check,
    frick_S_acyclic,
    general_threshold_rep,
    rep_from_json,
    rep_to_json,
    semiorder_rep,
    threshold_monotonicity,
    verify_frick_rep,
    verify_threshold_rep,
)
from cli.welfare import DEFAULT_SPOT_CHECKS, detect_overload

# --- Setup ---
DATASETS_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'datasets'))

EXIT_OK = 0
EXIT_ASSERT_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_PRECONDITION = 3
EXIT_CONSISTENCY = 4

REGULARITY_MODES = ("exists", "all", "uniform", "feasibility")
REPRESENT_TARGETS = ("concave-threshold", "threshold", "semiorder", "lam")


class Report(BaseModel):
    command: List[str]
    dataset: Optional[str] = None
    digest: Optional[str] = None
    results: Dict[str, Any]
    asserts: Dict[str, bool]
    error: Optional[Dict[str, Any]] = None
    exit_status: int


# --- Utilities ---
def summarize(line):
    print(line, file=sys.stderr)


def read_json_arg(value):
    """Accept inline JSON or a path to a JSON file."""
    if os.path.exists(value):
        with open(value, "r", encoding="utf-8") as f:
            return json.load(f)
    return json.loads(value)


def resolve_path(results, path):
    node = results
    for part in path.split("."):
        if isinstance(node, dict) and part in node:
            node = node[part]
        elif isinstance(node, list) and part.isdigit() and int(part) < len(node):
            node = node[int(part)]
        else:
            raise KeyError(path)
    return node


def evaluate_assert(results, expr):
    """`path` demands a truthy value; `path=value` compares against the JSON rendering."""
    path, _, expected = expr.partition("=")
    try:
        value = resolve_path(results, path.strip())
    except KeyError:
        return False
    if expected:
        expected = expected.strip()
        return json.dumps(value, ensure_ascii=False) == expected or str(value) == expected
    return bool(value)


def run_command(command, body, file=None, asserts=(), db=None):
    """Load the dataset, run `body`, and fold errors and asserts into (exit_code, Report)."""
    results = {}
    digest = None
    error = None
    exit_code = EXIT_OK
    try:
        c = load_dataset(file) if file else None
        if c is not None:
            digest = dataset_digest(c)
        results = body(c)
    except PreconditionError as e:
        exit_code, error = EXIT_PRECONDITION, {"type": "precondition", "reason": e.reason, "message": str(e)}
    except ConsistencyError as e:
        exit_code, error = EXIT_CONSISTENCY, {"type": "consistency", "message": str(e)}
    except (DatasetError, ValueError, OSError) as e:
        exit_code, error = EXIT_INPUT_ERROR, {"type": "input", "message": str(e)}
        if isinstance(e, DatasetError) and e.line is not None:
            error["line"] = e.line
    if error:
        summarize(f"error: {error['message']}")
    checks = {expr: evaluate_assert(results, expr) for expr in asserts or ()}
    if exit_code == EXIT_OK and not all(checks.values()):
        exit_code = EXIT_ASSERT_FAILED
        for expr, passed in checks.items():
            if not passed:
                summarize(f"assert failed: {expr}")
    report = Report(
        command=list(command),
        dataset=file,
        digest=digest,
        results=results,
        asserts=checks,
        error=error,
        exit_status=exit_code,
    )
    if db and digest and exit_code != EXIT_INPUT_ERROR:
        conn = init_db(db)
        save_analysis(conn, digest, command[0], report.model_dump())
        conn.close()
    return exit_code, report


def _utility_from_arg(value, labels):
    return Utility.from_mapping(read_json_arg(value), labels)


# --- Commands ---
def cmd_axioms(file, cap=DEFAULT_WITNESS_CAP, asserts=(), db=None):
    def body(c):
        results = {"partial": c.partial}
        if not c.partial:
            axioms = {}
            for axiom in AXIOMS:
                report = check_axiom(c, axiom, cap)
                axioms[axiom] = report.to_json(c.labels)
                summarize(f"{axiom}: {'pass' if report.holds else 'fail'} ({report.count} violations)")
            results["axioms"] = axioms
        kinds = RELATION_KINDS if not c.partial else ("R",)
        results["relations"] = {kind: describe_relation(c, kind) for kind in kinds}
        for kind, rel in results["relations"].items():
            summarize(f"{kind}: {'acyclic' if rel['acyclic'] else 'cyclic'}")
        if not c.partial:
            base = rationalizable_acyclic(c)
            results["rationalizable_acyclic"] = base.to_json(c.labels) if base is not None else None
        return results

    return run_command(["axioms", file], body, file, asserts, db)


def cmd_regularity(file, mode="uniform", utility=None, aligned=False, cap=DEFAULT_WITNESS_CAP, asserts=(), db=None):
    if mode not in REGULARITY_MODES:
        raise ValueError(f"Unknown regularity mode: {mode}")

    def body(c):
        results = {"mode": mode}
        if mode == "exists":
            u = witness_regular_logit(c)
            results.update({
                "path_independent": u is not None,
                "regular_utility_exists": u is not None,
                "utility": u.to_json(c.labels) if u else None,
            })
            summarize(f"regular aligned Luce utility: {'found' if u else 'none (path independence fails)'}")
        elif mode == "all":
            ok, counter = all_aligned_regular(c)
            results.update({
                "regular_for_all_aligned": ok,
                "counterexample": counter.to_json(c.labels) if counter else None,
            })
            if counter:
                p = logit(c, counter)
                results["violations"] = describe_violations(p, c.labels, regularity_violations(p)[:cap])
            summarize(f"regular for every aligned utility: {ok}")
        elif mode == "uniform":
            p = uniform(c)
            violations = regularity_violations(p)
            results.update({
                "regular": not violations,
                "violation_count": len(violations),
                "violations": describe_violations(p, c.labels, violations[:cap]),
            })
            summarize(f"uniform Luce: {'regular' if not violations else f'{len(violations)} violations'}")
        else:
            system = regularity_system(c)
            if aligned:
                relation = revealed_relation(c, "R")
                system = system.with_constraints(alignment_constraints(c.n, relation))
            result = fm_feasible(system)
            results.update(result.to_json())
            results["aligned"] = aligned
            results["system"] = system.to_json(c.labels)
            if result.certificate is not None:
                results["certificate_replays"] = replay_certificate(system, result.certificate)
            summarize(f"regular utility system: {'feasible' if result.feasible else 'infeasible'}")
        if utility is not None:
            u = _utility_from_arg(utility, c.labels)
            p = logit(c, u)
            violations = regularity_violations(p)
            results["logit"] = {
                "utility": u.to_json(c.labels),
                "aligned_with_R": is_aligned(u, revealed_relation(c, "R"))[0],
                "regular": not violations,
                "violation_count": len(violations),
                "violations": describe_violations(p, c.labels, violations[:cap]),
            }
        return results

    return run_command(["regularity", file, mode], body, file, asserts, db)


def cmd_overload(file, utility=None, auto=False, spot_checks=DEFAULT_SPOT_CHECKS, asserts=(), db=None):
    def body(c):
        if utility is not None:
            u = _utility_from_arg(utility, c.labels)
        elif auto:
            c.require_total("overload --auto")
            relation = revealed_relation(c, "R")
            require_acyclic(relation)
            u = power_utility(first_linear_extension(relation))
        else:
            raise ValueError("overload needs --utility or --auto")
        report = detect_overload(c, u, spot_checks)
        results = {"utility": u.to_json(c.labels), "alpha": holds(c, "alpha")}
        results.update(report.to_json(c.labels))
        summarize(f"choice overload: {report.overload} ({len(report.entries)} regularity violations)")
        return results

    return run_command(["overload", file], body, file, asserts, db)


def _threshold_results(c, rep):
    if rep is None:
        return {"exists": False, "rep": None}
    return {
        "exists": True,
        "rep": rep_to_json(rep, c.labels),
        "monotonicity": threshold_monotonicity(rep),
        "corollary1": corollary1_check(c, rep).to_json(c.labels),
    }


def cmd_represent(file, target="concave-threshold", verify_rep=None, asserts=(), db=None):
    if target not in REPRESENT_TARGETS:
        raise ValueError(f"Unknown representation target: {target}")

    def body(c):
        results = {"target": target}
        if verify_rep is not None:
            rep = rep_from_json(read_json_arg(verify_rep), c.labels)
            ok, mismatched = verify_threshold_rep(c, rep)
            results["verification"] = {
                "represents": ok,
                "mismatched_menus": [format_menu(c.labels, m) for m in mismatched],
                "monotonicity": threshold_monotonicity(rep),
                "strongly_convex_increasing": verify_frick_rep(c, rep).to_json(c.labels),
            }
            if ok:
                results["verification"]["corollary1"] = corollary1_check(c, rep).to_json(c.labels)
            summarize(f"supplied representation reproduces the dataset: {ok}")
            return results
        if target == "concave-threshold":
            results.update(_threshold_results(c, concave_threshold_rep(c)))
        elif target == "threshold":
            results.update(_threshold_results(c, general_threshold_rep(c)))
            results["S_acyclic"] = frick_S_acyclic(c)
        elif target == "semiorder":
            rep = semiorder_rep(c)
            results["exists"] = rep is not None
            results["rep"] = rep_to_json(rep, c.labels) if rep else None
        else:
            model, reason = trivial_lam(c)
            results.update({"exists": model is not None, "reason": reason,
                            "lam": lam_to_json(model) if model else None})
        summarize(f"{target} representation: {'found' if results['exists'] else 'none'}")
        return results

    return run_command(["represent", file, target], body, file, asserts, db)


def cmd_oracle(theorem, n=3, exhaustive=False, seed=0, budget=None, workers=1, verbose=False,
               asserts=(), db=None):
    def body(_):
        report = verify_theorem(theorem, n, budget=budget, seed=seed, exhaustive=exhaustive,
                                workers=workers, verbose=verbose)
        if db:
            conn = init_db(db)
            save_verification(conn, report)
            conn.close()
        summarize(f"{report.theorem} on n={n} ({report.mode}): {report.instances_checked} instances, "
                  f"{len(report.counterexamples)} counterexamples")
        return report.model_dump()

    exit_code, report = run_command(["oracle", str(theorem), str(n)], body, None, asserts, None)
    if exit_code == EXIT_OK and report.results.get("counterexamples"):
        summarize("counterexamples found")
        exit_code = EXIT_CONSISTENCY
        report = report.model_copy(update={"exit_status": exit_code})
    return exit_code, report


def cmd_fmt(file):
    """Canonical dataset text, or (2, "") on a parse failure."""
    try:
        return EXIT_OK, serialize_dataset(load_dataset(file))
    except (DatasetError, OSError) as e:
        summarize(f"error: {e}")
        return EXIT_INPUT_ERROR, ""


def cmd_history(db=DB_PATH, theorem=None):
    conn = init_db(db)
    runs = list_runs(conn, theorem)
    conn.close()
    summarize(f"{len(runs)} stored verification runs")
    return EXIT_OK, Report(command=["history"], results={"runs": runs}, asserts={}, exit_status=EXIT_OK)
