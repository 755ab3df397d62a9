import os
import sys

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from cli.oracle import VerificationReport
from cli.reports_db import get_analysis, init_db, list_runs, save_analysis, save_verification


def make_report(theorem="T1", n=3, seed=0, counterexamples=None):
    return VerificationReport(
        theorem=theorem,
        universe_size=n,
        mode="exhaustive",
        seed=seed,
        instances_checked=189,
        counterexamples=counterexamples or [],
        elapsed=0.5,
    )


def test_tables_created(test_db_conn):
    c = test_db_conn.cursor()
    c.execute("SELECT name FROM sqlite_master WHERE type='table' ORDER BY name")
    assert [row[0] for row in c.fetchall()] == ["analysis_reports", "verification_runs"]


def test_save_and_list_runs(test_db_conn):
    save_verification(test_db_conn, make_report())
    save_verification(test_db_conn, make_report("P1_uniform", counterexamples=[{"instance": "i", "reason": "r"}]))
    runs = list_runs(test_db_conn)
    assert [run["theorem"] for run in runs] == ["P1_uniform", "T1"]
    assert runs[0]["counterexamples"] == 1
    assert runs[1]["instances_checked"] == 189
    assert [run["theorem"] for run in list_runs(test_db_conn, "T1")] == ["T1"]


def test_rerun_replaces_row(test_db_conn):
    save_verification(test_db_conn, make_report())
    save_verification(test_db_conn, make_report(counterexamples=[{"instance": "i", "reason": "r"}]))
    runs = list_runs(test_db_conn)
    assert len(runs) == 1
    assert runs[0]["counterexamples"] == 1


def test_analysis_round_trip(test_db_conn):
    assert get_analysis(test_db_conn, "abc", "axioms") is None
    save_analysis(test_db_conn, "abc", "axioms", {"results": {"alpha": True}, "note": "ü"})
    assert get_analysis(test_db_conn, "abc", "axioms") == {"results": {"alpha": True}, "note": "ü"}
    assert get_analysis(test_db_conn, "abc", "overload") is None


def test_file_database_persists(temp_dir):
    path = os.path.join(temp_dir, "reports.db")
    conn = init_db(path)
    save_verification(conn, make_report(seed=4))
    conn.close()
    conn = init_db(path)
    assert list_runs(conn)[0]["seed"] == 4
    conn.close()
