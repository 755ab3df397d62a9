import json
import sqlite3
from datetime import datetime

# --- Setup ---
DB_PATH = "luce_reports.db"


# --- DB Functions ---
def init_db(db_path=DB_PATH):
    conn = sqlite3.connect(db_path)
    c = conn.cursor()
    c.execute('''CREATE TABLE IF NOT EXISTS verification_runs (
        theorem TEXT,
        n INTEGER,
        seed INTEGER,
        mode TEXT,
        instances_checked INTEGER,
        counterexamples_json TEXT,
        elapsed REAL,
        date_executed TEXT,
        PRIMARY KEY (theorem, n, seed, mode)
    )''')
    c.execute('''CREATE TABLE IF NOT EXISTS analysis_reports (
        digest TEXT,
        command TEXT,
        report_json TEXT,
        date_executed TEXT,
        PRIMARY KEY (digest, command)
    )''')
    conn.commit()
    return conn


def save_verification(conn, report):
    c = conn.cursor()
    c.execute('''INSERT OR REPLACE INTO verification_runs
                 (theorem, n, seed, mode, instances_checked, counterexamples_json, elapsed, date_executed)
                 VALUES (?, ?, ?, ?, ?, ?, ?, ?)''',
              (report.theorem, report.universe_size, report.seed, report.mode, report.instances_checked,
               json.dumps(report.counterexamples, ensure_ascii=False), report.elapsed,
               datetime.now().isoformat()))
    conn.commit()


def save_analysis(conn, digest, command, report):
    c = conn.cursor()
    c.execute('''INSERT OR REPLACE INTO analysis_reports (digest, command, report_json, date_executed)
                 VALUES (?, ?, ?, ?)''',
              (digest, command, json.dumps(report, ensure_ascii=False), datetime.now().isoformat()))
    conn.commit()


def list_runs(conn, theorem=None):
    c = conn.cursor()
    query = '''SELECT theorem, n, seed, mode, instances_checked, counterexamples_json, elapsed, date_executed
               FROM verification_runs'''
    if theorem:
        c.execute(query + ' WHERE theorem = ? ORDER BY theorem, n, seed', (theorem,))
    else:
        c.execute(query + ' ORDER BY theorem, n, seed')
    runs = []
    for theorem_id, n, seed, mode, checked, counterexamples_json, elapsed, date_executed in c.fetchall():
        runs.append({
            "theorem": theorem_id,
            "n": n,
            "seed": seed,
            "mode": mode,
            "instances_checked": checked,
            "counterexamples": len(json.loads(counterexamples_json or "[]")),
            "elapsed": elapsed,
            "date_executed": date_executed,
        })
    return runs


def get_analysis(conn, digest, command):
    c = conn.cursor()
    c.execute('SELECT report_json FROM analysis_reports WHERE digest = ? AND command = ?', (digest, command))
    row = c.fetchone()
    return json.loads(row[0]) if row else None
