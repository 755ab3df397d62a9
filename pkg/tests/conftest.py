import pytest
import os
import sys
import tempfile
import shutil

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from cli.core import load_dataset
from cli.reports_db import init_db

DATASETS_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'datasets'))


def dataset_path(name):
    return os.path.join(DATASETS_DIR, f"{name}.txt")


@pytest.fixture
def dataset():
    """Load a bundled dataset by name, e.g. dataset('example1')"""
    return lambda name: load_dataset(dataset_path(name))


@pytest.fixture
def test_db_conn():
    """In-memory SQLite database with the report schema"""
    conn = init_db(':memory:')
    yield conn
    conn.close()


@pytest.fixture
def temp_dir():
    """Temporary directory for files written by a test"""
    path = tempfile.mkdtemp()
    yield path
    shutil.rmtree(path)
