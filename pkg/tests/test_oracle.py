import pytest
import os
import sys

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from cli.axioms import holds
from cli.core import ChoiceDataset, PreconditionError
from cli.oracle import (
    SEED_STRIDE,
    TheoremId,
    _passes,
    correspondence_count,
    default_labels,
    enumerate_correspondences,
    sample_correspondences,
    verify_theorem,
)


def test_correspondence_counts():
    assert correspondence_count(1) == 1
    assert correspondence_count(2) == 3
    assert correspondence_count(3) == 189
    assert len(list(enumerate_correspondences(3))) == 189


def test_enumeration_is_distinct_and_labelled():
    seen = {c.choices for c in enumerate_correspondences(3)}
    assert len(seen) == 189
    first = next(enumerate_correspondences(3))
    assert first.labels == default_labels(3) == ("x1", "x2", "x3")


def test_enumeration_filters():
    alpha = list(enumerate_correspondences(3, ("alpha",)))
    assert alpha
    assert all(holds(c, "alpha") for c in alpha)
    assert len(alpha) < 189


def test_enumeration_limit():
    with pytest.raises(PreconditionError):
        list(enumerate_correspondences(5))


def test_sampling_is_seeded():
    first = [c.choices for c in sample_correspondences(4, 20, seed=3)]
    again = [c.choices for c in sample_correspondences(4, 20, seed=3)]
    assert first == again
    assert len(first) == 20


@pytest.mark.parametrize("filters", [("gtlm",), ("alpha",), ("path_independent",), ("binary_acyclic",)])
def test_samplers_respect_filters(filters):
    for c in sample_correspondences(4, 15, seed=11, filters=filters):
        assert _passes(c, filters)


@pytest.mark.parametrize("theorem", list(TheoremId))
def test_exhaustive_n3_has_no_counterexamples(theorem):
    report = verify_theorem(theorem.value, 3)
    assert report.mode == "exhaustive"
    assert report.instances_checked > 0
    assert report.counterexamples == []


def test_full_universe_sizes():
    assert verify_theorem("T1", 3).instances_checked == 189
    assert verify_theorem("P1_uniform", 2).instances_checked == 3
    assert verify_theorem("A3_quasi", 3).instances_checked == 4 ** 3 * 6 + 12


def test_sampled_run():
    report = verify_theorem("T1", 4, budget=30, seed=1)
    assert report.mode == "sampled"
    assert report.instances_checked == 30
    assert report.counterexamples == []
    assert report.seed == 1


def test_parallel_matches_serial():
    serial = verify_theorem("P1_uniform", 3)
    parallel = verify_theorem("P1_uniform", 3, workers=2)
    assert parallel.instances_checked == serial.instances_checked
    assert parallel.counterexamples == serial.counterexamples


def test_sampled_parallel_matches_serial():
    serial = verify_theorem("T1", 4, budget=2500, seed=3)
    parallel = verify_theorem("T1", 4, budget=2500, seed=3, workers=2)
    assert serial.mode == parallel.mode == "sampled"
    assert serial.instances_checked == parallel.instances_checked == 2500
    assert parallel.counterexamples == serial.counterexamples


def test_sampled_chunks_use_distinct_seeds():
    first = [c.choices for c in sample_correspondences(4, 5, seed=3 * SEED_STRIDE)]
    second = [c.choices for c in sample_correspondences(4, 5, seed=3 * SEED_STRIDE + 1)]
    assert first != second


def test_generated_datasets_match_validated_ones():
    for c in enumerate_correspondences(3, ("gtlm",)):
        assert c == ChoiceDataset(c.labels, c.choices)
    for c in sample_correspondences(4, 20, seed=5):
        assert c == ChoiceDataset(c.labels, c.choices)


def test_verbose_progress(capsys):
    verify_theorem("T1", 2, verbose=True)
    err = capsys.readouterr().err
    assert "Checking T1 on n=2 (exhaustive)" in err
    assert "Checked 3 instances, 0 counterexamples." in err


def test_unknown_theorem_and_limits():
    with pytest.raises(PreconditionError) as excinfo:
        verify_theorem("T9", 3)
    assert excinfo.value.reason == "unknown_theorem"
    with pytest.raises(PreconditionError):
        verify_theorem("T1", 5, exhaustive=True)
    with pytest.raises(ValueError):
        verify_theorem("T1", 0)
