import unittest
import os
import sys
from fractions import Fraction

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from cli.axioms import Relation, linear_extensions, revealed_relation
from cli.core import ChoiceDataset, PreconditionError, load_dataset, parse_dataset
from cli.luce import Utility, logit, power_utility, uniform
from cli.luce_cli import DATASETS_DIR
from cli.welfare import (
    WELFARE_DECREASING,
    WELFARE_INCREASING,
    cumulative,
    detect_overload,
    expected_value,
    fosd,
    reversal_utility,
    welfare_dominates,
    welfare_value,
)


def load(name):
    return load_dataset(os.path.join(DATASETS_DIR, f"{name}.txt"))


# Alpha fails at y: chosen from {x,y,z} but not from {x,y}; R stays acyclic.
ALPHA_FAILURE = """alternatives: x y z
{x,y,z} -> {x,y}
{x,y} -> {x}
{x,z} -> {x,z}
{y,z} -> {y,z}
"""


class TestWelfareValues(unittest.TestCase):

    def test_welfare_value(self):
        c = parse_dataset("alternatives: x y\n{x,y} -> {x,y}\n")
        self.assertEqual(welfare_value(c, Utility((2, 1)), c.grand), Fraction(5, 3))
        self.assertEqual(welfare_value(c, Utility((1, 1)), c.grand), 1)
        self.assertEqual(welfare_value(c, Utility((2, 1)), c.menu("x")), 2)

    def test_welfare_value_is_expected_utility(self):
        c = load("example1")
        u = Utility((1, 2, 3, 4, 5))
        p = logit(c, u)
        for menu in c.menus():
            self.assertEqual(welfare_value(c, u, menu), expected_value(p, menu, u))

    def test_cumulative(self):
        c = parse_dataset("alternatives: x y z\n{x,y,z} -> {x,z}\n{x,y} -> {x}\n{x,z} -> {x,z}\n{y,z} -> {z}\n")
        p = uniform(c)
        order = (1, 0, 2)
        self.assertEqual(cumulative(p, c.grand, order, 1), 1)
        self.assertEqual(cumulative(p, c.grand, order, 2), Fraction(1, 2))
        self.assertEqual(cumulative(p, c.grand, order, 0), 1)
        values = [cumulative(p, c.grand, order, a) for a in order]
        self.assertEqual(values, sorted(values, reverse=True))


class TestDominance(unittest.TestCase):

    def test_fosd_reflexive(self):
        c = load("outcast")
        p = uniform(c)
        relation = revealed_relation(c, "R")
        self.assertEqual(fosd(p, c.grand, c.grand, relation), (True, None))

    def test_outcast_pair_bigger_menu_dominates(self):
        c = load("outcast")
        u = power_utility((1, 2, 0))
        relation = revealed_relation(c, "R")
        small = c.menu("x", "y")
        self.assertTrue(fosd(logit(c, u), c.grand, small, relation)[0])
        self.assertTrue(welfare_dominates(c, u, c.grand, small, relation, spot_checks=50))

    def test_alpha_failure_pair_reverses(self):
        c = parse_dataset(ALPHA_FAILURE)
        relation = revealed_relation(c, "R")
        u = power_utility(next(linear_extensions(relation)))
        p = logit(c, u)
        small = c.menu("x", "y")
        dominated, witness = fosd(p, c.grand, small, relation)
        self.assertFalse(dominated)
        w = reversal_utility(p, c.grand, small, *witness)
        self.assertGreater(expected_value(p, small, w), expected_value(p, c.grand, w))
        self.assertFalse(welfare_dominates(c, u, c.grand, small, relation, spot_checks=50))

    def test_cyclic_relation_rejected(self):
        c = load("example2")
        with self.assertRaises(PreconditionError):
            welfare_dominates(c, Utility((1, 1, 1, 1)), c.grand, c.menu("x", "y"),
                              Relation(4, frozenset({(0, 1), (1, 0)})))


class TestDetectOverload(unittest.TestCase):

    def test_outcast_violations_are_welfare_increasing(self):
        c = load("outcast")
        report = detect_overload(c, power_utility((1, 2, 0)))
        self.assertFalse(report.overload)
        self.assertEqual(len(report.entries), 1)
        entry = report.entries[0]
        self.assertEqual((entry.x, entry.small, entry.big), (0, c.menu("x", "y"), c.grand))
        self.assertEqual(entry.classification, WELFARE_INCREASING)
        self.assertIsNone(entry.witness)
        self.assertIsNone(entry.witness_order)

    def test_alpha_failure_is_overload(self):
        c = parse_dataset(ALPHA_FAILURE)
        relation = revealed_relation(c, "R")
        u = power_utility(next(linear_extensions(relation)))
        report = detect_overload(c, u)
        self.assertTrue(report.overload)
        decreasing = [e for e in report.entries if e.classification == WELFARE_DECREASING]
        self.assertTrue(decreasing)
        p = logit(c, u)
        for entry in decreasing:
            self.assertGreater(expected_value(p, entry.small, entry.witness),
                               expected_value(p, entry.big, entry.witness))
        out = report.to_json(c.labels)
        self.assertTrue(out["overload"])
        self.assertNotIn("branch", out)

    def test_decreasing_entries_carry_failing_order(self):
        c = parse_dataset(ALPHA_FAILURE)
        relation = revealed_relation(c, "R")
        u = power_utility(next(linear_extensions(relation)))
        report = detect_overload(c, u)
        p = logit(c, u)
        decreasing = [e for e in report.entries if e.classification == WELFARE_DECREASING]
        self.assertTrue(decreasing)
        for entry in decreasing:
            order = entry.witness_order
            self.assertEqual(sorted(order), list(range(c.n)))
            position = {x: i for i, x in enumerate(order)}
            for better, worse in relation:
                self.assertGreater(position[better], position[worse])
            a = entry.witness_threshold
            self.assertLess(cumulative(p, entry.big, order, a), cumulative(p, entry.small, order, a))
        out = report.to_json(c.labels)
        for item in out["violations"]:
            if item["classification"] == WELFARE_DECREASING:
                self.assertEqual(sorted(item["witness_order"]), ["x", "y", "z"])
                self.assertIn(item["witness_threshold"], item["witness_order"])
            else:
                self.assertIsNone(item["witness_order"])
                self.assertIsNone(item["witness_threshold"])

    def test_maximizer_has_no_violations(self):
        c = load("maximizer")
        report = detect_overload(c, Utility((8, 4, 2)))
        self.assertFalse(report.overload)
        self.assertEqual(report.entries, [])

    def test_preconditions(self):
        with self.assertRaises(PreconditionError) as ctx:
            detect_overload(load("example1"), Utility((1, 1, 1, 1, 1)))
        self.assertEqual(ctx.exception.reason, "cyclic_relation")
        with self.assertRaises(PreconditionError) as ctx:
            detect_overload(load("maximizer"), Utility((1, 2, 3)))
        self.assertEqual(ctx.exception.reason, "misaligned_utility")

    def test_singleton(self):
        c = ChoiceDataset(("x",), (0, 1))
        self.assertFalse(detect_overload(c, Utility((1,))).overload)


if __name__ == '__main__':
    unittest.main()
