import unittest
import os
import sys

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from cli.axioms import (
    AXIOMS,
    Relation,
    Violation,
    check_axiom,
    describe_relation,
    first_linear_extension,
    holds,
    is_acyclic,
    is_violation,
    linear_extensions,
    maximal_choice,
    rationalizable_acyclic,
    require_acyclic,
    revealed_relation,
)
from cli.core import PreconditionError, load_dataset, parse_dataset
from cli.luce_cli import DATASETS_DIR


def load(name):
    return load_dataset(os.path.join(DATASETS_DIR, f"{name}.txt"))


class TestAxiomsOnExamples(unittest.TestCase):

    def setUp(self):
        self.example1 = load("example1")
        self.example2 = load("example2")
        self.outcast = load("outcast")
        self.maximizer = load("maximizer")

    def test_example1_alpha_holds_theta_fails(self):
        c = self.example1
        self.assertTrue(holds(c, "alpha"))
        self.assertFalse(holds(c, "theta"))
        witness = Violation(menus=[c.menu("x", "y", "z"), c.menu("x", "y", "z", "w")])
        self.assertTrue(is_violation(c, "theta", witness))

    def test_example1_outcast_and_path_independence_fail(self):
        c = self.example1
        self.assertFalse(holds(c, "outcast"))
        self.assertFalse(holds(c, "path_independence"))
        witness = Violation(menus=[c.menu("w", "t"), c.menu("z", "w", "t")])
        self.assertTrue(is_violation(c, "outcast", witness))

    def test_example2_gamma_witness(self):
        c = self.example2
        report = check_axiom(c, "gamma")
        self.assertFalse(report.holds)
        witness = Violation(alternatives=[c.index("z")], menus=[c.menu("y", "z"), c.menu("z", "w")])
        self.assertTrue(is_violation(c, "gamma", witness))

    def test_outcast_dataset(self):
        c = self.outcast
        self.assertTrue(holds(c, "alpha"))
        self.assertFalse(holds(c, "outcast"))
        self.assertFalse(holds(c, "path_independence"))

    def test_maximizer_satisfies_everything(self):
        for axiom in AXIOMS:
            self.assertTrue(holds(self.maximizer, axiom), axiom)

    def test_every_reported_witness_rechecks(self):
        for c in (self.example1, self.example2, self.outcast, load("lam_example")):
            for axiom in AXIOMS:
                report = check_axiom(c, axiom, cap=None)
                self.assertEqual(report.count, len(report.witnesses))
                self.assertEqual(report.holds, report.count == 0)
                for witness in report.witnesses:
                    self.assertTrue(is_violation(c, axiom, witness), (axiom, witness))

    def test_cap_limits_witnesses_not_count(self):
        full = check_axiom(self.example1, "theta", cap=None)
        capped = check_axiom(self.example1, "theta", cap=1)
        self.assertEqual(len(capped.witnesses), 1)
        self.assertEqual(capped.count, full.count)

    def test_bad_cap_and_unknown_axiom(self):
        with self.assertRaises(ValueError):
            check_axiom(self.example1, "alpha", cap=0)
        with self.assertRaises(ValueError):
            holds(self.example1, "delta")

    def test_partial_dataset_rejected(self):
        c = parse_dataset("alternatives: x y z\npartial\n{x,y,z} -> {x}\n")
        with self.assertRaises(PreconditionError):
            check_axiom(c, "alpha")

    def test_report_json(self):
        c = self.example2
        out = check_axiom(c, "gamma", cap=1).to_json(c.labels)
        self.assertFalse(out["holds"])
        self.assertEqual(len(out["witnesses"]), 1)
        self.assertTrue(all(m.startswith("{") for m in out["witnesses"][0]["menus"]))


class TestRelations(unittest.TestCase):

    def test_example1_rationalizable(self):
        c = load("example1")
        base = rationalizable_acyclic(c)
        self.assertIsNotNone(base)
        expected = {("w", "y"), ("w", "z"), ("z", "t"), ("x", "t")}
        self.assertEqual({(c.labels[x], c.labels[y]) for x, y in base}, expected)
        self.assertEqual(maximal_choice(c.labels, base).choices, c.choices)

    def test_example1_revealed_R_is_cyclic(self):
        c = load("example1")
        relation = revealed_relation(c, "R")
        self.assertIn((c.index("t"), c.index("y")), relation)
        self.assertIn((c.index("y"), c.index("t")), relation)
        ok, cycle = is_acyclic(relation)
        self.assertFalse(ok)
        self.assertEqual(cycle[0], cycle[-1])

    def test_example2_R_cycle(self):
        c = load("example2")
        described = describe_relation(c, "R")
        self.assertFalse(described["acyclic"])
        self.assertEqual(set(described["cycle"]), {"z", "w"})
        with self.assertRaises(PreconditionError) as ctx:
            require_acyclic(revealed_relation(c, "R"))
        self.assertEqual(ctx.exception.reason, "cyclic_relation")

    def test_maximizer_relations(self):
        c = load("maximizer")
        relation = revealed_relation(c, "R")
        self.assertEqual(set(relation), {(0, 1), (0, 2), (1, 2)})
        self.assertEqual(list(linear_extensions(relation)), [(2, 1, 0)])
        self.assertTrue(is_acyclic(revealed_relation(c, "S"))[0])

    def test_S_contains_R(self):
        c = load("outcast")
        r = revealed_relation(c, "R")
        s = revealed_relation(c, "S")
        self.assertTrue(r.pairs <= s.pairs)

    def test_Q_needs_total_data(self):
        c = parse_dataset("alternatives: x y z\npartial\n{x,y,z} -> {x}\n")
        self.assertEqual(set(revealed_relation(c, "R")), {(0, 1), (0, 2)})
        with self.assertRaises(PreconditionError):
            revealed_relation(c, "Q")

    def test_linear_extensions_of_empty_relation(self):
        orders = list(linear_extensions(Relation(3, frozenset())))
        self.assertEqual(len(orders), 6)
        self.assertEqual(orders[0], (0, 1, 2))
        self.assertEqual(first_linear_extension(Relation(3, frozenset({(0, 1)}))), (1, 0, 2))

    def test_relation_validation(self):
        with self.assertRaises(ValueError):
            Relation(2, frozenset({(0, 2)}))
        with self.assertRaises(ValueError):
            Relation.from_labels(("x", "y"), [("x", "q")])
        rel = Relation.from_labels(("x", "y"), [("x", "y")])
        self.assertEqual(rel.to_json(("x", "y")), [["x", "y"]])


if __name__ == '__main__':
    unittest.main()
