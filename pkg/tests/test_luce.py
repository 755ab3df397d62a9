import unittest
import os
import sys
from fractions import Fraction

from hypothesis import given, settings, strategies as st

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from cli.axioms import holds, iter_violations, revealed_relation
from cli.core import ChoiceDataset, PreconditionError, load_dataset, parse_dataset, size
from cli.luce import (
    StochasticChoice,
    Utility,
    all_aligned_regular,
    beta_counterexample,
    is_aligned,
    is_regular,
    logit,
    near_uniform_utility,
    power_utility,
    regular_for_all_utilities,
    regularity_violations,
    uniform,
    witness_regular_logit,
)
from cli.luce_cli import DATASETS_DIR


def load(name):
    return load_dataset(os.path.join(DATASETS_DIR, f"{name}.txt"))


class TestUtility(unittest.TestCase):

    def test_positive_values_required(self):
        with self.assertRaises(ValueError):
            Utility((1, 0))
        with self.assertRaises(ValueError):
            Utility(())

    def test_from_mapping(self):
        u = Utility.from_mapping({"x": "1/2", "y": 3}, ("x", "y"))
        self.assertEqual(u.values, (Fraction(1, 2), Fraction(3)))
        self.assertEqual(u.to_json(("x", "y")), {"x": "1/2", "y": "3/1"})
        with self.assertRaises(ValueError):
            Utility.from_mapping({"x": 1}, ("x", "y"))

    def test_builders(self):
        self.assertEqual(power_utility((2, 0, 1)).values, (Fraction(4), Fraction(8), Fraction(2)))
        near = near_uniform_utility((1, 0))
        self.assertEqual(near.values, (Fraction(7, 6), Fraction(1)))


class TestLogit(unittest.TestCase):

    def test_probabilities_on_choice_sets(self):
        c = parse_dataset("alternatives: x y z\n{x,y,z} -> {x,y}\n{x,y} -> {x,y}\n{x,z} -> {x}\n{y,z} -> {y,z}\n")
        p = logit(c, Utility((2, 1, 5)))
        self.assertEqual(p.prob(0, c.grand), Fraction(2, 3))
        self.assertEqual(p.prob(1, c.grand), Fraction(1, 3))
        self.assertEqual(p.prob(2, c.grand), 0)
        self.assertEqual(p.support(c.grand), c.menu("x", "y"))

    def test_utility_length_checked(self):
        with self.assertRaises(ValueError):
            logit(load("outcast"), Utility((1, 1)))

    def test_stochastic_choice_validation(self):
        with self.assertRaises(ValueError):
            StochasticChoice(1, (None, (Fraction(1, 2),)))

    def test_partial_data_blocks_regularity(self):
        c = parse_dataset("alternatives: x y z\npartial\n{x,y,z} -> {x}\n")
        with self.assertRaises(PreconditionError):
            regularity_violations(uniform(c))


class TestRegularity(unittest.TestCase):

    def test_example1_uniform_violation(self):
        c = load("example1")
        p = uniform(c)
        small, big = c.menu("x", "y", "z"), c.menu("x", "y", "z", "w")
        self.assertEqual(p.prob(0, big), Fraction(1, 2))
        self.assertEqual(p.prob(0, small), Fraction(1, 3))
        self.assertIn((0, small, big), regularity_violations(p))

    def test_example2_uniform_is_regular(self):
        self.assertTrue(is_regular(uniform(load("example2"))))

    def test_maximizer_any_utility(self):
        c = load("maximizer")
        self.assertTrue(regular_for_all_utilities(c))
        self.assertTrue(is_regular(logit(c, Utility((1, 5, 2)))))

    def test_alpha_violation_breaks_uniform(self):
        c = load("lam_example")
        self.assertFalse(holds(c, "alpha"))
        self.assertFalse(is_regular(uniform(c)))
        self.assertFalse(regular_for_all_utilities(c))


class TestWitnesses(unittest.TestCase):

    def test_semiorder_power_witness(self):
        c = load("semiorder")
        u = witness_regular_logit(c)
        self.assertEqual(u.values, (Fraction(2), Fraction(4), Fraction(8)))
        self.assertTrue(is_aligned(u, revealed_relation(c, "R"))[0])
        self.assertTrue(is_regular(logit(c, u)))

    def test_singleton_witness(self):
        u = witness_regular_logit(load("singleton"))
        self.assertEqual(u.values, (Fraction(2),))

    def test_cyclic_R_is_precondition_failure(self):
        for name in ("example1", "example2"):
            with self.assertRaises(PreconditionError) as ctx:
                witness_regular_logit(load(name))
            self.assertEqual(ctx.exception.reason, "cyclic_relation")
        with self.assertRaises(PreconditionError):
            all_aligned_regular(load("example2"))

    def test_outcast_dataset_has_no_witness(self):
        self.assertIsNone(witness_regular_logit(load("outcast")))

    def test_all_aligned_regular_semiorder(self):
        ok, counter = all_aligned_regular(load("semiorder"))
        self.assertTrue(ok)
        self.assertIsNone(counter)

    def test_all_aligned_regular_counterexample(self):
        c = load("outcast")
        ok, counter = all_aligned_regular(c)
        self.assertFalse(ok)
        self.assertTrue(is_aligned(counter, revealed_relation(c, "R"))[0])
        self.assertFalse(is_regular(logit(c, counter)))

    def test_beta_counterexample(self):
        c = parse_dataset("alternatives: x y z\n{x,y,z} -> {x}\n{x,y} -> {x,y}\n{x,z} -> {x}\n{y,z} -> {y}\n")
        u = beta_counterexample(c)
        # |c(B)| + 1 - |c(A)| = 0, so eps = 1 already separates the two menus.
        self.assertEqual(u.values, (Fraction(1), Fraction(1), Fraction(1)))
        p = logit(c, u)
        self.assertEqual(p.prob(0, c.menu("x", "y")), Fraction(1, 2))
        self.assertEqual(p.prob(0, c.grand), 1)

    def test_beta_counterexample_eps_is_largest_power_of_half(self):
        c = ChoiceDataset.from_function(("x", "y", "z", "w"), lambda menu: 0b1101 if menu == 0b1111 else menu)
        u = beta_counterexample(c)
        self.assertEqual(u.values, (Fraction(1, 4), Fraction(1), Fraction(1, 4), Fraction(1, 4)))
        small = c.menu("x", "y")
        p = logit(c, u)
        self.assertEqual(p.prob(0, small), Fraction(1, 5))
        self.assertEqual(p.prob(0, c.grand), Fraction(1, 3))
        # Doubling eps loses the strict inequality.
        doubled = logit(c, Utility((Fraction(1, 2), Fraction(1), Fraction(1, 2), Fraction(1, 2))))
        self.assertEqual(doubled.prob(0, small), doubled.prob(0, c.grand))

    def test_beta_counterexample_none_when_beta_holds(self):
        self.assertIsNone(beta_counterexample(load("maximizer")))
        self.assertIsNone(beta_counterexample(load("lam_example")))


@st.composite
def datasets(draw, n=3):
    labels = tuple(f"a{i}" for i in range(n))
    table = [0] * (1 << n)
    for menu in range(1, 1 << n):
        options = [sub for sub in range(1, menu + 1) if sub & menu == sub]
        table[menu] = draw(st.sampled_from(options))
    return ChoiceDataset(labels, tuple(table))


utilities = st.lists(
    st.fractions(min_value=Fraction(1, 16), max_value=16), min_size=3, max_size=3
).map(lambda values: Utility(tuple(values)))


@settings(max_examples=200, deadline=None)
@given(datasets(), utilities)
def test_logit_rows_sum_to_one_on_choice_sets(c, u):
    p = logit(c, u)
    for menu in c.menus():
        assert sum(p.probs[menu]) == 1
        for x in range(c.n):
            if not c.chosen(menu) >> x & 1:
                assert p.prob(x, menu) == 0


@settings(max_examples=200, deadline=None)
@given(datasets(), utilities)
def test_alpha_and_beta_give_regular_logit(c, u):
    if holds(c, "alpha") and holds(c, "beta"):
        assert is_regular(logit(c, u))


@settings(max_examples=200, deadline=None)
@given(datasets())
def test_uniform_regularity_matches_alpha_and_theta(c):
    assert is_regular(uniform(c)) == (holds(c, "alpha") and holds(c, "theta"))


@settings(max_examples=200, deadline=None)
@given(datasets())
def test_beta_counterexample_is_irregular(c):
    u = beta_counterexample(c)
    if holds(c, "beta"):
        assert u is None
    else:
        assert not is_regular(logit(c, u))


@settings(max_examples=200, deadline=None)
@given(datasets())
def test_beta_counterexample_eps_is_maximal(c):
    witness = next(iter_violations(c, "beta"), None)
    if witness is None:
        return
    _, (small, big) = witness
    weight = size(c.chosen(big)) + 1 - size(c.chosen(small))
    eps = min(beta_counterexample(c).values)
    assert eps * weight < 1
    assert eps == 1 or 2 * eps * weight >= 1


if __name__ == '__main__':
    unittest.main()
