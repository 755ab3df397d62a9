import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from cli.axioms import holds, linear_extensions, require_acyclic, revealed_relation
from cli.core import ConsistencyError, PreconditionError, format_menu, format_order, members
from cli.luce import Utility, is_aligned, logit, regularity_violations

# --- Setup ---
DEFAULT_SPOT_CHECKS = 200
SPOT_CHECK_DENOMINATOR = 16

WELFARE_INCREASING = "welfare_increasing"
WELFARE_DECREASING = "welfare_decreasing"


# --- Welfare values ---
def welfare_value(c, u, menu):
    """Expected utility of the Luce lottery on c(menu): sum u^2 / sum u."""
    chosen = c.chosen(menu)
    return sum((u[x] ** 2 for x in members(chosen)), Fraction(0)) / u.total(chosen)


def expected_value(p, menu, w):
    return sum((p.prob(x, menu) * w[x] for x in members(menu)), Fraction(0))


def cumulative(p, menu, order, a):
    """Probability that the pick from `menu` sits at or above `a` in a worst-first order."""
    start = order.index(a)
    return sum((p.prob(b, menu) for b in order[start:]), Fraction(0))


# --- Dominance ---
# A chain is a worst-first tuple of blocks (bitmasks); a linear order is a chain of singletons.
def chain_of(order):
    return tuple(1 << x for x in order)


def _chain_failure(p, big_menu, small_menu, chain):
    """Index of the first block (from the top) where `big_menu` falls behind, else None."""
    upper_a = upper_b = Fraction(0)
    for idx in range(len(chain) - 1, -1, -1):
        block = chain[idx]
        upper_a += sum((p.prob(x, big_menu) for x in members(block)), Fraction(0))
        upper_b += sum((p.prob(x, small_menu) for x in members(block)), Fraction(0))
        if upper_a < upper_b:
            return idx
    return None


def _chain_reversal(p, big_menu, small_menu, chain, idx):
    """Utility, increasing along the chain, with E[w | small_menu] > E[w | big_menu]."""
    gap = Fraction(0)
    for block in chain[idx:]:
        for x in members(block):
            gap += p.prob(x, small_menu) - p.prob(x, big_menu)
    bonus = Fraction(len(chain)) / gap + 1
    n = p.n
    values = [Fraction(1)] * n
    for i, block in enumerate(chain, start=1):
        for x in members(block):
            values[x] = Fraction(i) + (bonus if i - 1 >= idx else 0)
    w = Utility(tuple(values))
    if not expected_value(p, small_menu, w) > expected_value(p, big_menu, w):
        raise ConsistencyError("reversal utility failed to reverse welfare")
    return w


def fosd(p, A, B, relation, extensions=None):
    """Does p(A) first-order dominate p(B) along every linear extension of the relation?

    Returns (True, None) or (False, (order, a)) with a the failing threshold alternative.
    """
    orders = extensions if extensions is not None else linear_extensions(relation)
    for order in orders:
        idx = _chain_failure(p, A, B, chain_of(order))
        if idx is not None:
            return False, (order, order[idx])
    return True, None


def reversal_utility(p, A, B, order, a):
    """Aligned utility with E[w | B] > E[w | A], given A fails to dominate B at `a`."""
    return _chain_reversal(p, A, B, chain_of(order), order.index(a))


def _random_increasing(rng, chain, n):
    k = len(chain)
    picks = sorted(rng.sample(range(1, k * SPOT_CHECK_DENOMINATOR + 1), k))
    values = [Fraction(1)] * n
    for block, num in zip(chain, picks):
        for x in members(block):
            values[x] = Fraction(num, SPOT_CHECK_DENOMINATOR)
    return Utility(tuple(values))


def _spot_check(p, A, B, chains, dominated, spot_checks, rng):
    for _ in range(spot_checks):
        w = _random_increasing(rng, rng.choice(chains), p.n)
        if dominated and expected_value(p, A, w) < expected_value(p, B, w):
            raise ConsistencyError("sampled aligned utility contradicts first-order dominance")


def welfare_dominates(c, u, A, B, relation, spot_checks=DEFAULT_SPOT_CHECKS, seed=0):
    """W(A) >= W(B) for every utility aligned with the relation, with choice probabilities fixed by u."""
    p = logit(c, u)
    orders = list(linear_extensions(relation))
    dominated, witness = fosd(p, A, B, relation, orders)
    if spot_checks:
        _spot_check(p, A, B, [chain_of(o) for o in orders], dominated, spot_checks, random.Random(seed))
    if not dominated:
        reversal_utility(p, A, B, *witness)
    return dominated


# --- Overload ---
@dataclass
class OverloadEntry:
    x: int
    small: int
    big: int
    classification: str
    witness: Optional[Utility] = None
    witness_order: Optional[tuple] = None
    witness_threshold: Optional[int] = None

    def to_json(self, labels):
        return {
            "x": labels[self.x],
            "A": format_menu(labels, self.small),
            "B": format_menu(labels, self.big),
            "classification": self.classification,
            "witness_utility": self.witness.to_json(labels) if self.witness else None,
            "witness_order": format_order(labels, self.witness_order) if self.witness_order else None,
            "witness_threshold": labels[self.witness_threshold] if self.witness_threshold is not None else None,
        }


@dataclass
class OverloadReport:
    overload: bool
    entries: list = field(default_factory=list)
    branch: Optional[str] = None
    gtlm: Optional[bool] = None
    welfare_relation: Optional[str] = None

    def to_json(self, labels):
        out = {
            "overload": self.overload,
            "violations": [e.to_json(labels) for e in self.entries],
        }
        if self.branch is not None:
            out["branch"] = self.branch
            out["gtlm"] = self.gtlm
            out["welfare_relation"] = self.welfare_relation
        return out


def classify_violations(p, chains, spot_checks=0, seed=0):
    """Split regularity violations into welfare-increasing and welfare-decreasing ones."""
    rng = random.Random(seed)
    entries = []
    verdicts = {}
    for x, small, big in regularity_violations(p):
        key = (small, big)
        if key not in verdicts:
            failure = None
            for chain in chains:
                idx = _chain_failure(p, big, small, chain)
                if idx is not None:
                    failure = (chain, idx)
                    break
            if spot_checks:
                _spot_check(p, big, small, chains, failure is None, spot_checks, rng)
            if failure is None:
                verdicts[key] = (WELFARE_INCREASING, None, None, None)
            else:
                chain, idx = failure
                # Blocks flattened worst-first; the failing upper set starts at the block's first member.
                order = tuple(a for block in chain for a in members(block))
                verdicts[key] = (WELFARE_DECREASING, _chain_reversal(p, big, small, chain, idx),
                                 order, members(chain[idx])[0])
        entries.append(OverloadEntry(x, small, big, *verdicts[key]))
    return entries


def detect_overload(c, u, spot_checks=DEFAULT_SPOT_CHECKS, seed=0):
    """Classify every regularity violation of logit(c, u) by its welfare effect."""
    c.require_total("detect_overload")
    relation = revealed_relation(c, "R")
    require_acyclic(relation)
    aligned, bad = is_aligned(u, relation)
    if not aligned:
        pairs = [format_order(c.labels, pair) for pair in bad]
        raise PreconditionError("misaligned_utility", f"utility is not aligned with R at {pairs}")
    p = logit(c, u)
    chains = [chain_of(order) for order in linear_extensions(relation)]
    entries = classify_violations(p, chains, spot_checks, seed)
    overload = any(e.classification == WELFARE_DECREASING for e in entries)
    if overload == holds(c, "alpha"):
        raise ConsistencyError("welfare classification disagrees with the alpha axiom")
    return OverloadReport(overload, entries)
