from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from cli.axioms import (
    Relation,
    holds,
    is_acyclic,
    iter_violations,
    linear_extensions,
    revealed_relation,
)
from cli.core import (
    ChoiceDataset,
    ConsistencyError,
    PreconditionError,
    format_menu,
    is_subset,
    members,
    parse_menu,
    proper_submenus,
    size,
    submenus,
)
from cli.luce import Utility, is_aligned, logit
from cli.welfare import WELFARE_DECREASING, OverloadReport, chain_of, classify_violations

# --- Setup ---
FILTER_ENUMERATION_LIMIT = 3


# --- Weak orders ---
@dataclass(frozen=True)
class WeakOrder:
    """Complete preorder stored as a dense rank per alternative; higher rank is better."""

    rank: tuple

    def __post_init__(self):
        used = sorted(set(self.rank))
        dense = {r: i for i, r in enumerate(used)}
        object.__setattr__(self, "rank", tuple(dense[r] for r in self.rank))

    @property
    def n(self):
        return len(self.rank)

    @property
    def classes(self):
        """Indifference classes as bitmasks, best first."""
        top = max(self.rank)
        return tuple(
            sum(1 << x for x, r in enumerate(self.rank) if r == level)
            for level in range(top, -1, -1)
        )

    def prefers(self, x, y):
        return self.rank[x] > self.rank[y]

    def best(self, menu):
        top = max(self.rank[x] for x in members(menu))
        return sum(1 << x for x in members(menu) if self.rank[x] == top)

    def strict_relation(self):
        return Relation(self.n, frozenset(
            (x, y) for x in range(self.n) for y in range(self.n) if self.rank[x] > self.rank[y]
        ))

    @classmethod
    def from_classes(cls, classes, n):
        rank = [None] * n
        for level, block in enumerate(reversed(list(classes))):
            for x in block:
                if rank[x] is not None:
                    raise ValueError(f"alternative {x} listed in two classes")
                rank[x] = level
        if None in rank:
            raise ValueError("weak order must rank every alternative")
        return cls(tuple(rank))


def enumerate_weak_orders(n):
    for rank in product(range(n), repeat=n):
        if set(rank) == set(range(max(rank) + 1)):
            yield WeakOrder(rank)


# --- Consideration filters ---
def _table(consideration, n=None):
    if isinstance(consideration, dict):
        n = n if n is not None else max(consideration).bit_length()
        table = [0] * (1 << n)
        for menu, considered in consideration.items():
            table[menu] = considered
        return table
    return list(consideration)


def is_competition_filter(consideration, n=None):
    """Return (True, None) or (False, (x, A, B)) where x survives in B but not in A."""
    table = _table(consideration, n)
    for menu in range(1, len(table)):
        considered = table[menu]
        if considered == 0:
            raise ValueError(f"empty consideration set for menu {menu}")
        if not is_subset(considered, menu):
            raise ValueError(f"consideration set for menu {menu} is not a subset of it")
    for big in range(1, len(table)):
        for small in proper_submenus(big):
            missing = table[big] & small & ~table[small]
            if missing:
                return False, (members(missing)[0], small, big)
    return True, None


def _forced(table, menu, n):
    forced = 0
    for w in range(n):
        if not menu >> w & 1:
            forced |= table[menu | 1 << w]
    return forced & menu


def _menus_top_down(n):
    return sorted(range(1, 1 << n), key=lambda m: (-size(m), m))


def enumerate_filters(n):
    """Every competition filter on n alternatives (n at most 3)."""
    if n > FILTER_ENUMERATION_LIMIT:
        raise PreconditionError("too_large", f"filter enumeration is limited to {FILTER_ENUMERATION_LIMIT} alternatives")
    menus = _menus_top_down(n)

    def assign(i, table):
        if i == len(menus):
            yield tuple(table)
            return
        menu = menus[i]
        forced = _forced(table, menu, n)
        free = menu & ~forced
        options = ([forced] if forced else []) + [forced | extra for extra in submenus(free)]
        for considered in options:
            table[menu] = considered
            yield from assign(i + 1, table)
        table[menu] = 0

    return assign(0, [0] * (1 << n))


def random_filter(rng, n):
    table = [0] * (1 << n)
    for menu in _menus_top_down(n):
        forced = _forced(table, menu, n)
        extra = sum(1 << x for x in members(menu & ~forced) if rng.random() < 0.5)
        considered = forced | extra
        table[menu] = considered or 1 << rng.choice(members(menu))
    return tuple(table)


# --- Limited attention models ---
@dataclass(frozen=True)
class LAM:
    labels: tuple
    weak_order: WeakOrder
    consideration: tuple

    def __post_init__(self):
        if self.weak_order.n != len(self.labels):
            raise ValueError("weak order and labels disagree on the ground set")
        if len(self.consideration) != 1 << len(self.labels):
            raise ValueError("consideration table has the wrong length")
        ok, witness = is_competition_filter(self.consideration)
        if not ok:
            x, small, big = witness
            raise ValueError(
                f"consideration is not a competition filter: {self.labels[x]} considered in "
                f"{format_menu(self.labels, big)} but not in {format_menu(self.labels, small)}"
            )

    @property
    def n(self):
        return len(self.labels)


def lam_choice(model):
    return ChoiceDataset.from_function(
        model.labels, lambda menu: model.weak_order.best(model.consideration[menu])
    )


def trivial_lam(c):
    """LAM with universal indifference and consideration equal to c, or (None, reason)."""
    c.require_total("trivial_lam")
    if not is_acyclic(revealed_relation(c, "R"))[0]:
        return None, "r_cyclic"
    if not holds(c, "alpha"):
        return None, "alpha_violated"
    model = LAM(c.labels, WeakOrder((0,) * c.n), c.choices)
    if lam_choice(model).choices != c.choices:
        raise ConsistencyError("trivial limited attention model does not reproduce the dataset")
    return model, "ok"


def agrees(u, weak_order, strict=False):
    for x in range(weak_order.n):
        for y in range(weak_order.n):
            if weak_order.prefers(x, y) and not u[x] > u[y]:
                return False
            if strict and weak_order.rank[x] == weak_order.rank[y] and u[x] != u[y]:
                return False
    return True


def representing_utility(model):
    return Utility(tuple(Fraction(r + 1) for r in model.weak_order.rank))


def lam_overload(model, u, strict=False, spot_checks=0, seed=0):
    """Overload analysis for a LAM; strict mode ranks welfare by indifference classes only."""
    if not agrees(u, model.weak_order, strict):
        raise PreconditionError("misaligned_utility", "utility does not agree with the weak order")
    c = lam_choice(model)
    alpha = holds(c, "alpha")
    relation = revealed_relation(c, "R")
    gtlm = is_acyclic(relation)[0] and is_aligned(u, relation)[0]
    if strict:
        chains = [tuple(reversed(model.weak_order.classes))]
        welfare_relation = "classes"
    else:
        basis = relation if gtlm else model.weak_order.strict_relation()
        welfare_relation = "R" if gtlm else "preference"
        chains = [chain_of(order) for order in linear_extensions(basis)]
    entries = classify_violations(logit(c, u), chains, spot_checks, seed)
    overload = any(e.classification == WELFARE_DECREASING for e in entries)
    if strict:
        branch = "alpha_violated" if not alpha else "alpha_holds"
        if overload == alpha:
            raise ConsistencyError("class-level overload disagrees with the alpha axiom")
    else:
        branch = "alpha_violated" if not alpha else ("gtlm" if gtlm else "outside_gtlm")
        if not alpha and not overload:
            raise ConsistencyError("alpha fails but no welfare-decreasing violation was found")
        if alpha and gtlm and overload:
            raise ConsistencyError("overload detected inside the Luce model with alpha")
    return OverloadReport(overload, entries, branch, gtlm, welfare_relation)


def misaligned_overload_utility(model):
    """Utility agreeing with the weak order that produces overload when alpha holds but beta fails."""
    c = lam_choice(model)
    if not holds(c, "alpha"):
        return None
    witness = next(iter_violations(c, "beta"), None)
    if witness is None:
        return None
    (_, y), _ = witness
    n = model.n
    base = Fraction(n + 2)
    rank = model.weak_order.rank
    values = [base ** r for r in rank]
    values[y] = (n + 1) * base ** rank[y]
    return Utility(tuple(values))


# --- JSON ---
def lam_to_json(model):
    labels = model.labels
    return {
        "alternatives": list(labels),
        "classes": [[labels[x] for x in members(block)] for block in model.weak_order.classes],
        "consideration": {
            format_menu(labels, menu): [labels[x] for x in members(model.consideration[menu])]
            for menu in range(1, 1 << model.n)
        },
    }


def lam_from_json(obj):
    labels = tuple(obj["alternatives"])
    index = {label: i for i, label in enumerate(labels)}
    try:
        classes = [[index[label] for label in block] for block in obj["classes"]]
        table = [0] * (1 << len(labels))
        for key, considered in obj["consideration"].items():
            table[parse_menu(key, labels)] = sum(1 << index[label] for label in considered)
    except KeyError as e:
        raise ValueError(f"unknown alternative {e.args[0]!r}") from None
    return LAM(labels, WeakOrder.from_classes(classes, len(labels)), tuple(table))
