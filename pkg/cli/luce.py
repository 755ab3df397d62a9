from dataclasses import dataclass
from fractions import Fraction

from cli.axioms import (
    first_linear_extension,
    holds,
    iter_violations,
    require_acyclic,
    revealed_relation,
)
from cli.core import (
    ConsistencyError,
    PreconditionError,
    fmt_rational,
    format_menu,
    members,
    parse_rational,
    proper_submenus,
    size,
)


# --- Utilities ---
@dataclass(frozen=True)
class Utility:
    """Strictly positive rational utility, one value per alternative id."""

    values: tuple

    def __post_init__(self):
        values = tuple(parse_rational(v) for v in self.values)
        if not values:
            raise ValueError("utility must assign at least one value")
        for i, v in enumerate(values):
            if v <= 0:
                raise ValueError(f"utility of alternative {i} must be positive, got {v}")
        object.__setattr__(self, "values", values)

    def __getitem__(self, x):
        return self.values[x]

    def __len__(self):
        return len(self.values)

    def total(self, menu):
        return sum((self.values[x] for x in members(menu)), Fraction(0))

    def to_json(self, labels):
        return {label: fmt_rational(v) for label, v in zip(labels, self.values)}

    @classmethod
    def from_mapping(cls, mapping, labels):
        missing = [label for label in labels if label not in mapping]
        extra = [key for key in mapping if key not in labels]
        if missing or extra:
            raise ValueError(f"utility must cover exactly the alternatives (missing {missing}, unknown {extra})")
        return cls(tuple(mapping[label] for label in labels))


def uniform_utility(n):
    return Utility((Fraction(1),) * n)


def power_utility(order, base=2):
    """base**i at position i of a worst-first order."""
    values = [Fraction(0)] * len(order)
    for i, x in enumerate(order, start=1):
        values[x] = Fraction(base) ** i
    return Utility(tuple(values))


def near_uniform_utility(order):
    """Equally spaced values in [1, 1 + 1/(n+1)) increasing along a worst-first order."""
    n = len(order)
    values = [Fraction(0)] * n
    for i, x in enumerate(order):
        values[x] = 1 + Fraction(i, n * (n + 1))
    return Utility(tuple(values))


def is_aligned(u, relation):
    bad = sorted((x, y) for x, y in relation.pairs if not u[x] > u[y])
    return not bad, bad


# --- Stochastic choice ---
@dataclass(frozen=True)
class StochasticChoice:
    """Per-menu choice probabilities; probs[menu] is a length-n tuple, None if unobserved."""

    n: int
    probs: tuple

    def __post_init__(self):
        if len(self.probs) != 1 << self.n:
            raise ValueError("probability table has the wrong length")
        for menu in range(1, 1 << self.n):
            row = self.probs[menu]
            if row is None:
                continue
            if any(p < 0 for p in row):
                raise ValueError(f"negative probability in menu {menu}")
            if sum(row) != 1:
                raise ValueError(f"probabilities in menu {menu} do not sum to 1")
            if any(p and not menu >> x & 1 for x, p in enumerate(row)):
                raise ValueError(f"probability mass outside menu {menu}")

    def prob(self, x, menu):
        return self.probs[menu][x]

    def defined(self, menu):
        return self.probs[menu] is not None

    def support(self, menu):
        return sum(1 << x for x, p in enumerate(self.probs[menu]) if p > 0)


def logit(c, u):
    """Luce probabilities of u restricted to each observed choice set."""
    if len(u) != c.n:
        raise ValueError(f"utility has {len(u)} values for {c.n} alternatives")
    probs = [None] * (1 << c.n)
    for menu in c.menus():
        chosen = c.chosen(menu)
        total = u.total(chosen)
        row = [Fraction(0)] * c.n
        for x in members(chosen):
            row[x] = u[x] / total
        probs[menu] = tuple(row)
    return StochasticChoice(c.n, tuple(probs))


def uniform(c):
    return logit(c, uniform_utility(c.n))


# --- Regularity ---
def iter_regularity_violations(p):
    for menu in range(1, 1 << p.n):
        if not p.defined(menu):
            raise PreconditionError("partial_dataset", "regularity needs probabilities on every menu")
    for big in range(1, 1 << p.n):
        row_big = p.probs[big]
        for small in proper_submenus(big):
            row_small = p.probs[small]
            for x in members(small):
                if row_small[x] < row_big[x]:
                    yield x, small, big


def regularity_violations(p):
    """All (x, A, B) with A strictly inside B and p(x, A) < p(x, B)."""
    return list(iter_regularity_violations(p))


def is_regular(p):
    return next(iter_regularity_violations(p), None) is None


def describe_violations(p, labels, violations):
    return [
        {
            "x": labels[x],
            "A": format_menu(labels, small),
            "B": format_menu(labels, big),
            "p_A": fmt_rational(p.prob(x, small)),
            "p_B": fmt_rational(p.prob(x, big)),
        }
        for x, small, big in violations
    ]


def regular_for_all_utilities(c):
    """Exact test: is logit(c, u) regular for every positive u?"""
    c.require_total("regular_for_all_utilities")
    for big in c.menus():
        cb = c.chosen(big)
        for small in proper_submenus(big):
            cs = c.chosen(small)
            if cb & small & ~cs:
                return False
            if cs & cb and cs & ~cb:
                return False
    return True


def witness_regular_logit(c):
    """For acyclic R: a regular-inducing utility if c is path independent, else None."""
    c.require_total("witness_regular_logit")
    relation = revealed_relation(c, "R")
    require_acyclic(relation)
    if not holds(c, "path_independence"):
        return None
    u = power_utility(first_linear_extension(relation))
    if not is_regular(logit(c, u)):
        raise ConsistencyError("power utility along R failed to induce regular choice on a path independent dataset")
    return u


def all_aligned_regular(c):
    """Return (alpha and theta, counterexample utility aligned with R or None)."""
    c.require_total("all_aligned_regular")
    relation = revealed_relation(c, "R")
    require_acyclic(relation)
    if holds(c, "alpha") and holds(c, "theta"):
        return True, None
    u = near_uniform_utility(first_linear_extension(relation))
    if not is_aligned(u, relation)[0] or is_regular(logit(c, u)):
        raise ConsistencyError("near-uniform aligned utility did not break regularity")
    return False, u


def beta_counterexample(c):
    """Build u making logit(c, u) irregular at the first beta violation, or None if beta holds."""
    c.require_total("beta_counterexample")
    witness = next(iter_violations(c, "beta"), None)
    if witness is None:
        return None
    (x, y), (small, big) = witness
    # Largest 1/2^k with eps * (|c(big)| + 1 - |c(small)|) < 1.
    weight = size(c.chosen(big)) + 1 - size(c.chosen(small))
    eps = Fraction(1)
    while eps * weight >= 1:
        eps /= 2
    values = [eps] * c.n
    values[y] = Fraction(1)
    u = Utility(tuple(values))
    p = logit(c, u)
    if not p.prob(x, small) < p.prob(x, big):
        raise ConsistencyError("beta counterexample utility did not break regularity")
    return u
