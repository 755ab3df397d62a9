from dataclasses import dataclass
from itertools import combinations
from typing import List

from pydantic import BaseModel, Field

from cli.core import (
    ChoiceDataset,
    PreconditionError,
    format_menu,
    format_order,
    is_subset,
    members,
    proper_submenus,
    size,
    submenus,
)

# --- Setup ---
DEFAULT_WITNESS_CAP = 16

AXIOMS = (
    "alpha",
    "beta",
    "gamma",
    "theta",
    "path_independence",
    "outcast",
    "fixed_point",
    "theta_local",
)

RELATION_KINDS = ("R", "Q", "S")


# --- Reports ---
class Violation(BaseModel):
    alternatives: List[int] = Field(default_factory=list)
    menus: List[int] = Field(default_factory=list)

    def describe(self, labels):
        return {
            "alternatives": [labels[i] for i in self.alternatives],
            "menus": [format_menu(labels, m) for m in self.menus],
        }


class AxiomReport(BaseModel):
    axiom: str
    holds: bool
    count: int
    witnesses: List[Violation]

    def to_json(self, labels):
        return {
            "holds": self.holds,
            "count": self.count,
            "witnesses": [w.describe(labels) for w in self.witnesses],
        }


# --- Violation enumerators ---
# Each yields (alternatives, menus) tuples in a fixed order.
def _alpha(c):
    for big in c.menus():
        cb = c.chosen(big)
        for small in proper_submenus(big):
            for x in members(cb & small & ~c.chosen(small)):
                yield (x,), (small, big)


def _beta(c):
    for big in c.menus():
        cb = c.chosen(big)
        for small in proper_submenus(big):
            cs = c.chosen(small)
            inside, outside = cs & cb, cs & ~cb
            if not inside or not outside:
                continue
            for x in members(inside):
                for y in members(outside):
                    yield (x, y), (small, big)


def _gamma(c):
    menus = c.menus()
    for i, a in enumerate(menus):
        for b in menus[i + 1:]:
            common = c.chosen(a) & c.chosen(b) & ~c.chosen(a | b)
            for x in members(common):
                yield (x,), (a, b)


def _theta(c):
    for big in c.menus():
        cb = c.chosen(big)
        for small in proper_submenus(big):
            cs = c.chosen(small)
            if cs & cb and size(cs) > size(cb):
                yield (), (small, big)


def _path_independence(c):
    menus = c.menus()
    for i, a in enumerate(menus):
        for b in menus[i:]:
            if c.chosen(a | b) != c.chosen(c.chosen(a) | c.chosen(b)):
                yield (), (a, b)


def _outcast(c):
    for big in c.menus():
        cb = c.chosen(big)
        for extra in submenus(big & ~cb):
            small = cb | extra
            if small != big and c.chosen(small) != cb:
                yield (), (small, big)
        if big & ~cb and c.chosen(cb) != cb:
            yield (), (cb, big)


def _fixed_point(c):
    for menu in c.menus():
        subs = submenus(menu)
        if not any(all(c.chosen(sub) >> b & 1 for sub in subs if sub >> b & 1) for b in members(menu)):
            yield (), (menu,)


def _theta_local(c):
    for menu in c.menus():
        cs = c.chosen(menu)
        for w in range(c.n):
            if menu >> w & 1:
                continue
            bigger = menu | 1 << w
            cb = c.chosen(bigger)
            if cb & cs and size(cb) < size(cs):
                yield (w,), (menu, bigger)


_VIOLATIONS = {
    "alpha": _alpha,
    "beta": _beta,
    "gamma": _gamma,
    "theta": _theta,
    "path_independence": _path_independence,
    "outcast": _outcast,
    "fixed_point": _fixed_point,
    "theta_local": _theta_local,
}


# --- Axiom checks ---
def _violations_of(axiom):
    if axiom not in _VIOLATIONS:
        raise ValueError(f"Unknown axiom: {axiom}")
    return _VIOLATIONS[axiom]


def iter_violations(c, axiom):
    c.require_total(f"axiom check ({axiom})")
    return _violations_of(axiom)(c)


def holds(c, axiom):
    return next(iter_violations(c, axiom), None) is None


def check_axiom(c, axiom, cap=DEFAULT_WITNESS_CAP):
    """Check one axiom and collect up to `cap` witnesses (all of them when cap is None)."""
    if cap is not None and cap < 1:
        raise ValueError("witness cap must be at least 1")
    witnesses = []
    count = 0
    for alternatives, menus in iter_violations(c, axiom):
        count += 1
        if cap is None or len(witnesses) < cap:
            witnesses.append(Violation(alternatives=list(alternatives), menus=list(menus)))
    return AxiomReport(axiom=axiom, holds=count == 0, count=count, witnesses=witnesses)


def is_violation(c, axiom, violation):
    """Re-check a single witness directly against the axiom's definition."""
    c.require_total(f"axiom check ({axiom})")
    alts, menus = violation.alternatives, violation.menus
    ch = c.chosen

    def has(menu, x):
        return bool(menu >> x & 1)

    if axiom == "alpha":
        (x,), (a, b) = alts, menus
        return is_subset(a, b) and has(a, x) and has(ch(b), x) and not has(ch(a), x)
    if axiom == "beta":
        (x, y), (a, b) = alts, menus
        return (is_subset(a, b) and has(ch(a), x) and has(ch(a), y)
                and has(ch(b), x) and not has(ch(b), y))
    if axiom == "gamma":
        (x,), (a, b) = alts, menus
        return has(ch(a), x) and has(ch(b), x) and not has(ch(a | b), x)
    if axiom == "theta":
        a, b = menus
        return is_subset(a, b) and bool(ch(a) & ch(b)) and size(ch(a)) > size(ch(b))
    if axiom == "path_independence":
        a, b = menus
        return ch(a | b) != ch(ch(a) | ch(b))
    if axiom == "outcast":
        a, b = menus
        return is_subset(ch(b), a) and is_subset(a, b) and ch(a) != ch(b)
    if axiom == "fixed_point":
        (a,) = menus
        subs = submenus(a)
        return not any(all(has(ch(s), x) for s in subs if has(s, x)) for x in members(a))
    if axiom == "theta_local":
        (w,), (a, b) = alts, menus
        return (not has(a, w) and b == a | 1 << w and bool(ch(a) & ch(b))
                and size(ch(b)) < size(ch(a)))
    raise ValueError(f"Unknown axiom: {axiom}")


# --- Relations ---
@dataclass(frozen=True)
class Relation:
    """Binary relation on alternative ids; (x, y) reads "x above y"."""

    n: int
    pairs: frozenset

    def __post_init__(self):
        pairs = frozenset((int(x), int(y)) for x, y in self.pairs)
        for x, y in pairs:
            if not (0 <= x < self.n and 0 <= y < self.n):
                raise ValueError(f"pair ({x}, {y}) outside ground set of size {self.n}")
        object.__setattr__(self, "pairs", pairs)

    def __contains__(self, pair):
        return pair in self.pairs

    def __iter__(self):
        return iter(sorted(self.pairs))

    def __len__(self):
        return len(self.pairs)

    def is_irreflexive(self):
        return all(x != y for x, y in self.pairs)

    def successors(self, x):
        return sorted(y for a, y in self.pairs if a == x)

    def above(self):
        """above[y] is the bitmask of every x with (x, y) in the relation."""
        masks = [0] * self.n
        for x, y in self.pairs:
            masks[y] |= 1 << x
        return masks

    def below(self):
        masks = [0] * self.n
        for x, y in self.pairs:
            masks[x] |= 1 << y
        return masks

    def union(self, other):
        if other.n != self.n:
            raise ValueError("relations over different ground sets")
        return Relation(self.n, self.pairs | other.pairs)

    def to_json(self, labels):
        return [[labels[x], labels[y]] for x, y in self]

    @classmethod
    def from_labels(cls, labels, pairs):
        index = {label: i for i, label in enumerate(labels)}
        try:
            return cls(len(labels), frozenset((index[x], index[y]) for x, y in pairs))
        except KeyError as e:
            raise ValueError(f"unknown alternative {e.args[0]!r}") from None


def revealed_relation(c, kind="R"):
    """Revealed relations: R (chosen over rejected), Q (insertion disturbs) and S."""
    pairs = set()
    if kind == "R":
        for menu in c.menus():
            chosen = c.chosen(menu)
            rejected = members(menu & ~chosen)
            for x in members(chosen):
                pairs.update((x, y) for y in rejected)
    elif kind in ("Q", "S"):
        c.require_total(f"revealed relation {kind}")
        for menu in c.menus():
            chosen = c.chosen(menu)
            for x in range(c.n):
                if menu >> x & 1:
                    continue
                if not is_subset(chosen, c.chosen(menu | 1 << x)):
                    pairs.update((x, y) for y in members(menu))
        if kind == "S":
            return revealed_relation(c, "R").union(Relation(c.n, frozenset(pairs)))
    else:
        raise ValueError(f"Unknown relation kind: {kind}")
    relation = Relation(c.n, frozenset(pairs))
    if not relation.is_irreflexive():
        raise PreconditionError("cyclic_relation", f"revealed relation {kind} is reflexive")
    return relation


def is_acyclic(relation):
    """Return (True, None) or (False, cycle) where the cycle repeats its first node."""
    succ = [relation.successors(x) for x in range(relation.n)]
    color = [0] * relation.n
    stack = []

    def visit(x):
        color[x] = 1
        stack.append(x)
        for y in succ[x]:
            if color[y] == 1:
                return stack[stack.index(y):] + [y]
            if color[y] == 0:
                cycle = visit(y)
                if cycle:
                    return cycle
        stack.pop()
        color[x] = 2
        return None

    for x in range(relation.n):
        if color[x] == 0:
            cycle = visit(x)
            if cycle:
                return False, cycle
    return True, None


def require_acyclic(relation, name="R"):
    ok, cycle = is_acyclic(relation)
    if not ok:
        raise PreconditionError("cyclic_relation", f"relation {name} has a cycle through ids {cycle}")


def linear_extensions(relation):
    """Lazily enumerate linear extensions, each listed worst first, in lexicographic order."""
    require_acyclic(relation, "the relation")
    below = relation.below()
    n = relation.n

    def extend(placed, prefix):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for z in range(n):
            if not placed >> z & 1 and below[z] & ~placed == 0:
                prefix.append(z)
                yield from extend(placed | 1 << z, prefix)
                prefix.pop()

    return extend(0, [])


def first_linear_extension(relation):
    return next(linear_extensions(relation))


def order_position(order):
    """Map alternative id to its 1-based position in a worst-first order."""
    return {x: i + 1 for i, x in enumerate(order)}


def maximal_set(relation, menu, above=None):
    above = relation.above() if above is None else above
    return sum(1 << x for x in members(menu) if above[x] & menu == 0)


def maximal_choice(labels, relation):
    above = relation.above()
    return ChoiceDataset.from_function(labels, lambda menu: maximal_set(relation, menu, above))


def rationalizable_acyclic(c):
    """Return the binary base relation when c maximizes an acyclic relation, else None."""
    c.require_total("rationalizable_acyclic")
    pairs = set()
    for a, b in combinations(range(c.n), 2):
        chosen = c.chosen(1 << a | 1 << b)
        if not chosen >> a & 1:
            pairs.add((b, a))
        if not chosen >> b & 1:
            pairs.add((a, b))
    relation = Relation(c.n, frozenset(pairs))
    if not is_acyclic(relation)[0]:
        return None
    above = relation.above()
    for menu in c.menus():
        if maximal_set(relation, menu, above) != c.chosen(menu):
            return None
    return relation


def describe_relation(c, kind):
    relation = revealed_relation(c, kind)
    ok, cycle = is_acyclic(relation)
    return {
        "pairs": relation.to_json(c.labels),
        "acyclic": ok,
        "cycle": format_order(c.labels, cycle) if cycle else None,
    }
