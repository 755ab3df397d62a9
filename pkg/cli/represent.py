from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Optional

from cli.axioms import (
    first_linear_extension,
    holds,
    is_acyclic,
    linear_extensions,
    revealed_relation,
)
from cli.core import (
    ConsistencyError,
    PreconditionError,
    fmt_rational,
    format_menu,
    format_order,
    members,
    parse_menu,
    parse_rational,
    proper_submenus,
    size,
)
from cli.feasibility import fm_feasible, semiorder_rep_system
from cli.luce import Utility

# --- Setup ---
DEFAULT_K = 2
DEFAULT_BASE = 2
SHAPE_SEARCH_LIMIT = 8

SHAPES = (
    "concave",
    "convex",
    "strongly_concave",
    "strongly_convex",
    "quasi_concave",
    "quasi_convex",
)


# --- Threshold representations ---
@dataclass(frozen=True)
class ThresholdRep:
    """Utility v plus a nonnegative threshold per menu; x is chosen iff max v - v(x) <= eps(A)."""

    v: Utility
    eps: dict = field(hash=False)

    def __post_init__(self):
        for menu, value in self.eps.items():
            if value < 0:
                raise ValueError(f"threshold for menu {menu} is negative")

    def chosen(self, menu):
        top = max(self.v[x] for x in members(menu))
        return sum(1 << x for x in members(menu) if top - self.v[x] <= self.eps[menu])


def _argmax(v, menu):
    return max(members(menu), key=lambda x: (v[x], -x))


def _argmin(v, menu):
    return min(members(menu), key=lambda x: (v[x], x))


def verify_threshold_rep(c, rep):
    """Return (represents, mismatched menus)."""
    if len(rep.v) != c.n:
        raise ValueError(f"representation has {len(rep.v)} utilities for {c.n} alternatives")
    mismatched = []
    for menu in c.menus():
        if menu not in rep.eps:
            raise PreconditionError("coverage_gap", f"no threshold for menu {format_menu(c.labels, menu)}")
        if rep.chosen(menu) != c.chosen(menu):
            mismatched.append(menu)
    return not mismatched, mismatched


def threshold_monotonicity(rep):
    if len(set(rep.eps.values())) <= 1:
        return "constant"
    decreasing = increasing = True
    for big, eps_big in rep.eps.items():
        for small in proper_submenus(big):
            if small not in rep.eps:
                continue
            if rep.eps[small] < eps_big:
                decreasing = False
            if rep.eps[small] > eps_big:
                increasing = False
    if decreasing:
        return "weakly_decreasing"
    if increasing:
        return "weakly_increasing"
    return "none"


# --- Utility shapes ---
def lemma2_utility(order, family, k=DEFAULT_K, a=DEFAULT_BASE):
    """k - a**-i (concave) or k + a**i (convex) at position i of a worst-first order."""
    k = parse_rational(k)
    if int(a) != a or a < 2:
        raise ValueError(f"base must be an integer of at least 2, got {a}")
    if sorted(order) != list(range(len(order))):
        raise ValueError("order must list every alternative exactly once")
    values = [Fraction(0)] * len(order)
    for i, x in enumerate(order, start=1):
        if family == "concave":
            if k <= 1:
                raise ValueError("the concave family needs k > 1")
            values[x] = k - Fraction(1, a ** i)
        elif family == "convex":
            values[x] = k + Fraction(a) ** i
        else:
            raise ValueError(f"Unknown family: {family}")
    return Utility(tuple(values))


@dataclass(frozen=True)
class ShapeVerdict:
    shape: str
    holds: bool
    order_used: tuple
    witness: Optional[tuple] = None

    def to_json(self, labels):
        return {
            "shape": self.shape,
            "holds": self.holds,
            "order": format_order(labels, self.order_used),
            "witness_positions": list(self.witness) if self.witness else None,
        }


def _shape_witness(f, shape):
    n = len(f)
    # f is 1-indexed through f[i - 1]; witnesses are (m, k, l) positions with l < k < m.
    if shape in ("concave", "convex"):
        for m in range(2, n):
            up, down = f[m] - f[m - 1], f[m - 1] - f[m - 2]
            if (shape == "concave" and up > down) or (shape == "convex" and up < down):
                return (m + 1, m, m - 1)
        return None
    for l in range(1, n + 1):
        for k in range(l + 1, n + 1):
            for m in range(k + 1, n + 1):
                fl, fk, fm = f[l - 1], f[k - 1], f[m - 1]
                if shape == "strongly_concave" and fm - fk > fk - fl:
                    return (m, k, l)
                if shape == "strongly_convex" and fm - fk < fk - fl:
                    return (m, k, l)
                if shape == "quasi_concave" and fl > fk and fm > fk:
                    return (m, k, l)
                if shape == "quasi_convex" and fk > fl and fk > fm:
                    return (m, k, l)
    return None


def shape_check(u, order, shape):
    if shape not in SHAPES:
        raise ValueError(f"Unknown shape: {shape}")
    order = tuple(order)
    witness = _shape_witness([u[x] for x in order], shape)
    return ShapeVerdict(shape, witness is None, order, witness)


def find_shape_order(u, shape, restrict_to=None, limit=SHAPE_SEARCH_LIMIT):
    """First order (lexicographically) under which u has the shape, or None."""
    if restrict_to is not None:
        candidates = linear_extensions(restrict_to)
    else:
        if len(u) > limit:
            raise PreconditionError("too_large", f"free order search is limited to {limit} alternatives")
        candidates = permutations(range(len(u)))
    for order in candidates:
        if shape_check(u, order, shape).holds:
            return tuple(order)
    return None


# --- Constructions ---
def concave_threshold_rep(c, k=DEFAULT_K, a=DEFAULT_BASE):
    """Strongly concave utility with weakly decreasing thresholds, or None when alpha or acyclic R fails."""
    c.require_total("concave_threshold_rep")
    if not holds(c, "alpha"):
        return None
    relation = revealed_relation(c, "R")
    if not is_acyclic(relation)[0]:
        return None
    v = lemma2_utility(first_linear_extension(relation), "concave", k, a)
    top = v[_argmax(v, c.grand)]
    eps = {c.grand: top - v[_argmin(v, c.chosen(c.grand))]}
    for menu in sorted(c.menus(), key=lambda m: (-size(m), m)):
        if menu == c.grand:
            continue
        inherited = max(eps[menu | 1 << w] for w in range(c.n) if not menu >> w & 1)
        eps[menu] = max(inherited, top - v[_argmin(v, c.chosen(menu))])
    rep = ThresholdRep(v, eps)
    if not verify_threshold_rep(c, rep)[0]:
        raise ConsistencyError("concave threshold construction does not reproduce the dataset")
    if threshold_monotonicity(rep) not in ("constant", "weakly_decreasing"):
        raise ConsistencyError("concave threshold construction produced non-decreasing thresholds")
    return rep


def general_threshold_rep(c):
    """Threshold representation with v(x_i) = i along an extension of R, or None when R is cyclic."""
    c.require_total("general_threshold_rep")
    relation = revealed_relation(c, "R")
    if not is_acyclic(relation)[0]:
        return None
    values = [Fraction(0)] * c.n
    for i, x in enumerate(first_linear_extension(relation), start=1):
        values[x] = Fraction(i)
    v = Utility(tuple(values))
    eps = {
        menu: v[_argmax(v, menu)] - v[_argmin(v, c.chosen(menu))]
        for menu in c.menus()
    }
    rep = ThresholdRep(v, eps)
    if not verify_threshold_rep(c, rep)[0]:
        raise ConsistencyError("general threshold construction does not reproduce the dataset")
    return rep


def semiorder_rep(c):
    """Constant-threshold representation from the elimination sample, or None if infeasible."""
    c.require_total("semiorder_rep")
    relation = revealed_relation(c, "R")
    if not is_acyclic(relation)[0]:
        return None
    for order in linear_extensions(relation):
        result = fm_feasible(semiorder_rep_system(c, order))
        if not result.feasible:
            continue
        *values, eps = result.point
        shift = 1 - min(values)
        v = Utility(tuple(value + shift for value in values))
        rep = ThresholdRep(v, {menu: eps for menu in c.menus()})
        if not verify_threshold_rep(c, rep)[0]:
            raise ConsistencyError("semiorder sample does not reproduce the dataset")
        return rep
    return None


@dataclass
class Corollary1Report:
    alpha_pairs: int = 0
    outcast_pairs: int = 0
    failures: list = field(default_factory=list)

    @property
    def holds(self):
        return not self.failures

    def to_json(self, labels):
        return {
            "holds": self.holds,
            "alpha_pairs": self.alpha_pairs,
            "outcast_pairs": self.outcast_pairs,
            "failures": [
                {"A": format_menu(labels, a), "B": format_menu(labels, b), "clause": clause}
                for a, b, clause in self.failures
            ],
        }


def corollary1_check(c, rep):
    """Thresholds shrink where alpha holds but Outcast fails, and grow where alpha fails."""
    if not verify_threshold_rep(c, rep)[0]:
        raise PreconditionError("unverified_rep", "threshold representation does not reproduce the dataset")
    report = Corollary1Report()
    for big in c.menus():
        cb = c.chosen(big)
        for small in proper_submenus(big):
            cs = c.chosen(small)
            if cb & small & ~cs:
                report.alpha_pairs += 1
                if not rep.eps[small] < rep.eps[big]:
                    report.failures.append((small, big, "alpha"))
            elif cb & ~small == 0 and cs != cb:
                report.outcast_pairs += 1
                if not rep.eps[small] >= rep.eps[big]:
                    report.failures.append((small, big, "outcast"))
    return report


def frick_S_acyclic(c):
    return is_acyclic(revealed_relation(c, "S"))[0]


@dataclass(frozen=True)
class FrickCheck:
    represents: bool
    convex_order: Optional[tuple]
    monotonicity: str

    @property
    def holds(self):
        return (self.represents and self.convex_order is not None
                and self.monotonicity in ("constant", "weakly_increasing"))

    def to_json(self, labels):
        return {
            "holds": self.holds,
            "represents": self.represents,
            "strongly_convex_order": format_order(labels, self.convex_order) if self.convex_order else None,
            "monotonicity": self.monotonicity,
        }


def verify_frick_rep(c, rep):
    """Check a strongly convex v with weakly increasing thresholds."""
    represents = verify_threshold_rep(c, rep)[0]
    ascending = tuple(sorted(range(c.n), key=lambda x: (rep.v[x], x)))
    order = ascending if shape_check(rep.v, ascending, "strongly_convex").holds else None
    if order is None and c.n <= SHAPE_SEARCH_LIMIT:
        order = find_shape_order(rep.v, "strongly_convex")
    return FrickCheck(represents, order, threshold_monotonicity(rep))


# --- JSON ---
def rep_to_json(rep, labels):
    return {
        "v": rep.v.to_json(labels),
        "eps": {format_menu(labels, m): fmt_rational(e) for m, e in sorted(rep.eps.items())},
    }


def rep_from_json(obj, labels):
    if not isinstance(obj, dict) or "v" not in obj or "eps" not in obj:
        raise ValueError("representation JSON needs 'v' and 'eps' objects")
    v = Utility.from_mapping(obj["v"], labels)
    eps = {parse_menu(key, labels): parse_rational(value) for key, value in obj["eps"].items()}
    return ThresholdRep(v, eps)
