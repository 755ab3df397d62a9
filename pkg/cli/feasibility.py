from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

from cli.axioms import first_linear_extension, is_acyclic, order_position, revealed_relation
from cli.core import (
    ConsistencyError,
    PreconditionError,
    fmt_rational,
    format_menu,
    members,
    proper_submenus,
    size,
)
from cli.luce import Utility, is_aligned, is_regular, logit

# --- Setup ---
FM_VARIABLE_LIMIT = 12

ZERO = Fraction(0)
ONE = Fraction(1)


# --- Linear systems ---
@dataclass(frozen=True)
class Constraint:
    """sum(coeffs[i] * x[i]) > rhs when strict, >= rhs otherwise."""

    coeffs: tuple
    strict: bool
    rhs: Fraction = ZERO

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(a) for a in self.coeffs))
        object.__setattr__(self, "rhs", Fraction(self.rhs))

    def lhs(self, point):
        return sum((a * v for a, v in zip(self.coeffs, point)), ZERO)

    def evaluate(self, point):
        value = self.lhs(point)
        return value > self.rhs if self.strict else value >= self.rhs

    def is_contradiction(self):
        if any(self.coeffs):
            return False
        return self.rhs > 0 or (self.strict and self.rhs >= 0)

    def to_json(self, variables):
        return {
            "coeffs": {v: fmt_rational(a) for v, a in zip(variables, self.coeffs) if a},
            "relation": ">" if self.strict else ">=",
            "rhs": fmt_rational(self.rhs),
        }


@dataclass(frozen=True)
class LinearSystem:
    variables: tuple
    constraints: tuple
    hard_failure: Optional[tuple] = None

    def __post_init__(self):
        for con in self.constraints:
            if len(con.coeffs) != len(self.variables):
                raise ValueError("constraint arity does not match the variable list")

    def with_constraints(self, extra):
        return LinearSystem(self.variables, self.constraints + tuple(extra), self.hard_failure)

    def is_satisfied_by(self, point):
        return all(con.evaluate(point) for con in self.constraints)

    def to_json(self, labels=None):
        out = {
            "variables": list(self.variables),
            "constraints": [con.to_json(self.variables) for con in self.constraints],
        }
        if self.hard_failure is not None and labels is not None:
            x, small, big = self.hard_failure
            out["hard_failure"] = {"x": labels[x], "A": format_menu(labels, small), "B": format_menu(labels, big)}
        return out


@dataclass(frozen=True)
class Certificate:
    """Nonnegative multipliers over the original constraints that sum to a contradiction."""

    eliminated: tuple
    multipliers: dict
    contradiction: Constraint

    def to_json(self):
        return {
            "eliminated": list(self.eliminated),
            "multipliers": {str(i): fmt_rational(m) for i, m in sorted(self.multipliers.items())},
            "contradiction": {
                "relation": ">" if self.contradiction.strict else ">=",
                "rhs": fmt_rational(self.contradiction.rhs),
            },
        }


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    sample: Optional[dict] = None
    certificate: Optional[Certificate] = None
    point: tuple = field(default=(), repr=False)

    def to_json(self):
        return {
            "feasible": self.feasible,
            "sample": {k: fmt_rational(v) for k, v in self.sample.items()} if self.sample else None,
            "certificate": self.certificate.to_json() if self.certificate else None,
        }


# --- Fourier-Motzkin ---
class _Row(NamedTuple):
    coeffs: tuple
    strict: bool
    rhs: Fraction
    mult: dict


def _normalize(row):
    scale = max(abs(a) for a in row.coeffs)
    if scale == 0 or scale == 1:
        return row
    return _Row(
        tuple(a / scale for a in row.coeffs),
        row.strict,
        row.rhs / scale,
        {i: m / scale for i, m in row.mult.items()},
    )


def _prune(rows):
    """Drop satisfied trivial rows and keep only the tightest row per direction."""
    best = {}
    contradictions = []
    for row in rows:
        if not any(row.coeffs):
            if row.rhs > 0 or (row.strict and row.rhs >= 0):
                contradictions.append(row)
            continue
        row = _normalize(row)
        kept = best.get(row.coeffs)
        if kept is None or row.rhs > kept.rhs or (row.rhs == kept.rhs and row.strict and not kept.strict):
            best[row.coeffs] = row
    return contradictions + list(best.values())


def _eliminate(rows, var):
    pos, neg, out = [], [], []
    for row in rows:
        a = row.coeffs[var]
        if a > 0:
            pos.append(row)
        elif a < 0:
            neg.append(row)
        else:
            out.append(row)
    for p in pos:
        a = p.coeffs[var]
        for q in neg:
            b = -q.coeffs[var]
            mult = {i: b * m for i, m in p.mult.items()}
            for i, m in q.mult.items():
                mult[i] = mult.get(i, ZERO) + a * m
            out.append(_Row(
                tuple(b * pc + a * qc for pc, qc in zip(p.coeffs, q.coeffs)),
                p.strict or q.strict,
                b * p.rhs + a * q.rhs,
                mult,
            ))
    return out


def _contradiction(rows):
    for row in rows:
        if not any(row.coeffs) and (row.rhs > 0 or (row.strict and row.rhs >= 0)):
            return row
    return None


def _pick_value(rows, var, point):
    lo = hi = None
    lo_strict = hi_strict = False
    for row in rows:
        a = row.coeffs[var]
        if a == 0:
            continue
        rest = sum((row.coeffs[j] * point[j] for j in range(len(point)) if j != var), ZERO)
        bound = (row.rhs - rest) / a
        if a > 0:
            if lo is None or bound > lo:
                lo, lo_strict = bound, row.strict
            elif bound == lo:
                lo_strict = lo_strict or row.strict
        else:
            if hi is None or bound < hi:
                hi, hi_strict = bound, row.strict
            elif bound == hi:
                hi_strict = hi_strict or row.strict
    if lo is not None and hi is not None:
        if lo == hi:
            return lo
        return (lo + hi) / 2
    if lo is not None:
        return lo + 1 if lo_strict else lo
    if hi is not None:
        return hi - 1 if hi_strict else hi
    return ZERO


def fm_feasible(system, variable_limit=FM_VARIABLE_LIMIT):
    """Decide feasibility exactly; return a verified sample point or a replayable certificate."""
    nvars = len(system.variables)
    if nvars > variable_limit:
        raise PreconditionError(
            "variable_limit", f"{nvars} variables exceed the elimination limit of {variable_limit}"
        )
    rows = _prune([
        _Row(con.coeffs, con.strict, con.rhs, {i: ONE}) for i, con in enumerate(system.constraints)
    ])
    stages = []
    remaining = set(range(nvars))
    while remaining and _contradiction(rows) is None:
        var = min(remaining, key=lambda j: (sum(1 for r in rows if r.coeffs[j]), j))
        stages.append((var, rows))
        rows = _prune(_eliminate(rows, var))
        remaining.discard(var)
    bad = _contradiction(rows)
    if bad is not None:
        certificate = Certificate(
            eliminated=tuple(system.variables[v] for v, _ in stages),
            multipliers={i: m for i, m in bad.mult.items() if m},
            contradiction=Constraint((ZERO,) * nvars, bad.strict, bad.rhs),
        )
        if not replay_certificate(system, certificate):
            raise ConsistencyError("infeasibility certificate does not replay")
        return FeasibilityResult(False, None, certificate)
    point = [ZERO] * nvars
    for var, stage_rows in reversed(stages):
        point[var] = _pick_value(stage_rows, var, point)
    if not system.is_satisfied_by(point):
        raise ConsistencyError("back-substituted point violates the system")
    return FeasibilityResult(True, dict(zip(system.variables, point)), None, tuple(point))


def replay_certificate(system, certificate):
    """True iff the multipliers combine the original constraints into 0 >= positive (or 0 > nonnegative)."""
    if any(m < 0 for m in certificate.multipliers.values()):
        return False
    nvars = len(system.variables)
    coeffs = [ZERO] * nvars
    rhs = ZERO
    strict = False
    for i, m in certificate.multipliers.items():
        if m == 0:
            continue
        con = system.constraints[i]
        for j in range(nvars):
            coeffs[j] += m * con.coeffs[j]
        rhs += m * con.rhs
        strict = strict or con.strict
    if any(coeffs):
        return False
    return rhs > 0 or (strict and rhs >= 0)


# --- Regularity systems ---
def _unit(n, i, scale=ONE):
    coeffs = [ZERO] * n
    coeffs[i] = scale
    return coeffs


def utility_variables(c):
    return tuple(f"u_{label}" for label in c.labels)


def positivity_constraints(n):
    return tuple(Constraint(_unit(n, i), True) for i in range(n))


def alignment_constraints(n, relation):
    out = []
    for x, y in relation:
        coeffs = [ZERO] * n
        coeffs[x] += 1
        coeffs[y] -= 1
        out.append(Constraint(coeffs, True))
    return tuple(out)


def _sum_difference(n, plus, minus):
    coeffs = [ZERO] * n
    for x in members(plus):
        coeffs[x] += 1
    for x in members(minus):
        coeffs[x] -= 1
    return coeffs


def regularity_system(c):
    """Linear constraints on u whose solutions are exactly the regular-inducing utilities."""
    c.require_total("regularity_system")
    n = c.n
    variables = utility_variables(c)
    constraints = []
    seen = set()
    for big in c.menus():
        cb = c.chosen(big)
        for small in proper_submenus(big):
            cs = c.chosen(small)
            hard = cb & small & ~cs
            if hard:
                x = members(hard)[0]
                return LinearSystem(variables, (Constraint((ZERO,) * n, False, ONE),), hard_failure=(x, small, big))
            if not cs & cb:
                continue
            coeffs = tuple(_sum_difference(n, cb, cs))
            if all(a >= 0 for a in coeffs) or coeffs in seen:
                continue
            seen.add(coeffs)
            constraints.append(Constraint(coeffs, False))
    return LinearSystem(variables, positivity_constraints(n) + tuple(constraints))


def aligned_counterexample(c, relation):
    """A utility aligned with `relation` whose logit is irregular, or None if none exists."""
    c.require_total("aligned_counterexample")
    n = c.n
    variables = utility_variables(c)
    base = LinearSystem(variables, positivity_constraints(n) + alignment_constraints(n, relation))
    for big in c.menus():
        cb = c.chosen(big)
        for small in proper_submenus(big):
            cs = c.chosen(small)
            if cb & small & ~cs:
                result = fm_feasible(base)
                return Utility(result.point) if result.feasible else None
            if not cs & cb:
                continue
            coeffs = _sum_difference(n, cs, cb)
            if all(a <= 0 for a in coeffs):
                continue
            result = fm_feasible(base.with_constraints((Constraint(coeffs, True),)))
            if result.feasible:
                u = Utility(result.point)
                if not is_aligned(u, relation)[0] or is_regular(logit(c, u)):
                    raise ConsistencyError("aligned counterexample failed to break regularity")
                return u
    return None


# --- Threshold systems ---
def semiorder_rep_system(c, order=None):
    """Constraints on (v, eps) for a constant-threshold representation of c.

    `order` (worst first) fixes which chosen alternative tops each menu; v is
    required to be weakly increasing along it. It defaults to the first linear
    extension of R. Every representation satisfies the system for some
    extension of R, and chosen-over-rejected pairs are always strict in v.
    """
    c.require_total("semiorder_rep_system")
    n = c.n
    variables = tuple(f"v_{label}" for label in c.labels) + ("eps",)
    e = n
    relation = revealed_relation(c, "R")
    if order is None:
        order = first_linear_extension(relation) if is_acyclic(relation)[0] else tuple(range(n))
    position = order_position(order)
    constraints = [Constraint(_unit(n + 1, e), False)]
    seen = set()

    def add(coeffs, strict):
        key = (tuple(coeffs), strict)
        if key not in seen:
            seen.add(key)
            constraints.append(Constraint(coeffs, strict))

    for x, y in relation:
        coeffs = [ZERO] * (n + 1)
        coeffs[x] += 1
        coeffs[y] -= 1
        add(coeffs, True)
    for low, high in zip(order, order[1:]):
        coeffs = [ZERO] * (n + 1)
        coeffs[high] += 1
        coeffs[low] -= 1
        add(coeffs, False)
    for menu in c.menus():
        if size(menu) < 2:
            continue
        chosen = c.chosen(menu)
        for x in members(chosen):
            for y in members(menu):
                if y == x:
                    continue
                # v_y - v_x <= eps
                coeffs = [ZERO] * (n + 1)
                coeffs[e] += 1
                coeffs[x] += 1
                coeffs[y] -= 1
                add(coeffs, False)
        star = max(members(chosen), key=lambda x: position[x])
        for x in members(menu & ~chosen):
            # v_star - v_x > eps
            coeffs = [ZERO] * (n + 1)
            coeffs[star] += 1
            coeffs[x] -= 1
            coeffs[e] -= 1
            add(coeffs, True)
    return LinearSystem(variables, tuple(constraints))
