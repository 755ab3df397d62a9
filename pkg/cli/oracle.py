import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import permutations, product
from typing import Callable, Dict, List, Tuple

from pydantic import BaseModel

from cli.axioms import (
    first_linear_extension,
    holds,
    Relation,
    is_acyclic,
    maximal_choice,
    rationalizable_acyclic,
    revealed_relation,
)
from cli.core import (
    ChoiceDataset,
    ConsistencyError,
    PreconditionError,
    all_menus,
    members,
    serialize_dataset,
    submenus,
)
from cli.feasibility import (
    aligned_counterexample,
    alignment_constraints,
    fm_feasible,
    regularity_system,
    replay_certificate,
)
from cli.lam import (
    LAM,
    WeakOrder,
    agrees,
    enumerate_filters,
    enumerate_weak_orders,
    is_competition_filter,
    lam_choice,
    lam_overload,
    lam_to_json,
    misaligned_overload_utility,
    random_filter,
    representing_utility,
    trivial_lam,
)
from cli.luce import (
    Utility,
    all_aligned_regular,
    beta_counterexample,
    is_aligned,
    is_regular,
    logit,
    near_uniform_utility,
    power_utility,
    regular_for_all_utilities,
    uniform,
    witness_regular_logit,
)
from cli.represent import (
    concave_threshold_rep,
    corollary1_check,
    general_threshold_rep,
    lemma2_utility,
    shape_check,
    threshold_monotonicity,
    verify_threshold_rep,
)
from cli.welfare import detect_overload

# --- Setup ---
FULL_ENUMERATION_LIMIT = 4
EXHAUSTIVE_DEFAULT_LIMIT = 3
DEFAULT_SAMPLE_BUDGET = 100000
SAMPLE_CHUNK = 1000
SEED_STRIDE = 1_000_003
UTILITY_GRID = (1, 2, 3)
SHAPE_GRID = (1, 2, 3, 4)
LEMMA2_BASES = (2, 3, 4)
LEMMA2_MAX_N = 8
MAX_REJECTIONS_PER_SAMPLE = 1000

FILTERS = ("acyclic_R", "gtlm", "alpha", "path_independent", "binary_acyclic")


class TheoremId(str, Enum):
    T1 = "T1"
    T2 = "T2"
    T3 = "T3"
    T4 = "T4"
    P1_uniform = "P1_uniform"
    P2_shapes = "P2_shapes"
    P3_delta = "P3_delta"
    P4_lam = "P4_lam"
    P5_lam_overload = "P5_lam_overload"
    C1_thresholds = "C1_thresholds"
    L3_theta_local = "L3_theta_local"
    P6_partial_order = "P6_partial_order"
    PA_path_partial = "PA_path_partial"
    A3_quasi = "A3_quasi"


class VerificationReport(BaseModel):
    theorem: str
    universe_size: int
    mode: str
    seed: int
    instances_checked: int
    counterexamples: List[Dict[str, str]]
    elapsed: float


def default_labels(n):
    return tuple(f"x{i}" for i in range(1, n + 1))


# --- Universe filters ---
def _acyclic_r(c):
    return is_acyclic(revealed_relation(c, "R"))[0]


_FILTER_TESTS = {
    "acyclic_R": _acyclic_r,
    "gtlm": _acyclic_r,
    "alpha": lambda c: holds(c, "alpha"),
    "path_independent": lambda c: holds(c, "path_independence"),
    "binary_acyclic": lambda c: rationalizable_acyclic(c) is not None,
}


def _passes(c, filters):
    for name in filters or ():
        if name not in _FILTER_TESTS:
            raise ValueError(f"Unknown filter: {name}")
        if not _FILTER_TESTS[name](c):
            return False
    return True


# --- Enumeration ---
def correspondence_count(n):
    total = 1
    for menu in all_menus(n):
        total *= (1 << bin(menu).count("1")) - 1
    return total


def enumerate_correspondences(n, filters=None, grand_choice=None):
    """Every choice correspondence on n alternatives (n at most 4), grand menu varying slowest."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > FULL_ENUMERATION_LIMIT:
        raise PreconditionError("too_large", f"full enumeration is limited to {FULL_ENUMERATION_LIMIT} alternatives")
    labels = default_labels(n)
    menus = sorted(all_menus(n), key=lambda m: -m)
    options = [submenus(menu) for menu in menus]
    if grand_choice is not None:
        options[0] = [grand_choice]
    for combo in product(*options):
        table = [0] * (1 << n)
        for menu, chosen in zip(menus, combo):
            table[menu] = chosen
        c = ChoiceDataset.trusted(labels, table)
        if _passes(c, filters):
            yield c


# --- Sampling ---
def _random_any(rng, n, labels):
    def choose(menu):
        mask = members(menu)
        while True:
            chosen = sum(1 << x for x in mask if rng.random() < 0.5)
            if chosen:
                return chosen
    return ChoiceDataset.from_function(labels, choose, trusted=True)


def _random_threshold(rng, n, labels):
    v = rng.sample(range(1, n + 1), n)

    def choose(menu):
        eps = rng.randint(0, n - 1)
        top = max(v[x] for x in members(menu))
        return sum(1 << x for x in members(menu) if top - v[x] <= eps)
    return ChoiceDataset.from_function(labels, choose, trusted=True)


def _random_alpha(rng, n, labels):
    table = [0] * (1 << n)
    for menu in sorted(all_menus(n), key=lambda m: -bin(m).count("1")):
        forced = 0
        for w in range(n):
            if not menu >> w & 1:
                forced |= table[menu | 1 << w]
        forced &= menu
        extra = sum(1 << x for x in members(menu & ~forced) if rng.random() < 0.5)
        table[menu] = forced | extra or 1 << rng.choice(members(menu))
    return ChoiceDataset.trusted(labels, table)


def _random_union_of_orders(rng, n, labels):
    orders = [rng.sample(range(n), n) for _ in range(rng.randint(1, n))]

    def choose(menu):
        chosen = 0
        for order in orders:
            chosen |= 1 << next(x for x in order if menu >> x & 1)
        return chosen
    return ChoiceDataset.from_function(labels, choose, trusted=True)


def _random_dag(rng, n, labels):
    ranking = rng.sample(range(n), n)
    pairs = frozenset(
        (ranking[i], ranking[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.5
    )
    return maximal_choice(labels, Relation(n, pairs))


def _sampler_for(filters):
    filters = set(filters or ())
    if "binary_acyclic" in filters:
        return _random_dag
    if "path_independent" in filters:
        return _random_union_of_orders
    if filters & {"gtlm", "acyclic_R"}:
        return _random_threshold
    if "alpha" in filters:
        return _random_alpha
    return _random_any


def sample_correspondences(n, count, seed=0, filters=None):
    """Seeded random correspondences satisfying the filters, generated to fit them where possible."""
    rng = random.Random(seed)
    labels = default_labels(n)
    sampler = _sampler_for(filters)
    produced = attempts = 0
    while produced < count:
        attempts += 1
        if attempts > MAX_REJECTIONS_PER_SAMPLE * (produced + 1):
            raise ConsistencyError(f"sampler could not satisfy filters {filters}")
        c = sampler(rng, n, labels)
        if _passes(c, filters):
            produced += 1
            yield c


# --- Checkers ---
# Each check returns None when the instance agrees with the statement, else a reason.
def _check_t1(c):
    alpha, beta = holds(c, "alpha"), holds(c, "beta")
    if (alpha and beta) != regular_for_all_utilities(c):
        return "alpha and beta disagree with the exact all-utilities regularity test"
    if alpha and beta:
        n = c.n
        identity = tuple(range(n))
        for u in (Utility((1,) * n), power_utility(identity), power_utility(identity[::-1]),
                  near_uniform_utility(identity)):
            if not is_regular(logit(c, u)):
                return "alpha and beta hold but a grid utility is irregular"
    if not beta:
        u = beta_counterexample(c)
        if u is None or is_regular(logit(c, u)):
            return "beta fails but the constructed utility is regular"
    if not alpha and is_regular(uniform(c)):
        return "alpha fails but uniform Luce is regular"
    return None


def _check_t2(c):
    pi = holds(c, "path_independence")
    relation = revealed_relation(c, "R")
    system = regularity_system(c)
    system = system.with_constraints(alignment_constraints(c.n, relation))
    result = fm_feasible(system)
    if pi != result.feasible:
        return f"path independence is {pi} but aligned feasibility is {result.feasible}"
    if result.feasible:
        u = Utility(result.point)
        if not is_aligned(u, relation)[0] or not is_regular(logit(c, u)):
            return "feasible sample is not an aligned regular utility"
    elif not replay_certificate(system, result.certificate):
        return "infeasibility certificate does not replay"
    if (holds(c, "alpha") and holds(c, "outcast")) != pi:
        return "alpha and Outcast disagree with path independence"
    if pi != (witness_regular_logit(c) is not None):
        return "power utility witness disagrees with path independence"
    return None


def _check_t3(c):
    expected = holds(c, "alpha") and holds(c, "theta")
    ok, counter = all_aligned_regular(c)
    if ok != expected:
        return "closed-form route disagrees with alpha and theta"
    fm_counter = aligned_counterexample(c, revealed_relation(c, "R"))
    if expected != (fm_counter is None):
        return "elimination route disagrees with alpha and theta"
    return None


def _check_t4(c):
    alpha = holds(c, "alpha")
    order = first_linear_extension(revealed_relation(c, "R"))
    for u in (power_utility(order), near_uniform_utility(order)):
        if detect_overload(c, u, spot_checks=0).overload == alpha:
            return "overload does not coincide with failure of alpha"
    return None


def _check_p1(c):
    if (holds(c, "alpha") and holds(c, "theta")) != is_regular(uniform(c)):
        return "uniform Luce regularity disagrees with alpha and theta"
    return None


def _check_p2(c):
    order = first_linear_extension(revealed_relation(c, "R"))
    if not is_regular(logit(c, lemma2_utility(order, "convex", 0, 2))):
        return "convex utility along R is irregular on a path independent dataset"
    if not holds(c, "theta") and is_regular(logit(c, lemma2_utility(order, "concave", 2, 2))):
        return "theta fails but the concave utility along R is regular"
    return None


def _check_p3(c):
    alpha = holds(c, "alpha")
    rep = concave_threshold_rep(c)
    if alpha != (rep is not None):
        return "concave threshold representation exists iff alpha fails to match"
    order = first_linear_extension(revealed_relation(c, "R"))
    if rep is not None:
        if not verify_threshold_rep(c, rep)[0]:
            return "concave representation does not reproduce the dataset"
        if not shape_check(rep.v, order, "strongly_concave").holds:
            return "concave representation utility is not strongly concave"
        if threshold_monotonicity(rep) not in ("constant", "weakly_decreasing"):
            return "concave representation thresholds are not weakly decreasing"
        if not corollary1_check(c, rep).holds:
            return "concave representation breaks the threshold comparison rules"
    if detect_overload(c, power_utility(order), spot_checks=0).overload == alpha:
        return "overload under the power utility does not match failure of alpha"
    return None


def _check_c1(c):
    rep = general_threshold_rep(c)
    if rep is None:
        return "no general threshold representation under acyclic R"
    if not corollary1_check(c, rep).holds:
        return "general representation breaks the threshold comparison rules"
    concave = concave_threshold_rep(c)
    if concave is not None and not corollary1_check(c, concave).holds:
        return "concave representation breaks the threshold comparison rules"
    return None


def _check_l3(c):
    if holds(c, "theta") != holds(c, "theta_local"):
        return "theta disagrees with its one-element version under alpha"
    return None


def _check_p6(c):
    base = rationalizable_acyclic(c)
    theta = holds(c, "theta")
    counter = aligned_counterexample(c, base)
    if theta != (counter is None):
        return "theta disagrees with regularity over utilities aligned with the base relation"
    if not theta:
        u = near_uniform_utility(first_linear_extension(base))
        if not is_aligned(u, base)[0] or is_regular(logit(c, u)):
            return "theta fails but the near-uniform aligned utility is regular"
    return None


def _check_pa(c):
    base = rationalizable_acyclic(c)
    pi = holds(c, "path_independence")
    system = regularity_system(c).with_constraints(alignment_constraints(c.n, base))
    if pi != fm_feasible(system).feasible:
        return "path independence disagrees with aligned feasibility for the base relation"
    if pi and not is_regular(logit(c, power_utility(first_linear_extension(base)))):
        return "power utility along the base relation is irregular"
    return None


def _check_p4(c):
    alpha = holds(c, "alpha")
    if is_competition_filter(c.choices)[0] != alpha:
        return "competition filter property of c disagrees with alpha"
    model, reason = trivial_lam(c)
    if reason != "r_cyclic" and (model is not None) != alpha:
        return "trivial limited attention model existence disagrees with alpha"
    if model is not None and lam_choice(model).choices != c.choices:
        return "trivial limited attention model does not reproduce the dataset"
    return None


def _check_p5(instance):
    model, u = instance
    c = lam_choice(model)
    for menu in c.menus():
        if len({model.weak_order.rank[x] for x in members(c.chosen(menu))}) != 1:
            return "limited attention choice mixes indifference classes"
    alpha = holds(c, "alpha")
    if _acyclic_r(c) and not alpha:
        return "limited attention choice with acyclic R violates alpha"
    report = lam_overload(model, u)
    if report.overload and report.gtlm:
        return "overload inside the Luce model"
    strict = lam_overload(model, representing_utility(model), strict=True)
    if strict.overload == alpha:
        return "class-level overload disagrees with failure of alpha"
    w = misaligned_overload_utility(model)
    if w is not None:
        boosted = lam_overload(model, w)
        if not boosted.overload or boosted.gtlm:
            return "boosted utility does not produce overload outside the Luce model"
    return None


def _check_a3(instance):
    u, order = instance
    for strong, quasi in (("strongly_concave", "quasi_concave"), ("strongly_convex", "quasi_convex")):
        if shape_check(u, order, strong).holds and not shape_check(u, order, quasi).holds:
            return f"{strong} holds but {quasi} fails"
    return None


def _check_lemma2(instance):
    order, family, base = instance
    u = lemma2_utility(order, family, 2 if family == "concave" else 0, base)
    shape = "strongly_concave" if family == "concave" else "strongly_convex"
    if not shape_check(u, order, shape).holds:
        return f"{family} family with base {base} is not {shape}"
    return _check_a3((u, order))


# --- Universes of instances ---
def _lam_universe_full(n):
    labels = default_labels(n)
    filters = list(enumerate_filters(n))
    for weak_order in enumerate_weak_orders(n):
        for table in filters:
            model = LAM(labels, weak_order, table)
            for values in product(UTILITY_GRID, repeat=n):
                u = Utility(values)
                if agrees(u, weak_order):
                    yield model, u


def _lam_universe_sampled(n, count, seed):
    rng = random.Random(seed)
    labels = default_labels(n)
    for _ in range(count):
        weak_order = WeakOrder(tuple(rng.randint(0, n - 1) for _ in range(n)))
        model = LAM(labels, weak_order, random_filter(rng, n))
        levels = sorted(rng.sample(range(1, 4 * n + 1), max(weak_order.rank) + 1))
        jitter = [Fraction(rng.randint(0, 3), 8) for _ in range(n)]
        u = Utility(tuple(levels[r] + jitter[x] for x, r in enumerate(weak_order.rank)))
        yield model, u


def _shape_universe_full(n):
    for values in product(SHAPE_GRID, repeat=n):
        u = Utility(values)
        for order in permutations(range(n)):
            yield "shape", (u, order)
    yield from _lemma2_instances(n)


def _lemma2_instances(n):
    if n > LEMMA2_MAX_N:
        return
    for order in (tuple(range(n)), tuple(reversed(range(n)))):
        for family in ("concave", "convex"):
            for base in LEMMA2_BASES:
                yield "lemma2", (order, family, base)


def _shape_universe_sampled(n, count, seed, with_lemma2=True):
    rng = random.Random(seed)
    for _ in range(count):
        u = Utility(tuple(Fraction(rng.randint(1, 48), rng.randint(1, 4)) for _ in range(n)))
        yield "shape", (u, tuple(rng.sample(range(n), n)))
    if with_lemma2:
        yield from _lemma2_instances(n)


@dataclass(frozen=True)
class Checker:
    check: Callable
    filters: Tuple[str, ...] = ()
    universe: str = "datasets"


_CHECKERS = {
    TheoremId.T1: Checker(_check_t1),
    TheoremId.T2: Checker(_check_t2, ("gtlm",)),
    TheoremId.T3: Checker(_check_t3, ("gtlm",)),
    TheoremId.T4: Checker(_check_t4, ("gtlm",)),
    TheoremId.P1_uniform: Checker(_check_p1),
    TheoremId.P2_shapes: Checker(_check_p2, ("gtlm", "path_independent")),
    TheoremId.P3_delta: Checker(_check_p3, ("gtlm",)),
    TheoremId.P4_lam: Checker(_check_p4),
    TheoremId.P5_lam_overload: Checker(_check_p5, universe="lam"),
    TheoremId.C1_thresholds: Checker(_check_c1, ("gtlm",)),
    TheoremId.L3_theta_local: Checker(_check_l3, ("alpha",)),
    TheoremId.P6_partial_order: Checker(_check_p6, ("binary_acyclic",)),
    TheoremId.PA_path_partial: Checker(_check_pa, ("binary_acyclic",)),
    TheoremId.A3_quasi: Checker(_check_a3, universe="shapes"),
}


def _describe(instance):
    if isinstance(instance, ChoiceDataset):
        return serialize_dataset(instance)
    if isinstance(instance, tuple) and isinstance(instance[0], LAM):
        model, u = instance
        return json.dumps({"lam": lam_to_json(model), "utility": u.to_json(model.labels)}, ensure_ascii=False)
    return repr(instance)


def _run_check(checker, instance):
    try:
        if checker.universe == "shapes":
            kind, payload = instance
            reason = _check_lemma2(payload) if kind == "lemma2" else checker.check(payload)
            instance = payload
        else:
            reason = checker.check(instance)
    except (ConsistencyError, PreconditionError) as e:
        reason = f"{type(e).__name__}: {e}"
    if reason is None:
        return None
    return {"instance": _describe(instance), "reason": reason}


def _resolve(theorem):
    try:
        return TheoremId(theorem)
    except ValueError:
        raise PreconditionError("unknown_theorem", f"Unknown theorem id: {theorem}") from None


def _mode(checker, n, exhaustive):
    if n < 1:
        raise ValueError("n must be at least 1")
    if exhaustive and n > FULL_ENUMERATION_LIMIT:
        raise PreconditionError("too_large", f"exhaustive runs are limited to {FULL_ENUMERATION_LIMIT} alternatives")
    if n <= EXHAUSTIVE_DEFAULT_LIMIT:
        return "exhaustive"
    if exhaustive and checker.universe == "datasets":
        return "exhaustive"
    return "sampled"


def _full_universe(checker, n):
    if checker.universe == "lam":
        return _lam_universe_full(n)
    if checker.universe == "shapes":
        return _shape_universe_full(n)
    return enumerate_correspondences(n, checker.filters)


def _chunks(budget):
    """Split a sample budget into (index, count) pieces of at most SAMPLE_CHUNK."""
    return [(i, min(SAMPLE_CHUNK, budget - start)) for i, start in enumerate(range(0, budget, SAMPLE_CHUNK))]


def _chunk_seed(seed, index):
    return seed * SEED_STRIDE + index


def _sample_universe(checker, n, count, seed, index):
    chunk_seed = _chunk_seed(seed, index)
    if checker.universe == "lam":
        return _lam_universe_sampled(n, count, chunk_seed)
    if checker.universe == "shapes":
        return _shape_universe_sampled(n, count, chunk_seed, with_lemma2=index == 0)
    return sample_correspondences(n, count, chunk_seed, checker.filters)


def _check_all(checker, instances):
    checked = 0
    counterexamples = []
    for instance in instances:
        checked += 1
        found = _run_check(checker, instance)
        if found:
            counterexamples.append(found)
    return checked, counterexamples


def _verify_shard(theorem, n, grand_choice):
    checker = _CHECKERS[TheoremId(theorem)]
    return _check_all(checker, enumerate_correspondences(n, checker.filters, grand_choice))


def _verify_chunk(theorem, n, seed, index, count):
    checker = _CHECKERS[TheoremId(theorem)]
    return _check_all(checker, _sample_universe(checker, n, count, seed, index))


def verify_theorem(theorem, n, budget=None, seed=0, exhaustive=False, workers=1, verbose=False):
    """Check one statement over every (or a seeded sample of) instance on n alternatives.

    Sampled runs are cut into seeded chunks, so the result does not depend on `workers`.
    """
    tid = _resolve(theorem)
    checker = _CHECKERS[tid]
    start = time.perf_counter()
    mode = _mode(checker, n, exhaustive)
    budget = DEFAULT_SAMPLE_BUDGET if budget is None else budget
    if verbose:
        print(f"Checking {tid.value} on n={n} ({mode}) ...", file=sys.stderr)
    checked = 0
    counterexamples = []
    if mode == "sampled":
        chunks = _chunks(budget)
        if workers > 1 and len(chunks) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = pool.map(
                    _verify_chunk,
                    [tid.value] * len(chunks),
                    [n] * len(chunks),
                    [seed] * len(chunks),
                    [index for index, _ in chunks],
                    [count for _, count in chunks],
                )
                for chunk_checked, found in results:
                    checked += chunk_checked
                    counterexamples.extend(found)
        else:
            for index, count in chunks:
                chunk_checked, found = _verify_chunk(tid.value, n, seed, index, count)
                checked += chunk_checked
                counterexamples.extend(found)
                if verbose and index + 1 < len(chunks):
                    print(f"  {checked} instances checked, {len(counterexamples)} counterexamples so far", file=sys.stderr)
    elif workers > 1 and checker.universe == "datasets":
        shards = submenus((1 << n) - 1)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for shard_checked, found in pool.map(_verify_shard, [tid.value] * len(shards), [n] * len(shards), shards):
                checked += shard_checked
                counterexamples.extend(found)
    else:
        checked, counterexamples = _check_all(checker, _full_universe(checker, n))
    elapsed = time.perf_counter() - start
    if verbose:
        print(f"Checked {checked} instances, {len(counterexamples)} counterexamples.", file=sys.stderr)
    return VerificationReport(
        theorem=tid.value,
        universe_size=n,
        mode=mode,
        seed=seed,
        instances_checked=checked,
        counterexamples=counterexamples,
        elapsed=round(elapsed, 3),
    )
