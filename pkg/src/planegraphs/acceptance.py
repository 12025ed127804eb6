"""Acceptance checks shared by the ``verify`` command and the test suite.

Each check returns a :class:`Check` carrying the observed and expected
values, so a failure says exactly what was off.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import mpmath

from . import bounds
from .constructions import (
    convex_polygon,
    deltoid_tour_gadget,
    double_chain,
    perturbed_convex_polygon,
    random_point_set,
    rotated_triangle_gadget,
    s4_matching_gadget,
)
from .convex_tour import brute_force_tours, is_thrackle, longest_convex_tours, min_span, shortest_convex_tour
from .enumeration import (
    GraphClass,
    catalan,
    count,
    crossing_table,
    enumerate_graphs,
    middle_region_polygon,
    middle_region_triangulation_count,
    noncrossing_tree_count,
    polygon_triangulation_count,
    support_table,
)
from .geometry import PointSet, canonical_cycle, interleaved
from .weighted import FORBIDDEN, ALLOWED, MAX, MIN, extremal_multiplicity, span_profile_bound_check, star_weight


@dataclass
class Check:
    criterion: int
    name: str
    passed: bool
    observed: object
    expected: object
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.criterion:>2} {self.name}: observed {self.observed}; expected {self.expected} ({self.seconds:.2f}s)"

    def to_json(self) -> dict:
        return {
            "criterion": self.criterion,
            "name": self.name,
            "passed": self.passed,
            "observed": _plain(self.observed),
            "expected": _plain(self.expected),
        }


def _plain(v):
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (bool, int, float, str)) or v is None:
        return v
    return str(v)


def _timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


def brute_force_noncrossing_trees(n: int) -> int:
    """Labelled trees from Pruefer sequences, filtered by chord interleaving."""
    from itertools import product

    if n <= 2:
        return 1
    total = 0
    for seq in product(range(n), repeat=n - 2):
        deg = [1] * n
        for v in seq:
            deg[v] += 1
        edges = []
        for v in seq:
            leaf = min(u for u in range(n) if deg[u] == 1)
            edges.append((leaf, v))
            deg[leaf] -= 1
            deg[v] -= 1
        u, w = [x for x in range(n) if deg[x] == 1]
        edges.append((u, w))
        if not any(interleaved(a, b) for a, b in combinations(edges, 2) if not set(a) & set(b)):
            total += 1
    return total


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

def check_catalan() -> list[Check]:
    def run():
        return {n: count(PointSet.convex(n), GraphClass.TRIANGULATION) for n in range(3, 13)}

    got, sec = _timed(run)
    want = {n: catalan(n - 2) for n in range(3, 13)}
    return [Check(1, "triangulations of convex n = Catalan(n-2), n=3..12, under 10 s", got == want and sec < 10, got, want, sec)]


def check_tree_oracle() -> list[Check]:
    got, sec = _timed(lambda: {n: count(PointSet.convex(n), GraphClass.SPANNING_TREE) for n in range(3, 10)})
    want = {n: noncrossing_tree_count(n) for n in range(3, 10)}
    brute, sec2 = _timed(lambda: {n: brute_force_noncrossing_trees(n) for n in range(3, 8)})
    return [
        Check(2, "non-crossing spanning trees of convex n, n=3..9", got == want, got, want, sec),
        Check(2, "labelled-tree brute force agrees, n=3..7", brute == {n: want[n] for n in range(3, 8)},
              brute, {n: want[n] for n in range(3, 8)}, sec2),
    ]


def check_middle_region() -> list[Check]:
    def run():
        out = {}
        for m in (3, 4, 5):
            ps = double_chain(2 * m)
            region = polygon_triangulation_count(ps, middle_region_polygon(ps))
            # whole-set triangulations factor as middle region times the two chain pockets
            whole = count(ps, GraphClass.TRIANGULATION)
            out[m] = (region, whole // catalan(m - 2) ** 2, whole % catalan(m - 2) ** 2)
        return out

    got, sec = _timed(run)
    want = {m: (middle_region_triangulation_count(m), middle_region_triangulation_count(m), 0) for m in (3, 4, 5)}
    return [Check(3, "middle-region triangulations of D(2m), m=3,4,5 (region DP, full enumeration / pockets)",
                  got == want, got, want, sec)]


def check_support_identity(sets: int = 20, n: int = 7, seed: int = 7) -> list[Check]:
    rng = random.Random(seed)

    def run():
        bad = []
        for t in range(sets):
            ps = random_point_set(n, rng)
            lhs = support_table(ps).weighted_sum()
            rhs = count(ps, GraphClass.SPANNING_CYCLE)
            if lhs != Fraction(rhs):
                bad.append((t, str(lhs), rhs))
        return bad

    bad, sec = _timed(run)
    return [Check(4, f"support identity on {sets} random {n}-point sets, under 60 s", not bad and sec < 60,
                  f"{len(bad)} mismatches", "0 mismatches", sec)]


def truncated_distance(value: float, shown: str) -> float:
    """Distance from ``value`` to the numbers whose decimal expansion starts with ``shown``."""
    lo = float(shown)
    digits = len(shown.split(".")[1]) if "." in shown else 0
    hi = lo + 10.0 ** -digits
    if value < lo:
        return lo - value
    return max(0.0, value - hi)


def check_tri_constants() -> list[Check]:
    out = []
    for k in range(1, 5):
        v = bounds.tri_lower_objective(k, bounds.PUBLISHED_TRI[k])
        shown = bounds.PUBLISHED_TRI_SHOWN[k]
        gap = truncated_distance(v, shown)
        out.append(Check(5, f"triangulation base k={k} at published parameters", gap <= 5e-4,
                         round(v, 6), f"{shown}... +- 5e-4"))
    rep, sec = _timed(lambda: bounds.optimize("tri", 3, restarts=4, seed=0))
    out.append(Check(5, "optimised triangulation base k=3", rep.base >= 8.650, round(rep.base, 6), ">= 8.650", sec))
    return out


def check_tree_forest_constants() -> list[Check]:
    out = []
    for z in (1, 2, 3, 4):
        v = bounds.st_lower_objective(bounds.PUBLISHED_ST[z])
        want = bounds.PUBLISHED_ST_BASE[z]
        out.append(Check(6, f"spanning-tree base z={z} at published parameters", abs(v - want) <= 1e-2,
                         round(v, 4), f"{want} +- 1e-2"))
    for z in (1, 2, 3, 4):
        rep, sec = _timed(lambda: bounds.optimize("cf", z, restarts=4, seed=0))
        want = bounds.PUBLISHED_CF_BASE[z]
        at_pub = bounds.cf_lower_objective(bounds.PUBLISHED_CF[z]) if z in bounds.PUBLISHED_CF else None
        obs = round(rep.base, 4) if at_pub is None else f"{rep.base:.4f} (at published parameters {at_pub:.4f})"
        out.append(Check(6, f"forest base z={z}, maximised from the published parameters",
                         abs(rep.base - want) <= 1e-2, obs, f"{want} +- 1e-2", sec))
    regress = []
    for name, table in (("st", bounds.PUBLISHED_ST), ("cf", bounds.PUBLISHED_CF)):
        f = bounds.st_lower_objective if name == "st" else bounds.cf_lower_objective
        for z in table:
            rep = bounds.optimize(name, z, restarts=1, seed=0)
            if rep.base < f(table[z]) - 1e-12:
                regress.append((name, z))
    out.append(Check(6, "optimiser never ends below a published starting table", not regress, regress, []))
    return out


def check_sc_bound() -> list[Check]:
    sc, sec = _timed(bounds.sc_upper_minimize)
    return [
        Check(7, "minimising threshold a", 0.4664 <= sc.a <= 0.4674, round(sc.a, 6), "[0.4664, 0.4674]", sec),
        Check(7, "per-point factor", abs(sc.factor - 2.28728) <= 1e-3, round(sc.factor, 6), "2.28728 +- 1e-3"),
        Check(7, "30 x factor, under 1 s", sc.base <= 68.62 and sec < 1, round(sc.base, 4), "<= 68.62", sec),
    ]


def check_weighted() -> list[Check]:
    out = []
    rep, sec = _timed(lambda: extremal_multiplicity(s4_matching_gadget(8), GraphClass.PERFECT_MATCHING, MAX, FORBIDDEN))
    out.append(Check(8, "longest non-crossing perfect matchings on the 8-point gadget", rep.multiplicity == 4,
                     rep.multiplicity, 4, sec))
    rep, sec = _timed(lambda: extremal_multiplicity(rotated_triangle_gadget(9), GraphClass.SPANNING_CYCLE, MIN, ALLOWED))
    out.append(Check(8, "shortest tours over all tours on 9 rotated-triangle points, under 60 s",
                     rep.multiplicity == 8 and sec < 60, rep.multiplicity, 8, sec))
    rep, sec = _timed(lambda: extremal_multiplicity(deltoid_tour_gadget(2), GraphClass.SPANNING_CYCLE, MAX, FORBIDDEN))
    out.append(Check(8, "longest non-crossing tours on the k=2 deltoid gadget", rep.multiplicity == 4,
                     rep.multiplicity, 4, sec))
    rep, sec = _timed(lambda: extremal_multiplicity(convex_polygon(6), GraphClass.SPANNING_TREE, MAX, FORBIDDEN))
    star = star_weight(6)
    ok = abs(rep.weight - star) <= mpmath.mpf("1e-30") * star and rep.multiplicity >= 16
    out.append(Check(8, "longest non-crossing spanning tree on the regular hexagon", ok,
                     f"weight {mpmath.nstr(rep.weight, 15)}, multiplicity {rep.multiplicity}",
                     f"star weight {mpmath.nstr(star, 15)}, multiplicity >= 16", sec))

    def shortest():
        rng = random.Random(11)
        res = []
        for t in range(10):
            ps = perturbed_convex_polygon(5 + t % 5, rng)
            r = extremal_multiplicity(ps, GraphClass.SPANNING_CYCLE, MIN, ALLOWED)
            hull = shortest_convex_tour(ps)
            res.append(r.multiplicity == 1 and canonical_cycle(r.witnesses[0].cycle_order()) == hull.canonical)
        return res

    res, sec = _timed(shortest)
    out.append(Check(8, "unique shortest tour (the hull) on 10 random convex sets", all(res),
                     f"{sum(res)}/10", "10/10", sec))
    return out


_BRUTE: dict = {}


def _brute_longest(ps, key):
    if key not in _BRUTE:
        _BRUTE[key] = brute_force_tours(ps, MAX)
    return _BRUTE[key]


def random_convex_cases(count_: int = 20, seed: int = 5):
    rng = random.Random(seed)
    return [(("random", seed, t), perturbed_convex_polygon(4 + t % 7, rng)) for t in range(count_)]


def check_convex_tours() -> list[Check]:
    out = []

    def regular(n):
        ps = convex_polygon(n)
        tours = longest_convex_tours(ps)
        w, brute = _brute_longest(ps, ("regular", n))
        return ps, tours, w, brute

    (ps, tours, w, brute), sec = _timed(lambda: regular(7))
    ok = len(tours) == 1 and is_thrackle(tours[0], ps) and [tours[0].canonical] == brute
    out.append(Check(9, "regular 7-gon: one longest tour, a thrackle, equal to brute force", ok,
                     f"{len(tours)} tour(s), thrackle={is_thrackle(tours[0], ps)}, brute force {len(brute)}",
                     "1 tour, thrackle=True, brute force 1", sec))
    (ps, tours, w, brute), sec = _timed(lambda: regular(10))
    ok = len(tours) == 5 and sorted(t.canonical for t in tours) == sorted(brute)
    out.append(Check(9, "regular 10-gon: the five longest tours equal the brute-force maxima", ok,
                     f"{len(tours)} tours, brute force {len(brute)}", "5 and 5", sec))

    def randoms():
        bad = []
        for key, ps in random_convex_cases():
            w, _ = _brute_longest(ps, key)
            got = longest_convex_tours(ps)[0].weight
            if abs(got - w) > mpmath.mpf("1e-30") * w:
                bad.append(key)
        return bad

    bad, sec = _timed(randoms)
    out.append(Check(9, "algorithm weight equals exhaustive maximum on 20 random convex polygons, n <= 10",
                     not bad, f"{20 - len(bad)}/20", "20/20", sec))
    return out


def check_properties() -> list[Check]:
    out = []
    ps = PointSet.convex(8)

    def spans():
        return [span_profile_bound_check(t, 8) for t in enumerate_graphs(ps, GraphClass.SPANNING_TREE)]

    res, sec = _timed(spans)
    out.append(Check(10, "span profile bound on every non-crossing spanning tree of convex 8", all(res),
                     f"{sum(res)}/{len(res)}", f"{len(res)}/{len(res)}", sec))

    def shortest_plane():
        rng = random.Random(13)
        bad = 0
        for t in range(20):
            q = random_point_set(5 + t % 5, rng)
            r = extremal_multiplicity(q, GraphClass.SPANNING_CYCLE, MIN, ALLOWED, witnesses=10**6)
            table = crossing_table(q)
            bad += sum(1 for g in r.witnesses if not table.is_plane(g.mask))
        return bad

    bad, sec = _timed(shortest_plane)
    out.append(Check(10, "shortest tours over all tours are crossing-free, 20 random sets, n <= 9", bad == 0,
                     f"{bad} crossing witnesses", "0", sec))

    def span_bound():
        bad = []
        cases = [(("regular", n), convex_polygon(n)) for n in range(3, 11)] + random_convex_cases()
        for key, q in cases:
            _, tours = _brute_longest(q, key)
            need = -(-q.n // 2) - 1
            for t in tours:
                if min_span(t, q) < need:
                    bad.append((key, t))
        return bad, len(cases)

    (bad, n_cases), sec = _timed(span_bound)
    out.append(Check(10, f"every brute-force longest convex tour has span >= ceil(n/2)-1 ({n_cases} sets, n <= 10)",
                     not bad, f"{len(bad)} violations", "0", sec))
    return out


CRITERIA = {
    1: check_catalan,
    2: check_tree_oracle,
    3: check_middle_region,
    4: check_support_identity,
    5: check_tri_constants,
    6: check_tree_forest_constants,
    7: check_sc_bound,
    8: check_weighted,
    9: check_convex_tours,
    10: check_properties,
}

SUITES = {
    "counts": [1, 2, 3, 4],
    "paper-constants": [5, 6, 7],
    "weighted": [8, 9, 10],
    "all": list(CRITERIA),
}


def run_suite(name: str = "all") -> list[Check]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    out = []
    for c in SUITES[name]:
        out.extend(CRITERIA[c]())
    return out
