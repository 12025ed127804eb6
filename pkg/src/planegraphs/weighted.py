"""Minimum and maximum weight graphs and how many of them there are.

Edge weights are Euclidean lengths evaluated with mpmath at a configurable
precision.  Each edge also carries an exact key (its squared length, or its
span on a regular polygon); two graphs whose key multisets agree are
provably of equal weight.  Graph weights closer than ``theta`` (relative)
are treated as equal, and a tie that cannot be proved by keys is reported as
a warning.
"""
from __future__ import annotations

import math
from functools import lru_cache
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import mpmath

from .constructions import chord_lengths, convex_polygon
from .enumeration import (
    EdgeGraph,
    _bits,
    GraphClass,
    _check,
    _engine,
    _walk,
    crossing_table,
    shards,
)
from .geometry import CONVEX, GeometryError, PointSet, edge_span, squared_distance

MAX = "max"
MIN = "min"
ALLOWED = "allowed"
FORBIDDEN = "forbidden"

DEFAULT_DIGITS = 50
DEFAULT_THETA = mpmath.mpf("1e-30")
# float prefilter: keep anything within this relative distance of the float optimum
_FLOAT_MARGIN = 1e-9


@lru_cache(maxsize=32)
def _chords(n: int, digits: int) -> tuple:
    return tuple(chord_lengths(n, digits))


def is_regular(ps: PointSet) -> bool:
    """True when edge lengths should come from the regular-polygon chord table."""
    return ps.mode == CONVEX or ps.meta.get("regular") == ps.n


def edge_length(ps: PointSet, i: int, j: int, digits: int = DEFAULT_DIGITS):
    """``(key, length)`` of segment ``ij``; the key is exact."""
    if is_regular(ps):
        s = edge_span(ps.n, (i, j))
        return s, _chords(ps.n, digits)[s]
    sq = squared_distance(ps.points[i], ps.points[j])
    with mpmath.workdps(digits + 10):
        return sq, mpmath.sqrt(mpmath.mpf(sq.numerator) / sq.denominator)


class WeightModel:
    """Edge weights for one point set.

    ``keys[e]`` is the exact class of edge ``e`` (a Fraction squared length,
    or an int span for a regular or abstract convex polygon).
    """

    def __init__(self, ps: PointSet, digits: int = DEFAULT_DIGITS, theta=None):
        if digits < DEFAULT_DIGITS:
            raise ValueError(f"precision must be at least {DEFAULT_DIGITS} digits")
        self.ps = ps
        self.digits = digits
        self.theta = mpmath.mpf(theta) if theta is not None else DEFAULT_THETA
        table = crossing_table(ps)
        self.edges = table.edges
        self.by_span = is_regular(ps)
        pairs = [edge_length(ps, i, j, digits) for i, j in self.edges]
        self.keys = [k for k, _ in pairs]
        self.weights = [w for _, w in pairs]
        self.floats = [float(w) for w in self.weights]

    def weight(self, mask: int):
        with mpmath.workdps(self.digits + 10):
            return mpmath.fsum(self.weights[b] for b in _bits(mask))

    def float_weight(self, mask: int) -> float:
        f = self.floats
        return sum(f[b] for b in _bits(mask))

    def key(self, mask: int) -> tuple:
        return tuple(sorted(Counter(self.keys[b] for b in _bits(mask)).items()))

    def equal(self, a, b) -> bool:
        scale = max(abs(a), abs(b))
        return abs(a - b) <= self.theta * scale

    def edge_weight(self, i: int, j: int):
        return self.weights[crossing_table(self.ps).eid(i, j)]


@dataclass
class ExtremalReport:
    weight: object
    multiplicity: int
    objective: str
    crossing_policy: str
    graph_class: str
    witnesses: list = field(default_factory=list)
    provable: bool = True
    warnings: list = field(default_factory=list)
    runner_up: object = None
    total: int = 0

    def to_json(self, digits: int = 40) -> dict:
        return {
            "class": self.graph_class,
            "objective": self.objective,
            "crossings": self.crossing_policy,
            "weight": mpmath.nstr(self.weight, digits),
            "multiplicity": self.multiplicity,
            "provable": self.provable,
            "graphs_examined": self.total,
            "runner_up": None if self.runner_up is None else mpmath.nstr(self.runner_up, digits),
            "warnings": list(self.warnings),
            "witnesses": [[list(e) for e in g.edges] for g in self.witnesses],
        }


def _scan(args):
    """Float pass over one shard: (graphs seen, best float, near-optimal masks)."""
    engine, item, floats, sign = args
    kind, state = item
    masks = [state] if kind == "leaf" else _walk(engine, state)
    best = -math.inf
    near = []
    seen = 0
    for mask in masks:
        seen += 1
        w = sign * sum(floats[b] for b in _bits(mask))
        if w > best:
            best = w
        if w >= _cutoff(best):
            near.append((w, mask))
            if len(near) > 4096:
                near = [t for t in near if t[0] >= _cutoff(best)]
    cut = _cutoff(best)
    return seen, best, [t for t in near if t[0] >= cut]


def _cutoff(best: float) -> float:
    return best - abs(best) * _FLOAT_MARGIN


def extremal_multiplicity(
    ps: PointSet,
    cls,
    objective: str = MAX,
    crossing_policy: str = FORBIDDEN,
    *,
    model: WeightModel | None = None,
    witnesses: int = 16,
    limit: int | None = None,
    workers: int = 1,
) -> ExtremalReport:
    """Weight of the heaviest (or lightest) graph of the class and how many attain it.

    With ``crossing_policy="allowed"`` every graph of the class is examined,
    crossing or not.  Cycles are undirected, so each tour counts once.
    """
    cls = GraphClass.parse(cls)
    if objective not in (MAX, MIN):
        raise ValueError(f"objective must be {MAX!r} or {MIN!r}")
    if crossing_policy not in (ALLOWED, FORBIDDEN):
        raise ValueError(f"crossing policy must be {ALLOWED!r} or {FORBIDDEN!r}")
    _check(ps, cls, limit)
    model = model or WeightModel(ps)
    sign = 1 if objective == MAX else -1
    crossing_ok = crossing_policy == ALLOWED

    if ps.n == 1:
        raise GeometryError("no graph of this class on a single point")
    engine = _engine(ps, cls, crossing_ok)
    if workers <= 1:
        results = [_scan((engine, ("state", engine.root()), model.floats, sign))]
    else:
        jobs = [(engine, item, model.floats, sign) for item in shards(engine, 4 * workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan, jobs))

    total = sum(r[0] for r in results)
    if total == 0:
        raise GeometryError(f"the point set has no {cls.value} graphs")
    best_float = max(r[1] for r in results)
    cut = _cutoff(best_float)
    near = sorted(m for r in results for w, m in r[2] if w >= cut)

    with mpmath.workdps(model.digits + 10):
        exact = [(model.weight(m), m) for m in near]
        pick = max if objective == MAX else min
        best = pick(w for w, _ in exact)
        group = [m for w, m in exact if model.equal(w, best)]
        others = [w for w, _ in exact if not model.equal(w, best)]
        runner = pick(others) if others else None

    keys = {model.key(m) for m in group}
    warnings = []
    provable = len(keys) == 1
    if not provable:
        warnings.append(
            f"{len(keys)} distinct edge-length multisets tie within theta; equality not proved"
        )
    if runner is not None and abs(runner - best) <= model.theta * 1e6 * abs(best):
        warnings.append("runner-up weight is within 1e6*theta of the optimum")

    table = crossing_table(ps)
    wit = [EdgeGraph.from_mask(ps.n, m, table) for m in group[:witnesses]]
    return ExtremalReport(
        weight=best,
        multiplicity=len(group),
        objective=objective,
        crossing_policy=crossing_policy,
        graph_class=cls.value,
        witnesses=wit,
        provable=provable,
        warnings=warnings,
        runner_up=runner,
        total=total,
    )


def all_extremal_masks(ps: PointSet, cls, objective=MAX, crossing_policy=FORBIDDEN, model=None) -> list[int]:
    """Every extremal graph as a mask (no witness cap)."""
    model = model or WeightModel(ps)
    rep = extremal_multiplicity(ps, cls, objective, crossing_policy, model=model, witnesses=10**9)
    return [g.mask for g in rep.witnesses]


def star_weight(n: int, p: int = 0, digits: int = DEFAULT_DIGITS):
    """Length of the star centred at vertex ``p`` of the regular ``n``-gon on the unit circle."""
    if n < 2:
        raise ValueError("need n >= 2")
    if not 0 <= p < n:
        raise ValueError(f"vertex {p} out of range")
    chords = _chords(n, digits)
    with mpmath.workdps(digits + 10):
        k = n // 2
        if n % 2:
            return 2 * mpmath.fsum(chords[1:k + 1])
        return 2 * mpmath.fsum(chords[1:k]) + chords[k]


def verify_lemma_L1(n: int, report: bool = False):
    """Longest non-crossing spanning tree on the regular ``n``-gon weighs as much as a star."""
    if not 3 <= n <= 9:
        raise ValueError("n must be in 3..9")
    rep = extremal_multiplicity(convex_polygon(n), GraphClass.SPANNING_TREE, MAX, FORBIDDEN)
    model_theta = DEFAULT_THETA
    s = star_weight(n)
    ok = abs(rep.weight - s) <= model_theta * s
    return (ok, rep) if report else ok


def span_profile_bound_check(tree: EdgeGraph, n: int) -> bool:
    """For each ``i``, at most ``n - 2i + 1`` tree edges have span at least ``i``."""
    spans = [edge_span(n, e) for e in tree.edges]
    for i in range(1, n // 2 + 1):
        if sum(1 for s in spans if s >= i) > n - 2 * i + 1:
            return False
    return True
