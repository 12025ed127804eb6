"""Longest and shortest tours on points in convex position.

For odd ``n`` the longest tour is unique: it steps ``(n-1)/2`` positions
around the polygon at every move.  For even ``n = 2k`` it is one of ``k``
rotations of a fixed pattern built from chords of span ``k-1`` and two
diameters; each rotation differs from the first by a shift, so once the
total length of all span-``(k-1)`` chords is known every candidate costs
four edge lookups.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from itertools import combinations

import mpmath

from .enumeration import GraphClass
from .geometry import (
    CONVEX,
    GeometryError,
    Point,
    PointSet,
    canonical_cycle,
    edge_span,
    interleaved,
    orientation,
    segments_cross,
)
from .weighted import DEFAULT_DIGITS, DEFAULT_THETA, ALLOWED, MAX, edge_length, extremal_multiplicity


@dataclass(frozen=True)
class Tour:
    sequence: tuple[int, ...]
    weight: object
    spans: tuple[int, ...]

    def edges(self) -> list[tuple[int, int]]:
        s = self.sequence
        return [(s[i], s[(i + 1) % len(s)]) for i in range(len(s))]

    @property
    def canonical(self) -> tuple[int, ...]:
        return canonical_cycle(self.sequence)

    def to_json(self, digits: int = 40) -> dict:
        return {
            "sequence": list(self.sequence),
            "weight": mpmath.nstr(self.weight, digits),
            "spans": list(self.spans),
        }


def convex_order(ps: PointSet) -> list[int]:
    """Indices in counterclockwise order; raises if not in convex position.

    Sorting is by angle around the centroid using exact orientation tests.
    """
    n = ps.n
    if ps.mode == CONVEX:
        return list(range(n))
    if n < 3:
        return list(range(n))
    pts = ps.points
    cx = sum((p.x for p in pts), Fraction(0)) / n
    cy = sum((p.y for p in pts), Fraction(0)) / n
    c = Point(cx, cy)

    def half(p):
        # 0 for angles in [0, pi), 1 for [pi, 2 pi)
        return 0 if (p.y > cy or (p.y == cy and p.x > cx)) else 1

    def cmp(i, j):
        hi, hj = half(pts[i]), half(pts[j])
        if hi != hj:
            return hi - hj
        return -orientation(c, pts[i], pts[j])

    order = sorted(range(n), key=cmp_to_key(cmp))
    for t in range(n):
        if orientation(pts[order[t]], pts[order[(t + 1) % n]], pts[order[(t + 2) % n]]) <= 0:
            raise GeometryError("points are not in convex position")
    return order


def _make_tour(ps: PointSet, seq, digits) -> Tour:
    n = len(seq)
    with mpmath.workdps(digits + 10):
        w = mpmath.fsum(edge_length(ps, seq[i], seq[(i + 1) % n], digits)[1] for i in range(n))
    return Tour(tuple(seq), w, tuple(sorted(_spans(ps, seq))))


def _spans(ps, seq):
    order = convex_order(ps)
    rank = {v: t for t, v in enumerate(order)}
    n = len(seq)
    return [edge_span(n, (rank[seq[i]], rank[seq[(i + 1) % n]])) for i in range(n)]


def even_pattern(n: int) -> list[int]:
    """The first even-``n`` candidate, as positions along the polygon."""
    k = n // 2
    a = [(-(i - 1) * (k - 1)) % n for i in range(1, k + 1)]
    b = [(x + k) % n for x in a]
    return a[::-1] + b


def convex_tour_candidates(ps: PointSet, digits: int = DEFAULT_DIGITS) -> list[Tour]:
    """All candidate longest tours: one for odd ``n``, ``n/2`` for even ``n``."""
    n = ps.n
    if n < 3:
        raise GeometryError("a tour needs at least 3 points")
    order = convex_order(ps)

    def length(p, q):
        return edge_length(ps, order[p % n], order[q % n], digits)[1]

    if n % 2:
        step = (n - 1) // 2
        seq = [(t * step) % n for t in range(n)]
        return [_tour_from_positions(ps, order, seq, digits)]

    k = n // 2
    first = even_pattern(n)
    used = {frozenset((first[t], first[(t + 1) % n])) for t in range(n)}
    near = [frozenset((p, (p + k - 1) % n)) for p in range(n)]
    missing = [tuple(e) for e in near if e not in used]
    diameters = [tuple(e) for e in used if edge_span(n, tuple(e)) == k]
    if len(missing) != 2 or len(diameters) != 2:
        raise AssertionError("unexpected candidate structure")
    out = []
    with mpmath.workdps(digits + 10):
        total = mpmath.fsum(length(p, p + k - 1) for p in range(n))
        for s in range(k):
            w = total
            for p, q in missing:
                w -= length(p + s, q + s)
            for p, q in diameters:
                w += length(p + s, q + s)
            seq = tuple(order[(v + s) % n] for v in first)
            out.append(Tour(seq, w, tuple(sorted([k - 1] * (n - 2) + [k, k]))))
    return out


def _tour_from_positions(ps, order, positions, digits) -> Tour:
    seq = [order[p] for p in positions]
    return _make_tour(ps, seq, digits)


def longest_convex_tours(ps: PointSet, digits: int = DEFAULT_DIGITS, theta=None) -> list[Tour]:
    """Every candidate tour whose length ties the maximum within ``theta``."""
    theta = mpmath.mpf(theta) if theta is not None else DEFAULT_THETA
    cands = convex_tour_candidates(ps, digits)
    best = max(t.weight for t in cands)
    return [t for t in cands if abs(t.weight - best) <= theta * best]


def shortest_convex_tour(ps: PointSet, digits: int = DEFAULT_DIGITS) -> Tour:
    """The boundary of the convex hull."""
    if ps.n < 3:
        raise GeometryError("a tour needs at least 3 points")
    return _make_tour(ps, convex_order(ps), digits)


def is_thrackle(t: Tour, ps: PointSet) -> bool:
    """Every two tour edges either share an endpoint or cross."""
    edges = t.edges()
    for e, f in combinations(edges, 2):
        if set(e) & set(f):
            continue
        if not segments_cross(e, f, ps):
            return False
    return True


def brute_force_tours(ps: PointSet, objective: str = MAX) -> tuple[object, list[tuple[int, ...]]]:
    """Extremal length over all tours (crossings allowed) and the canonical extremal tours."""
    rep = extremal_multiplicity(ps, GraphClass.SPANNING_CYCLE, objective, ALLOWED, witnesses=10**9)
    return rep.weight, [canonical_cycle(g.cycle_order()) for g in rep.witnesses]


def antiparallel_pairs(seq, ps: PointSet) -> list:
    """Vertex-disjoint tour edge pairs ``x->y``, ``u->v`` where ``xu`` and ``yv`` cross."""
    order = convex_order(ps)
    rank = {v: t for t, v in enumerate(order)}
    n = len(seq)
    edges = [(rank[seq[i]], rank[seq[(i + 1) % n]]) for i in range(n)]
    out = []
    for (x, y), (u, v) in combinations(edges, 2):
        if len({x, y, u, v}) < 4:
            continue
        if interleaved((x, u), (y, v)):
            out.append(((x, y), (u, v)))
    return out


def min_span(seq, ps: PointSet) -> int:
    return min(_spans(ps, seq))
