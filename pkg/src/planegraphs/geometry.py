"""Exact planar predicates and convex-position combinatorics.

Coordinates are :class:`fractions.Fraction` values; every predicate is decided
exactly.  A :class:`PointSet` is either a list of concrete points (``exact``
mode) or an abstract convex polygon on ``n`` vertices in cyclic index order
(``convex`` mode), where only the cyclic order matters.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import NamedTuple, Sequence

EXACT = "exact"
CONVEX = "convex"


class GeometryError(ValueError):
    """Raised for degenerate or malformed geometric input."""


class Point(NamedTuple):
    x: Fraction
    y: Fraction


def coord(value) -> Fraction:
    """Parse a coordinate: int, Fraction, or a ``"p/q"`` string.

    Floats are rejected so no rounding slips in unnoticed.
    """
    if isinstance(value, float):
        raise GeometryError(f"float coordinate {value!r}; use a rational")
    if isinstance(value, str) and "." in value:
        raise GeometryError(f"decimal coordinate {value!r}; use p/q")
    return Fraction(value)


def point(x, y) -> Point:
    return Point(coord(x), coord(y))


def orientation(p: Point, q: Point, r: Point) -> int:
    """Sign of the signed area of triangle ``pqr`` (+1 = counterclockwise)."""
    d = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)
    return (d > 0) - (d < 0)


def squared_distance(p: Point, q: Point) -> Fraction:
    return (p.x - q.x) ** 2 + (p.y - q.y) ** 2


def _orient_int(p, q, r) -> int:
    d = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    return (d > 0) - (d < 0)


def _open_segments_cross(p1, p2, q1, q2) -> bool:
    # Segments sharing an endpoint never cross; callers guarantee this.
    o1 = _orient_int(p1, p2, q1)
    o2 = _orient_int(p1, p2, q2)
    o3 = _orient_int(q1, q2, p1)
    o4 = _orient_int(q1, q2, p2)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    # Touching or overlapping counts as crossing.
    def on_seg(a, b, c):
        return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    if o1 == 0 and on_seg(p1, p2, q1):
        return True
    if o2 == 0 and on_seg(p1, p2, q2):
        return True
    if o3 == 0 and on_seg(q1, q2, p1):
        return True
    if o4 == 0 and on_seg(q1, q2, p2):
        return True
    return False


def interleaved(a: tuple[int, int], b: tuple[int, int]) -> bool:
    """True iff chords ``a`` and ``b`` of a convex polygon strictly interleave."""
    i, j = sorted(a)
    k, l = sorted(b)
    return (i < k < j < l) or (k < i < l < j)


def edge(i: int, j: int) -> tuple[int, int]:
    if i == j:
        raise GeometryError(f"degenerate edge ({i}, {j})")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class PointSet:
    """Points in the plane, or an abstract convex ``n``-gon.

    In exact mode the constructor validates general position and raises
    :class:`GeometryError` on a coincident pair or a collinear triple.
    """

    points: tuple[Point, ...] = ()
    mode: str = EXACT
    size: int | None = None
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.mode == EXACT:
            pts = tuple(p if isinstance(p, Point) else point(*p) for p in self.points)
            object.__setattr__(self, "points", pts)
            object.__setattr__(self, "size", len(pts))
            bad = validate_general_position(pts)
            if bad is not None:
                raise GeometryError(f"not in general position: {bad}")
        elif self.mode == CONVEX:
            if self.size is None or self.size < 1:
                raise GeometryError("convex mode needs a positive size")
            object.__setattr__(self, "points", ())
        else:
            raise GeometryError(f"unknown mode {self.mode!r}")

    @classmethod
    def convex(cls, n: int) -> "PointSet":
        return cls(mode=CONVEX, size=n)

    @classmethod
    def from_points(cls, pts: Sequence, **meta) -> "PointSet":
        return cls(points=tuple(point(*p) if not isinstance(p, Point) else p for p in pts), meta=meta)

    @property
    def n(self) -> int:
        return self.size

    @property
    def is_exact(self) -> bool:
        return self.mode == EXACT

    def __len__(self):
        return self.size

    @cached_property
    def int_coords(self) -> tuple[tuple[int, int], ...]:
        """Coordinates scaled by a common denominator to plain integers."""
        den = 1
        for p in self.points:
            den = math.lcm(den, p.x.denominator, p.y.denominator)
        return tuple((int(p.x * den), int(p.y * den)) for p in self.points)

    def candidate_edges(self) -> list[tuple[int, int]]:
        return list(combinations(range(self.size), 2))

    def to_json(self) -> dict:
        if self.mode == CONVEX:
            return {"mode": CONVEX, "n": self.size}
        out = {
            "mode": EXACT,
            "points": [{"x": _frac_str(p.x), "y": _frac_str(p.y)} for p in self.points],
        }
        if "regular" in self.meta:
            # tells weight computations to use exact regular-polygon chord lengths
            out["meta"] = {"regular": self.meta["regular"]}
        return out

    @classmethod
    def from_json(cls, data: dict | str) -> "PointSet":
        if isinstance(data, str):
            data = json.loads(data)
        mode = data.get("mode", EXACT)
        if mode == CONVEX:
            return cls.convex(int(data["n"]))
        if mode != EXACT:
            raise GeometryError(f"unknown mode {mode!r}")
        return cls.from_points([(p["x"], p["y"]) for p in data["points"]], **data.get("meta", {}))


def _frac_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def segments_cross(a: tuple[int, int], b: tuple[int, int], ps: PointSet) -> bool:
    """True iff the open segments ``a`` and ``b`` meet.

    Shared endpoints do not count; any other contact does.
    """
    a = edge(*a)
    b = edge(*b)
    if a == b:
        raise GeometryError("an edge is compared with itself")
    if set(a) & set(b):
        return False
    if ps.mode == CONVEX:
        return interleaved(a, b)
    c = ps.int_coords
    return _open_segments_cross(c[a[0]], c[a[1]], c[b[0]], c[b[1]])


def validate_general_position(ps):
    """Return ``None`` if ok, else the offending index tuple.

    Accepts a :class:`PointSet` or a raw sequence of points.  A coincident pair
    is reported as a 2-tuple, a collinear triple as a 3-tuple (the
    lexicographically first one found).
    """
    if isinstance(ps, PointSet):
        pts = ps.points
    else:
        pts = [p if isinstance(p, Point) else point(*p) for p in ps]
    seen = {}
    for i, p in enumerate(pts):
        if p in seen:
            return (seen[p], i)
        seen[p] = i
    for i, j, k in combinations(range(len(pts)), 3):
        if orientation(pts[i], pts[j], pts[k]) == 0:
            return (i, j, k)
    return None


def edge_span(n: int, e: tuple[int, int]) -> int:
    """Number of hull edges between the endpoints of chord ``e``, the short way round."""
    d = abs(e[0] - e[1]) % n
    return min(d, n - d)


def convex_hull(ps: PointSet) -> list[int]:
    """Counterclockwise hull indices, starting from the lowest-then-leftmost point."""
    if ps.mode == CONVEX:
        return list(range(ps.n))
    if ps.n < 3:
        raise GeometryError("convex hull needs at least 3 points")
    c = ps.int_coords
    order = sorted(range(ps.n), key=lambda i: (c[i][0], c[i][1]))

    def half(seq):
        out = []
        for i in seq:
            while len(out) >= 2 and _orient_int(c[out[-2]], c[out[-1]], c[i]) <= 0:
                out.pop()
            out.append(i)
        return out

    lower = half(order)
    upper = half(reversed(order))
    hull = lower[:-1] + upper[:-1]
    start = min(range(len(hull)), key=lambda t: (c[hull[t]][1], c[hull[t]][0]))
    return hull[start:] + hull[:start]


def in_convex_position(ps: PointSet) -> bool:
    return ps.mode == CONVEX or len(convex_hull(ps)) == ps.n


def canonical_cycle(seq: Sequence[int]) -> tuple[int, ...]:
    """Rotate/reflect a cyclic sequence so it starts at its minimum, then smaller neighbour."""
    seq = list(seq)
    m = seq.index(min(seq))
    rot = seq[m:] + seq[:m]
    rev = [rot[0]] + rot[1:][::-1]
    return tuple(min(rot, rev))


def same_cycle(a: Sequence[int], b: Sequence[int]) -> bool:
    return canonical_cycle(a) == canonical_cycle(b)
