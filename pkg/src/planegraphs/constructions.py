"""Point configurations behind the extremal lower-bound constructions.

Every generator returns an exact-mode :class:`PointSet` whose ``meta`` records
the construction parameters plus whatever structure later checks need (chain
membership, hull labels, vertex names).  Each generator validates the strict
inequalities its configuration relies on and raises
:class:`ConstructionError` naming the failed condition.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .geometry import (
    GeometryError,
    Point,
    PointSet,
    _open_segments_cross,
    _orient_int,
    convex_hull,
    orientation,
    squared_distance,
    validate_general_position,
)

# Exhaustive visibility checks are quadratic-times-linear; skip above this size.
VISIBILITY_CHECK_LIMIT = 40


class ConstructionError(GeometryError):
    pass


@dataclass(frozen=True)
class ChainSpec:
    r: int
    k: int
    flatness: Fraction | None = None

    def __post_init__(self):
        if self.r < 1 or self.k < 0:
            raise ConstructionError(f"need r >= 1 and k >= 0, got r={self.r}, k={self.k}")

    @property
    def size(self) -> int:
        return self.r * (self.k + 1) + 1


def _rat(x: float, limit: int = 10**12) -> Fraction:
    return Fraction(x).limit_denominator(limit)


def _build(points, meta) -> PointSet:
    bad = validate_general_position(points)
    if bad is not None:
        raise ConstructionError(f"{meta.get('kind')}: not in general position at {bad}")
    return PointSet(points=tuple(points), meta=meta)


# ---------------------------------------------------------------------------
# Almost convex chains and generalized double chains
# ---------------------------------------------------------------------------

HULL_CURVATURE = Fraction(1, 4)


def _chain_coords(spec: ChainSpec) -> tuple[list[Point], list[tuple[int, int]]]:
    """Vertices of an almost convex chain, left to right, plus reflex groups.

    Hull vertices sit on the convex arc ``y = c (x - 1/2)^2`` over ``[0, 1]``;
    each reflex chain bulges upward by ``flatness`` (at most) above its chord.
    A group ``(s, e)`` lists the index range of a hull edge's replacement,
    endpoints included.
    """
    r, k = spec.r, spec.k
    depth = spec.flatness if spec.flatness is not None else default_flatness(spec)
    if depth <= 0:
        raise ConstructionError("flatness must be positive")
    half = Fraction(1, 2)

    def hull_y(x):
        return HULL_CURVATURE * (x - half) ** 2

    pts = []
    groups = []
    for j in range(r):
        x0, x1 = Fraction(j, r), Fraction(j + 1, r)
        y0, y1 = hull_y(x0), hull_y(x1)
        start = len(pts)
        if j == 0:
            pts.append(Point(x0, y0))
        else:
            start -= 1
        for i in range(1, k + 1):
            t = Fraction(i, k + 1)
            pts.append(Point(x0 + t * (x1 - x0), y0 + t * (y1 - y0) + 4 * depth * t * (1 - t)))
        pts.append(Point(x1, y1))
        groups.append((start, len(pts) - 1))
    return pts, groups


def default_flatness(spec: ChainSpec) -> Fraction:
    return Fraction(1, 4 * spec.size**3)


def chain_visibility_violations(pts, groups) -> list[tuple[int, int]]:
    """Pairs that should see each other above the chain but do not.

    Two vertices in the same group (same reflex chain, endpoints included) are
    exempt.  Otherwise every vertex strictly between them must lie strictly
    below their segment.
    """
    ints = PointSet(points=tuple(pts)).int_coords
    member = [set() for _ in pts]
    for g, (s, e) in enumerate(groups):
        for v in range(s, e + 1):
            member[v].add(g)
    bad = []
    n = len(pts)
    for u in range(n):
        for v in range(u + 2, n):
            if member[u] & member[v]:
                continue
            for w in range(u + 1, v):
                # below the segment u->v means clockwise turn
                if _orient_int(ints[u], ints[v], ints[w]) >= 0:
                    bad.append((u, v))
                    break
    return bad


def almost_convex_chain(spec: ChainSpec) -> PointSet:
    """x-monotone almost convex chain with ``r(k+1)+1`` vertices."""
    pts, groups = _chain_coords(spec)
    meta = {
        "kind": "almost-convex-chain",
        "r": spec.r,
        "k": spec.k,
        "flatness": str(spec.flatness or default_flatness(spec)),
        "groups": groups,
        "hull_vertices": [s for s, _ in groups] + [groups[-1][1]],
    }
    ps = _build(pts, meta)
    if ps.n <= VISIBILITY_CHECK_LIMIT:
        bad = chain_visibility_violations(pts, groups)
        if bad:
            raise ConstructionError(f"flatness too large: pair {bad[0]} is not visible above the chain")
        meta["visibility_checked"] = True
    return ps


def mutual_visibility_violations(ps: PointSet, lower: list[int], upper: list[int]) -> list[tuple[int, int]]:
    """Pairs ``(p, q)``, ``p`` in ``lower``, ``q`` in ``upper``, whose segment crosses a chain."""
    c = ps.int_coords
    chain_edges = list(zip(lower, lower[1:])) + list(zip(upper, upper[1:]))
    bad = []
    for p in lower:
        for q in upper:
            for a, b in chain_edges:
                if {a, b} & {p, q}:
                    continue
                if _open_segments_cross(c[p], c[q], c[a], c[b]):
                    bad.append((p, q))
                    break
    return bad


def generalized_double_chain(spec: ChainSpec) -> PointSet:
    """Two mirrored almost convex chains facing each other.

    Indices ``0..m-1`` are the lower chain ``L`` left to right, ``m..2m-1`` the
    upper chain ``U`` left to right.
    """
    pts, groups = _chain_coords(spec)
    m = len(pts)
    upper = [Point(p.x, 1 + p.y) for p in pts]
    lower = [Point(p.x, -1 - p.y) for p in pts]
    meta = {
        "kind": "double-chain",
        "r": spec.r,
        "k": spec.k,
        "m": m,
        "flatness": str(spec.flatness or default_flatness(spec)),
        "lower": list(range(m)),
        "upper": list(range(m, 2 * m)),
        "groups": groups,
    }
    ps = _build(lower + upper, meta)
    if ps.n <= VISIBILITY_CHECK_LIMIT:
        bad = mutual_visibility_violations(ps, meta["lower"], meta["upper"])
        if bad:
            raise ConstructionError(f"chains not mutually visible: pair {bad[0]}")
        # lower chain is the mirror image, so one chain check covers both
        bad = chain_visibility_violations(pts, groups)
        if bad:
            raise ConstructionError(f"flatness too large: pair {bad[0]} is not visible")
        meta["visibility_checked"] = True
    return ps


def double_chain(n: int) -> PointSet:
    """The classic double chain ``D(n, 0^r)`` with ``n/2`` points per chain."""
    if n < 4 or n % 2:
        raise ConstructionError("double chain needs an even n >= 4")
    return generalized_double_chain(ChainSpec(r=n // 2 - 1, k=0))


def two_chains(i: int, j: int) -> PointSet:
    """Flat mutually visible chains with ``i`` lower and ``j`` upper points.

    Used for bridge counting; lower indices come first.
    """
    def chain(m, sign):
        if m == 1:
            return [Point(Fraction(1, 2), sign * Fraction(1))]
        return [
            Point(Fraction(t, m - 1), sign * (1 + HULL_CURVATURE * (Fraction(t, m - 1) - Fraction(1, 2)) ** 2))
            for t in range(m)
        ]

    lower = chain(i, -1)
    upper = chain(j, 1)
    # the mirror symmetry can line up points when i == j; shear the top row
    upper = [Point(p.x + Fraction(1, 7 * (i + j) ** 2), p.y) for p in upper]
    meta = {"kind": "two-chains", "lower": list(range(i)), "upper": list(range(i, i + j))}
    return _build(lower + upper, meta)


# ---------------------------------------------------------------------------
# Longest perfect matchings
# ---------------------------------------------------------------------------

def s4_matching_gadget(n: int) -> PointSet:
    """Stacked copies of the four-point gadget with two longest matchings each.

    Copy ``t`` occupies indices ``4t..4t+3`` as ``a, b, c, d``: ``ab`` is a
    vertical segment of length ``1/n``, ``c`` and ``d`` lie on its horizontal
    bisector at distance about ``2n`` with ``|cd| = 1/n``.  For ``n = 2 mod 4``
    a far-apart pair is placed above all copies.
    """
    if n < 4 or n % 2:
        raise ConstructionError("s4 gadget needs an even n >= 4")
    q = n // 4
    N = Fraction(n)
    half_ab = 1 / (2 * N)
    reach = _rat(math.sqrt(4 * n * n - 1 / (4 * n * n)), 10**9)
    strip = 2 / N
    for attempt in range(1, 20):
        try:
            return _s4_attempt(n, q, N, half_ab, reach, strip, Fraction(attempt, 16 * n**3))
        except ConstructionError as err:
            last = err
    raise last


def _s4_attempt(n, q, N, half_ab, reach, strip, jitter):
    pts = []
    labels = []
    for t in range(q):
        x0 = jitter * t * t
        y0 = strip * t + jitter * t**3
        pts += [
            Point(x0, y0 + half_ab),
            Point(x0, y0 - half_ab),
            Point(x0 + reach, y0),
            Point(x0 + reach + 1 / N, y0),
        ]
        labels += [f"a{t}", f"b{t}", f"c{t}", f"d{t}"]
    if n % 4 == 2:
        top = strip * q + 1 / N
        pts += [Point(-1 / N, top), Point(-1 / N + 2 * N, top + jitter)]
        labels += ["e", "f"]
    meta = {"kind": "s4-matching", "n": n, "copies": q, "labels": labels}
    ps = _build(pts, meta)
    _check_s4(ps, q, n)
    return ps


def _check_s4(ps: PointSet, q: int, n: int):
    pts = ps.points
    left = [pts[4 * t + s] for t in range(q) for s in (0, 1)]
    right = [pts[4 * t + s] for t in range(q) for s in (2, 3)]
    for group, name in ((left, "a/b"), (right, "c/d")):
        for p in group:
            for r in group:
                if squared_distance(p, r) > Fraction(1, 1):
                    raise ConstructionError(f"{name} copies do not fit a unit-diameter disk")
    for p in left:
        for r in right:
            if squared_distance(p, r) < (2 * n - Fraction(1, n)) ** 2:
                raise ConstructionError("cross distance fell below 2n")


# ---------------------------------------------------------------------------
# Longest non-crossing tours: deltoids and hexagons
# ---------------------------------------------------------------------------

def _auxiliary_spokes(k: int) -> tuple[list[tuple[float, float]], list[tuple[float, float]]]:
    """Points ``c_i`` and ``x_i`` whose far partners form a non-crossing matching.

    Follows the iterative ray construction: each ``x_i`` has ``c_i`` as its
    farthest point among the ``c``'s, and the ``x``'s stay within a disk of
    diameter 1.
    """
    alpha = math.pi / (3 * k)
    c = [(0.0, 0.0)]
    x = [(2.0, 0.0), (2.0 - 1.0 / k, 0.0)] if k > 1 else [(2.0, 0.0)]
    direction = (-1.0, 0.0)

    def dist(p, q):
        return math.hypot(p[0] - q[0], p[1] - q[1])

    for i in range(k - 1):
        ca, sa = math.cos(alpha), math.sin(alpha)
        direction = (direction[0] * ca - direction[1] * sa, direction[0] * sa + direction[1] * ca)
        xi, xn = x[i], x[i + 1]
        r1 = dist(xi, c[i])
        r2 = dist(xn, c[i])
        # ray xn + s*direction against the circle around xi of radius r1
        dx, dy = xn[0] - xi[0], xn[1] - xi[1]
        b = dx * direction[0] + dy * direction[1]
        s1 = -b + math.sqrt(b * b - (dx * dx + dy * dy - r1 * r1))
        s = (s1 + r2) / 2
        cn = (xn[0] + s * direction[0], xn[1] + s * direction[1])
        c.append(cn)
        if i + 2 < k:
            step = 1.0 / k
            while True:
                u = ((cn[0] - xn[0]) / s, (cn[1] - xn[1]) / s)
                cand = (xn[0] + step * u[0], xn[1] + step * u[1])
                if all(dist(cand, cn) > dist(cand, c[j]) for j in range(i + 1)):
                    break
                step /= 2
                if step < 1e-9:
                    raise ConstructionError("could not place the next spoke point")
            x.append(cand)
    return c, x


def _rotate_about(center: Point, p: Point, t: Fraction) -> Point:
    """Rotate ``p`` about ``center`` by the angle with ``tan(angle/2) = t``; exact."""
    cos = (1 - t * t) / (1 + t * t)
    sin = 2 * t / (1 + t * t)
    dx, dy = p.x - center.x, p.y - center.y
    return Point(center.x + cos * dx - sin * dy, center.y + sin * dx + cos * dy)


def _tour_gadget(k: int, delta: Fraction, fan: int, kind: str) -> PointSet:
    if k < 1:
        raise ConstructionError("need k >= 1")
    if delta <= 0:
        raise ConstructionError("delta must be positive")
    cf, xf = _auxiliary_spokes(k)
    cs = [Point(_rat(p[0]), _rat(p[1])) for p in cf]
    xs = [Point(_rat(p[0]), _rat(p[1])) for p in xf]
    pts, labels, fans, apexes = [], [], [], []
    for i in range(k):
        c, x = cs[i], xs[i]
        length = math.hypot(float(c.x - x.x), float(c.y - x.y))
        step = delta / _rat(length, 10**9)
        # nudge a_i off the line x_i c_i by delta^3 so x_1, a_1, c_1 are not collinear
        ux, uy = (c.x - x.x) * step, (c.y - x.y) * step
        nudge = delta * delta
        a = Point(x.x + ux - uy * nudge, x.y + uy + ux * nudge)
        radius = math.hypot(float(c.x - a.x), float(c.y - a.y))
        t = _rat(float(delta) / (2 * fan * radius), 10**9)
        ring = [c]
        for s in range(1, fan + 1):
            ring.insert(0, _rotate_about(a, ring[0], -t))
            ring.append(_rotate_about(a, ring[-1], t))
        apexes.append(len(pts))
        pts.append(a)
        labels.append(f"a{i + 1}")
        fans.append(list(range(len(pts), len(pts) + len(ring))))
        pts += ring
        labels += [f"r{i + 1}_{s}" for s in range(len(ring))]
    pts.append(xs[0])
    labels.append("x1")
    meta = {"kind": kind, "k": k, "delta": str(delta), "labels": labels, "apexes": apexes, "fans": fans}
    ps = _build(pts, meta)
    _check_tour_gadget(ps, apexes, fans)
    return ps


def _check_tour_gadget(ps: PointSet, apexes, fans):
    pts = ps.points
    n = ps.n
    for a, fan in zip(apexes, fans):
        d = [squared_distance(pts[a], pts[v]) for v in range(n)]
        far = d[fan[0]]
        if any(d[v] != far for v in fan):
            raise ConstructionError("fan vertices are not equidistant from their apex")
        others = [v for v in range(n) if v not in fan]
        if any(d[v] >= far for v in others):
            raise ConstructionError(f"farthest points from apex {a} are not exactly its fan")
    hull = convex_hull(ps)
    declared = [v for fan in fans for v in fan] + [n - 1]
    if not _cyclic_match(hull, declared):
        raise ConstructionError(f"hull {hull} differs from the declared order {declared}")
    # fans with their apex must be interior-disjoint
    c = ps.int_coords
    polys = [[a] + fan for a, fan in zip(apexes, fans)]
    for i, P in enumerate(polys):
        for Q in polys[i + 1:]:
            for e in zip(P, P[1:] + P[:1]):
                for f in zip(Q, Q[1:] + Q[:1]):
                    if _open_segments_cross(c[e[0]], c[e[1]], c[f[0]], c[f[1]]):
                        raise ConstructionError("gadget polygons overlap")


def _cyclic_match(seq, declared) -> bool:
    if sorted(seq) != sorted(declared):
        return False
    for cand in (list(declared), list(reversed(declared))):
        i = cand.index(seq[0])
        if cand[i:] + cand[:i] == list(seq):
            return True
    return False


def default_delta(k: int) -> Fraction:
    return Fraction(1, 8 * (4 * k + 1) ** 3)


def deltoid_tour_gadget(k: int, delta: Fraction | None = None) -> PointSet:
    """``4k+1`` points with ``2^k`` longest non-crossing tours.

    Per deltoid ``i`` the indices are ``a_i`` then ``b_i, c_i, d_i`` (hull
    order); the last index is ``x_1``.  ``|a_i b_i| = |a_i c_i| = |a_i d_i|``
    holds exactly.
    """
    ps = _tour_gadget(k, Fraction(delta) if delta is not None else default_delta(k), 1, "deltoid-tour")
    labels = []
    for i in range(k):
        labels += [f"a{i + 1}", f"b{i + 1}", f"c{i + 1}", f"d{i + 1}"]
    ps.meta["labels"] = labels + ["x1"]
    return ps


def hexagon_tour_gadget(k: int, delta: Fraction | None = None) -> PointSet:
    """``6k+1`` points: each apex has five equidistant hull neighbours.

    Each apex can be inserted between any two consecutive fan vertices, so
    the construction targets ``4^k`` longest non-crossing tours.
    """
    return _tour_gadget(k, Fraction(delta) if delta is not None else default_delta(k) / 2, 2, "hexagon-tour")


def matching_spokes(k: int, delta: Fraction | None = None) -> PointSet:
    """The ``{a_i, c_i}`` pairs of the deltoid gadget (``2k`` points).

    Their longest perfect matching, over all matchings, is ``{a_i c_i}`` and it
    is non-crossing.  Index ``2i`` is ``a_i``, ``2i+1`` is ``c_i``.
    """
    q = deltoid_tour_gadget(k, delta)
    pts = []
    for i in range(k):
        pts += [q.points[4 * i], q.points[4 * i + 2]]
    return _build(pts, {"kind": "matching-spokes", "k": k})


# ---------------------------------------------------------------------------
# Shortest tours: rotated triangles
# ---------------------------------------------------------------------------

def rotated_triangle_gadget(n: int, eps: Fraction | None = None) -> PointSet:
    """Groups of three near-isosceles triangles spread around the unit circle.

    Group ``g`` is ``(a, b, c)``: apex ``a`` on the circle, base ``bc`` of
    length about ``eps/4`` at distance about ``eps`` towards the next apex,
    mirror-symmetric about the line to that apex, so ``|b a'| = |c a'|``
    exactly.  The last group is cut short when ``3`` does not divide ``n``.
    """
    if n < 3:
        raise ConstructionError("need n >= 3")
    eps = Fraction(eps) if eps is not None else Fraction(1, 10 * n)
    groups = -(-n // 3)
    if 8 * eps >= _min_apex_gap(groups):
        raise ConstructionError("eps too large for the group spacing")
    apex = []
    for g in range(groups):
        phi = 2 * math.pi * g / groups + 0.1
        apex.append(Point(_rat(math.cos(phi)), _rat(math.sin(phi))))
    pts, sizes = [], []
    for g in range(groups):
        a = apex[g]
        nxt = apex[(g + 1) % groups] if groups > 1 else Point(a.x - 1, a.y)
        dx, dy = nxt.x - a.x, nxt.y - a.y
        norm = _rat(math.hypot(float(dx), float(dy)), 10**9)
        s = eps / norm
        mx, my = a.x + s * dx, a.y + s * dy
        w = s / 8
        tri = [a, Point(mx - w * dy, my + w * dx), Point(mx + w * dy, my - w * dx)]
        take = min(3, n - len(pts))
        pts += tri[:take]
        sizes.append(take)
    meta = {"kind": "rotated-triangles", "n": n, "eps": str(eps), "group_sizes": sizes}
    return _build(pts, meta)


def _min_apex_gap(groups: int) -> Fraction:
    if groups == 1:
        return Fraction(2)
    return _rat(2 * math.sin(math.pi / groups), 10**6)


# ---------------------------------------------------------------------------
# Regular polygon
# ---------------------------------------------------------------------------

def chord_lengths(n: int, digits: int = 60) -> list:
    """``[l_0, l_1, ..., l_{n//2}]`` with ``l_i = 2 sin(i pi / n)`` at ``digits`` precision."""
    with mpmath.workdps(digits + 10):
        return [2 * mpmath.sin(i * mpmath.pi / n) for i in range(n // 2 + 1)]


def convex_polygon(n: int) -> PointSet:
    """Rational approximation of the regular ``n``-gon on the unit circle.

    ``meta["regular"] = n`` tells weight computations to use the exact chord
    length classes instead of the approximate coordinates.
    """
    if n < 3:
        raise ConstructionError("need n >= 3")
    pts = []
    for i in range(n):
        phi = 2 * math.pi * i / n
        pts.append(Point(_rat(math.cos(phi), 10**9), _rat(math.sin(phi), 10**9)))
    meta = {"kind": "convex-polygon", "n": n, "regular": n}
    ps = _build(pts, meta)
    if not _cyclic_match(convex_hull(ps), list(range(n))):
        raise ConstructionError("rational polygon lost convex position")
    return ps


def perturbed_convex_polygon(n: int, rng, spread: float = 0.3) -> PointSet:
    """Random convex polygon: sorted random angles on a circle, rational coordinates."""
    while True:
        base = sorted(rng.uniform(0, 2 * math.pi) for _ in range(n))
        pts = [Point(_rat(math.cos(t), 10**6), _rat(math.sin(t) * (1 - spread / 2), 10**6)) for t in base]
        if validate_general_position(pts) is not None:
            continue
        ps = PointSet(points=tuple(pts), meta={"kind": "random-convex", "n": n})
        hull = convex_hull(ps)
        if len(hull) == n:
            # relabel so indices follow the hull
            return PointSet(points=tuple(pts[i] for i in hull), meta={"kind": "random-convex", "n": n})


def random_point_set(n: int, rng, grid: int = 1000) -> PointSet:
    """Random integer points in general position."""
    while True:
        pts = [(rng.randrange(grid), rng.randrange(grid)) for _ in range(n)]
        if validate_general_position(pts) is None:
            return PointSet.from_points(pts)


GENERATORS = {
    "chain": lambda r, k, flatness=None: almost_convex_chain(ChainSpec(r, k, flatness)),
    "double-chain": lambda r, k, flatness=None: generalized_double_chain(ChainSpec(r, k, flatness)),
    "s4-matching": s4_matching_gadget,
    "deltoid": deltoid_tour_gadget,
    "hexagon": hexagon_tour_gadget,
    "triangles": rotated_triangle_gadget,
    "polygon": convex_polygon,
}
