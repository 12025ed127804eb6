"""Exhaustive enumeration and counting of non-crossing graph classes.

Graphs are edge bitmasks over the ``C(n, 2)`` candidate segments, in
``itertools.combinations`` order.  Each graph class is a small search engine
exposing ``root()``, ``expand(state)`` and an optional memo ``key(state)``;
:func:`enumerate_graphs` walks it depth-first, :func:`count` adds
memoisation and optional sharding over worker processes.
"""
from __future__ import annotations

import math
import os
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterator

from .geometry import (
    CONVEX,
    GeometryError,
    PointSet,
    _orient_int,
    convex_hull,
    segments_cross,
)


class GraphClass(str, Enum):
    ALL_PLANE = "all-plane"
    FOREST = "forest"
    PERFECT_MATCHING = "perfect-matching"
    SPANNING_TREE = "spanning-tree"
    SPANNING_CYCLE = "spanning-cycle"
    TRIANGULATION = "triangulation"

    @classmethod
    def parse(cls, name) -> "GraphClass":
        if isinstance(name, cls):
            return name
        key = str(name).lower().replace("_", "-")
        aliases = {"matching": "perfect-matching", "tree": "spanning-tree", "cycle": "spanning-cycle",
                   "tour": "spanning-cycle", "plane": "all-plane", "all": "all-plane"}
        return cls(aliases.get(key, key))


class LimitExceeded(GeometryError):
    """The instance is larger than the configured enumeration cap."""


DEFAULT_LIMIT = 14
TRIANGULATION_LIMIT = 16
SUPPORT_LIMIT = 10


def size_limit(cls: GraphClass) -> int:
    override = os.environ.get("MULTIPLICITY_LIMIT_N")
    if override:
        return int(override)
    return TRIANGULATION_LIMIT if cls is GraphClass.TRIANGULATION else DEFAULT_LIMIT


def edge_index(n: int, i: int, j: int) -> int:
    if i > j:
        i, j = j, i
    return i * n - i * (i + 1) // 2 + (j - i - 1)


@dataclass(frozen=True)
class EdgeGraph:
    n: int
    edges: tuple[tuple[int, int], ...]

    @classmethod
    def from_mask(cls, n: int, mask: int, table: "CrossingTable") -> "EdgeGraph":
        return cls(n, tuple(table.edges[b] for b in _bits(mask)))

    @property
    def mask(self) -> int:
        m = 0
        for i, j in self.edges:
            m |= 1 << edge_index(self.n, i, j)
        return m

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def is_connected(self) -> bool:
        adj = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n

    def cycle_order(self) -> list[int]:
        """Vertex sequence of a spanning cycle, starting at 0."""
        adj = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        seq = [0]
        prev = None
        while len(seq) < self.n:
            nxt = [w for w in adj[seq[-1]] if w != prev][0]
            prev = seq[-1]
            seq.append(nxt)
        return seq


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class CrossingTable:
    """Pairwise crossing bitmasks for all candidate edges of a point set."""

    def __init__(self, ps: PointSet):
        self.ps = ps
        self.n = ps.n
        self.edges = list(combinations(range(ps.n), 2))
        self.index = {e: k for k, e in enumerate(self.edges)}
        m = len(self.edges)
        cross = [0] * m
        for a in range(m):
            for b in range(a + 1, m):
                if segments_cross(self.edges[a], self.edges[b], ps):
                    cross[a] |= 1 << b
                    cross[b] |= 1 << a
        self.cross = cross
        self.all_edges = (1 << m) - 1

    def crosses(self, a: int, b: int) -> bool:
        return bool(self.cross[a] >> b & 1)

    def eid(self, i: int, j: int) -> int:
        return edge_index(self.n, i, j)

    def is_plane(self, mask: int) -> bool:
        for b in _bits(mask):
            if self.cross[b] & mask:
                return False
        return True


@lru_cache(maxsize=64)
def crossing_table(ps: PointSet) -> CrossingTable:
    return CrossingTable(ps)


# ---------------------------------------------------------------------------
# Engines
# ---------------------------------------------------------------------------

class _Engine:
    memoize = False

    def __init__(self, table: CrossingTable, crossing_ok: bool = False):
        self.t = table
        self.n = table.n
        self.crossing_ok = crossing_ok
        self.cross = [0] * len(table.edges) if crossing_ok else table.cross

    def key(self, state):
        return None


class _MatchingEngine(_Engine):
    memoize = True

    def root(self):
        return (0, 0, 0)

    def key(self, state):
        return (state[0], state[2])

    def expand(self, state):
        matched, mask, blocked = state
        full = (1 << self.n) - 1
        if matched == full:
            return mask
        v = (~matched & full & -(~matched & full)).bit_length() - 1
        out = []
        for u in range(v + 1, self.n):
            if matched >> u & 1:
                continue
            e = self.t.eid(v, u)
            if blocked >> e & 1:
                continue
            out.append((matched | 1 << v | 1 << u, mask | 1 << e, blocked | self.cross[e]))
        return out


class _CycleEngine(_Engine):
    """Hamiltonian cycles grown as paths from vertex 0; each cycle once."""

    memoize = True

    def root(self):
        return ((0,), 1, 0, 0)

    def key(self, state):
        path, visited, _, blocked = state
        if len(path) < 2:
            return None
        return (path[1], path[-1], visited, blocked)

    def expand(self, state):
        path, visited, mask, blocked = state
        n = self.n
        last = path[-1]
        if len(path) == n:
            if n < 3 or path[1] > last:
                return []
            e = self.t.eid(last, 0)
            if blocked >> e & 1:
                return []
            return mask | 1 << e
        out = []
        for w in range(1, n):
            if visited >> w & 1:
                continue
            e = self.t.eid(last, w)
            if blocked >> e & 1:
                continue
            out.append((path + (w,), visited | 1 << w, mask | 1 << e, blocked | self.cross[e]))
        return out


class _TriangulationEngine(_Engine):
    """Sweep: repeatedly put a triangle on the left of the lowest open edge."""

    memoize = True

    def __init__(self, table: CrossingTable, crossing_ok: bool = False):
        if crossing_ok:
            raise ValueError("triangulations are plane by definition")
        super().__init__(table)
        ps = table.ps
        self.convex = ps.mode == CONVEX
        self.coords = None if self.convex else ps.int_coords
        self.hull = convex_hull(ps)
        self._empty = {}

    def left(self, u, v, w) -> bool:
        if self.convex:
            # ccw cyclic order u -> v -> w
            return (v - u) % self.n < (w - u) % self.n
        return _orient_int(self.coords[u], self.coords[v], self.coords[w]) > 0

    def empty(self, u, v, w) -> bool:
        key = tuple(sorted((u, v, w)))
        hit = self._empty.get(key)
        if hit is None:
            if self.convex:
                hit = True
            else:
                a, b, c = (self.coords[i] for i in key)
                if _orient_int(a, b, c) < 0:
                    b, c = c, b
                hit = True
                for x in range(self.n):
                    if x in key:
                        continue
                    p = self.coords[x]
                    if _orient_int(a, b, p) > 0 and _orient_int(b, c, p) > 0 and _orient_int(c, a, p) > 0:
                        hit = False
                        break
            self._empty[key] = hit
        return hit

    def root(self):
        h = self.hull
        opened = tuple(sorted(((h[i], h[(i + 1) % len(h)]) for i in range(len(h))), key=self._ekey))
        mask = 0
        for u, v in opened:
            mask |= 1 << self.t.eid(u, v)
        blocked = 0
        for b in _bits(mask):
            blocked |= self.cross[b]
        return (opened, mask, blocked)

    def _ekey(self, d):
        return self.t.eid(*d)

    def key(self, state):
        return state[0]

    def expand(self, state):
        opened, mask, blocked = state
        if not opened:
            return mask
        u, v = opened[0]
        rest = set(opened[1:])
        out = []
        for w in range(self.n):
            if w == u or w == v or not self.left(u, v, w):
                continue
            e1, e2 = self.t.eid(u, w), self.t.eid(v, w)
            if (blocked >> e1 & 1) or (blocked >> e2 & 1):
                continue
            if not self.empty(u, v, w):
                continue
            nxt = set(rest)
            ok = True
            for x, y in ((v, w), (w, u)):
                if (x, y) in nxt:
                    nxt.discard((x, y))
                elif mask >> self.t.eid(x, y) & 1:
                    # edge present but not open on this side: region already filled
                    ok = False
                    break
                else:
                    nxt.add((y, x))
            if not ok:
                continue
            nm = mask | 1 << e1 | 1 << e2
            out.append((tuple(sorted(nxt, key=self._ekey)), nm, blocked | self.cross[e1] | self.cross[e2]))
        return out


class _SubsetEngine(_Engine):
    """Include/exclude search over candidate edges, lowest available edge first."""

    memoize = True

    def __init__(self, table, cls: GraphClass, crossing_ok=False, allowed: int | None = None):
        super().__init__(table, crossing_ok)
        self.cls = cls
        self.allowed = table.all_edges if allowed is None else allowed
        self.acyclic = cls in (GraphClass.FOREST, GraphClass.SPANNING_TREE)

    def root(self):
        comps = tuple(range(self.n)) if self.acyclic else None
        return (self.allowed, 0, comps)

    def key(self, state):
        return (state[0], state[2])

    def _connectable(self, avail, comps) -> bool:
        parent = list(comps)

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        groups = len(set(comps))
        for b in _bits(avail):
            i, j = self.t.edges[b]
            ri, rj = find(comps[i]), find(comps[j])
            if ri != rj:
                parent[ri] = rj
                groups -= 1
                if groups == 1:
                    return True
        return groups == 1

    def expand(self, state):
        avail, mask, comps = state
        if self.acyclic:
            while avail:
                low = avail & -avail
                i, j = self.t.edges[low.bit_length() - 1]
                if comps[i] != comps[j]:
                    break
                avail ^= low
        if self.cls is GraphClass.SPANNING_TREE and not self._connectable(avail, comps):
            return []
        if not avail:
            if self.cls is GraphClass.SPANNING_TREE and len(set(comps)) != 1:
                return []
            return mask
        low = avail & -avail
        e = low.bit_length() - 1
        out = [(avail ^ low, mask, comps)]
        nc = comps
        if self.acyclic:
            i, j = self.t.edges[e]
            a, b = comps[i], comps[j]
            lo, hi = min(a, b), max(a, b)
            nc = tuple(lo if c == hi else c for c in comps)
        out.append(((avail ^ low) & ~self.cross[e], mask | low, nc))
        return out


def _engine(ps: PointSet, cls: GraphClass, crossing_ok=False, allowed=None) -> _Engine:
    table = crossing_table(ps)
    if cls is GraphClass.PERFECT_MATCHING:
        return _MatchingEngine(table, crossing_ok)
    if cls is GraphClass.SPANNING_CYCLE:
        return _CycleEngine(table, crossing_ok)
    if cls is GraphClass.TRIANGULATION:
        return _TriangulationEngine(table)
    return _SubsetEngine(table, cls, crossing_ok, allowed)


def _check(ps: PointSet, cls: GraphClass, limit: int | None):
    cap = size_limit(cls) if limit is None else limit
    if ps.n > cap:
        raise LimitExceeded(f"n={ps.n} exceeds the {cls.value} limit {cap}")
    if cls is GraphClass.PERFECT_MATCHING and ps.n % 2:
        raise GeometryError("perfect matchings need an even number of points")


def _walk(engine, state) -> Iterator[int]:
    stack = [state]
    while stack:
        res = engine.expand(stack.pop())
        if isinstance(res, int):
            yield res
        else:
            stack.extend(reversed(res))


def enumerate_masks(ps: PointSet, cls, *, crossing_ok=False, allowed=None, limit=None) -> Iterator[int]:
    cls = GraphClass.parse(cls)
    _check(ps, cls, limit)
    if ps.n == 1 and cls is not GraphClass.PERFECT_MATCHING:
        yield 0
        return
    engine = _engine(ps, cls, crossing_ok, allowed)
    yield from _walk(engine, engine.root())


def enumerate_graphs(ps: PointSet, cls, **kw) -> Iterator[EdgeGraph]:
    """Every graph of the class exactly once, in a fixed deterministic order."""
    table = crossing_table(ps)
    for mask in enumerate_masks(ps, cls, **kw):
        yield EdgeGraph.from_mask(ps.n, mask, table)


def _count_from(engine, state, memo) -> int:
    res = engine.expand(state)
    if isinstance(res, int):
        return 1
    total = 0
    for child in res:
        k = engine.key(child) if engine.memoize else None
        if k is None:
            total += _count_from(engine, child, memo)
            continue
        hit = memo.get(k)
        if hit is None:
            hit = _count_from(engine, child, memo)
            memo[k] = hit
        total += hit
    return total


def _count_shard(args) -> int:
    engine, state = args
    return _count_from(engine, state, {})


def shards(engine, target: int) -> list:
    """Split the search tree into at least ``target`` disjoint frontier states (order preserved)."""
    frontier = deque([engine.root()])
    done = []
    while frontier and len(frontier) + len(done) < target:
        state = frontier.popleft()
        res = engine.expand(state)
        if isinstance(res, int):
            done.append(("leaf", res))
        else:
            frontier.extend(res)
    return [("leaf", m) for _, m in done] + [("state", s) for s in frontier]


def count(ps: PointSet, cls, *, crossing_ok=False, allowed=None, limit=None, workers: int = 1) -> int:
    """Number of graphs of the class, without materialising them."""
    import sys

    cls = GraphClass.parse(cls)
    _check(ps, cls, limit)
    if ps.n == 1:
        return 0 if cls is GraphClass.PERFECT_MATCHING else 1
    engine = _engine(ps, cls, crossing_ok, allowed)
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 10000))
    if workers <= 1:
        return _count_from(engine, engine.root(), {})
    parts = shards(engine, 4 * workers)
    total = sum(1 for kind, _ in parts if kind == "leaf")
    jobs = [(engine, s) for kind, s in parts if kind == "state"]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        total += sum(pool.map(_count_shard, jobs))
    return total


# ---------------------------------------------------------------------------
# Triangulation cross-check by flips
# ---------------------------------------------------------------------------

def triangulations_by_flips(ps: PointSet, limit: int | None = None) -> set[int]:
    """All triangulations reachable from one seed by edge flips (the whole flip graph)."""
    engine = _TriangulationEngine(crossing_table(ps))
    seed = next(enumerate_masks(ps, GraphClass.TRIANGULATION, limit=limit))
    t = engine.t
    hull = set()
    h = engine.hull
    for i in range(len(h)):
        hull.add(t.eid(h[i], h[(i + 1) % len(h)]))
    seen = {seed}
    queue = deque([seed])
    while queue:
        mask = queue.popleft()
        for e in _bits(mask):
            if e in hull:
                continue
            u, v = t.edges[e]
            sides = {}
            for w in range(t.n):
                if w in (u, v):
                    continue
                if mask >> t.eid(u, w) & 1 and mask >> t.eid(v, w) & 1 and engine.empty(u, v, w):
                    sides[engine.left(u, v, w)] = w
            if len(sides) != 2:
                continue
            f = t.eid(sides[True], sides[False])
            if not t.crosses(e, f):
                continue
            flipped = mask & ~(1 << e) | 1 << f
            if flipped not in seen:
                seen.add(flipped)
                queue.append(flipped)
    return seen


# ---------------------------------------------------------------------------
# Support table
# ---------------------------------------------------------------------------

@dataclass
class SupportTable:
    triangulations: list[int]
    cycles: list[int]
    support: dict[int, int]

    def weighted_sum(self) -> Fraction:
        """Sum over triangulations ``T`` of sum over cycles ``C`` in ``T`` of ``1/supp(C)``."""
        total = Fraction(0)
        for tri in self.triangulations:
            for c in self.cycles:
                if c & tri == c:
                    total += Fraction(1, self.support[c])
        return total


def support_table(ps: PointSet, limit: int = SUPPORT_LIMIT) -> SupportTable:
    """For every non-crossing spanning cycle, the number of triangulations containing it."""
    if ps.n > limit:
        raise LimitExceeded(f"support table limited to n <= {limit}")
    tris = list(enumerate_masks(ps, GraphClass.TRIANGULATION))
    cycles = list(enumerate_masks(ps, GraphClass.SPANNING_CYCLE))
    supp = {c: sum(1 for t in tris if c & t == c) for c in cycles}
    return SupportTable(tris, cycles, supp)


# ---------------------------------------------------------------------------
# Closed-form counts and their brute-force oracles
# ---------------------------------------------------------------------------

def catalan(k: int) -> int:
    return math.comb(2 * k, k) // (k + 1)


def noncrossing_tree_count(n: int) -> int:
    """Non-crossing spanning trees on ``n`` points in convex position."""
    return math.comb(3 * n - 3, n - 1) // (2 * n - 1)


def middle_region_triangulation_count(m: int) -> int:
    """Triangulations of the region between two facing chains of ``m`` points."""
    if m < 2:
        raise ValueError("need m >= 2")
    return math.comb(2 * m - 2, m - 1)


def bridge_type_count(i: int, j: int) -> int:
    """Combinatorial types of a tree with ``i`` lower and ``j`` upper vertices, all edges between rows."""
    if i < 1 or j < 1:
        raise ValueError("need i, j >= 1")
    return math.comb(i + j - 2, i - 1)


def chain_reduction_counts(k: int) -> list[int]:
    """Ways to shorten a convex ``(k+2)``-chain by exactly ``i`` vertices, ``i = 0..k``.

    Cutting off a run of ``g`` consecutive interior vertices leaves a pocket
    with ``g + 2`` vertices, triangulated in ``Catalan(g)`` ways; a reduction
    is a choice of removed vertices, weighted by the product over its runs.
    """
    if k < 0:
        raise ValueError("need k >= 0")
    out = [0] * (k + 1)
    for removed in range(1 << k):
        weight = 1
        run = 0
        for v in range(k + 1):
            if v < k and removed >> v & 1:
                run += 1
            else:
                weight *= catalan(run)
                run = 0
        out[bin(removed).count("1")] += weight
    return out


def chain_reduction_counts_bruteforce(k: int) -> list[int]:
    """Enumerate edge sets on the convex chain ``0..k+1`` directly.

    A valid set consists of non-crossing chords (chain edges excluded) whose uncovered vertices form the new envelope, where each
    envelope step is a chain edge or a chosen chord and each pocket under a
    chosen chord is fully triangulated.
    """
    m = k + 2
    chords = [(i, j) for i, j in combinations(range(m), 2) if j - i >= 2]
    out = [0] * (k + 1)
    ps = PointSet.convex(m)
    cross = {(a, b): segments_cross(a, b, ps) for a in chords for b in chords if a != b}
    for bits in range(1 << len(chords)):
        chosen = [chords[t] for t in range(len(chords)) if bits >> t & 1]
        if any(cross[a, b] for a, b in combinations(chosen, 2)):
            continue
        covered = {v for i, j in chosen for v in range(i + 1, j)}
        env = [v for v in range(m) if v not in covered]
        ok = True
        for u, w in zip(env, env[1:]):
            if w == u + 1:
                continue
            if (u, w) not in chosen:
                ok = False
                break
            inside = [c for c in chosen if u <= c[0] and c[1] <= w]
            # a polygon on w-u+1 vertices has w-u-2 diagonals, plus the closing chord
            if len(inside) != w - u - 1:
                ok = False
                break
        if ok:
            out[k - (len(env) - 2)] += 1
    return out


def polygon_triangulation_count(ps: PointSet, polygon: list[int]) -> int:
    """Triangulations of the simple polygon with the given vertex cycle (interval DP)."""
    from .geometry import _open_segments_cross

    c = ps.int_coords
    m = len(polygon)
    if m < 3:
        return 0
    boundary = [(polygon[i], polygon[(i + 1) % m]) for i in range(m)]

    def strictly_inside(x2, y2):
        # point (x2/2, y2/2); general position keeps it off the boundary
        hits = 0
        for a, b in boundary:
            (ax, ay), (bx, by) = c[a], c[b]
            ax, ay, bx, by = 2 * ax, 2 * ay, 2 * bx, 2 * by
            if (ay > y2) != (by > y2):
                # x of the edge at height y2, compared without division
                lhs = (x2 - ax) * (by - ay)
                rhs = (bx - ax) * (y2 - ay)
                if (lhs < rhs) == (by > ay):
                    hits += 1
        return hits % 2 == 1

    @lru_cache(maxsize=None)
    def diagonal(i, j):
        if (j - i) % m in (1, m - 1):
            return True
        a, b = polygon[i], polygon[j]
        for x, y in boundary:
            if {x, y} & {a, b}:
                continue
            if _open_segments_cross(c[a], c[b], c[x], c[y]):
                return False
        return strictly_inside(c[a][0] + c[b][0], c[a][1] + c[b][1])

    @lru_cache(maxsize=None)
    def tri(i, j):
        if j - i < 2:
            return 1
        total = 0
        for k in range(i + 1, j):
            if diagonal(i, k) and diagonal(k, j):
                total += tri(i, k) * tri(k, j)
        return total

    return tri(0, m - 1)


def middle_region_polygon(ps: PointSet) -> list[int]:
    """Vertex cycle bounding the region between the two chains of a double chain."""
    lower, upper = ps.meta["lower"], ps.meta["upper"]
    return list(lower) + list(reversed(upper))


def triangle_count(mask: int, ps: PointSet) -> int:
    """Bounded triangular faces of a triangulation via Euler's formula."""
    e = bin(mask).count("1")
    return e - ps.n + 1
