import math
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from planegraphs.constructions import convex_polygon
from planegraphs.geometry import (
    GeometryError,
    Point,
    PointSet,
    canonical_cycle,
    convex_hull,
    edge_span,
    in_convex_position,
    interleaved,
    orientation,
    point,
    same_cycle,
    segments_cross,
    validate_general_position,
)

coords = st.integers(-50, 50)
points = st.builds(point, coords, coords)


def test_coord_parsing():
    assert point("1/3", 2) == Point(Fraction(1, 3), Fraction(2))
    with pytest.raises(GeometryError):
        point(0.5, 1)
    with pytest.raises(GeometryError):
        point("0.5", 1)


def test_orientation_signs():
    o, a, b = point(0, 0), point(1, 0), point(0, 1)
    assert orientation(o, a, b) == 1
    assert orientation(o, b, a) == -1
    assert orientation(o, a, point(5, 0)) == 0


@given(points, points, points)
def test_orientation_antisymmetric(p, q, r):
    assert orientation(p, q, r) == -orientation(q, p, r)
    assert orientation(p, q, r) == orientation(q, r, p)


def test_square_diagonals_cross():
    ps = PointSet.from_points([(0, 0), (2, 0), (2, 2), (0, 2)])
    assert segments_cross((0, 2), (1, 3), ps)
    assert not segments_cross((0, 1), (2, 3), ps)
    assert not segments_cross((0, 1), (1, 2), ps)


def test_same_edge_rejected():
    ps = PointSet.convex(4)
    with pytest.raises(GeometryError):
        segments_cross((0, 1), (1, 0), ps)


def test_touching_counts_as_crossing():
    # a degenerate configuration can only be checked below the PointSet validator
    from planegraphs.geometry import _open_segments_cross

    assert _open_segments_cross((0, 0), (4, 0), (2, 0), (2, 3))
    assert not _open_segments_cross((0, 0), (4, 0), (5, 0), (5, 3))


@given(st.lists(points, min_size=4, max_size=4, unique=True))
def test_crossing_symmetric(pts):
    if validate_general_position(pts) is not None:
        return
    ps = PointSet.from_points(pts)
    assert segments_cross((0, 1), (2, 3), ps) == segments_cross((2, 3), (0, 1), ps)
    assert segments_cross((0, 2), (1, 3), ps) == segments_cross((1, 3), (0, 2), ps)


def test_general_position_reports():
    assert validate_general_position([(0, 0), (1, 1), (2, 2)]) == (0, 1, 2)
    assert validate_general_position([(0, 0), (1, 0), (0, 0)]) == (0, 2)
    assert validate_general_position([(0, 0), (1, 0), (0, 1)]) is None
    with pytest.raises(GeometryError):
        PointSet.from_points([(0, 0), (1, 1), (3, 3)])


def test_convex_mode_crossing_is_interleaving():
    ps = PointSet.convex(6)
    assert segments_cross((0, 3), (1, 4), ps)
    assert not segments_cross((0, 2), (3, 5), ps)
    assert interleaved((4, 1), (0, 3))


@pytest.mark.parametrize("n", range(4, 13))
def test_convex_mode_matches_regular_polygon(n):
    abstract = PointSet.convex(n)
    exact = convex_polygon(n)
    edges = list(combinations(range(n), 2))
    for a, b in combinations(edges, 2):
        if set(a) & set(b):
            continue
        assert segments_cross(a, b, abstract) == segments_cross(a, b, exact)


def test_hull_of_square_with_inner_point():
    ps = PointSet.from_points([(1, 2), (0, 0), (3, 0), (3, 3), (0, 4)])
    assert convex_hull(ps) == [1, 2, 3, 4]
    assert not in_convex_position(ps)


@settings(max_examples=50)
@given(st.permutations(list(range(7))))
def test_hull_permutation_invariant(perm):
    base = [(0, 0), (10, 1), (13, 7), (6, 12), (-2, 8), (5, 5), (4, 3)]
    ps = PointSet.from_points(base)
    shuffled = PointSet.from_points([base[i] for i in perm])
    hull = {base[i] for i in convex_hull(ps)}
    hull2 = {base[perm[i]] for i in convex_hull(shuffled)}
    assert hull == hull2


def test_edge_span():
    assert edge_span(10, (0, 5)) == 5
    assert edge_span(10, (1, 9)) == 2
    assert edge_span(7, (6, 0)) == 1


def test_canonical_cycle():
    assert canonical_cycle([2, 0, 1]) == (0, 1, 2)
    assert canonical_cycle([3, 2, 1, 0]) == (0, 1, 2, 3)
    assert same_cycle([0, 2, 4, 1, 3], [3, 1, 4, 2, 0])


def test_json_roundtrip():
    ps = PointSet.from_points([(0, 0), ("1/3", 2), (5, "-7/2")])
    again = PointSet.from_json(ps.to_json())
    assert again == ps
    assert PointSet.from_json({"mode": "convex", "n": 9}).n == 9
    with pytest.raises(GeometryError):
        PointSet.from_json({"mode": "weird"})


def test_regular_flag_survives_json():
    ps = convex_polygon(8)
    assert PointSet.from_json(ps.to_json()).meta["regular"] == 8
