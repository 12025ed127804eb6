from fractions import Fraction

import pytest

from planegraphs.constructions import (
    ChainSpec,
    ConstructionError,
    almost_convex_chain,
    chain_visibility_violations,
    convex_polygon,
    deltoid_tour_gadget,
    double_chain,
    generalized_double_chain,
    hexagon_tour_gadget,
    matching_spokes,
    mutual_visibility_violations,
    perturbed_convex_polygon,
    rotated_triangle_gadget,
    s4_matching_gadget,
    two_chains,
)
from planegraphs.geometry import convex_hull, in_convex_position, squared_distance, validate_general_position


@pytest.mark.parametrize("r, k", [(2, 0), (3, 1), (2, 2), (4, 3)])
def test_chain_size_and_hull(r, k):
    ps = almost_convex_chain(ChainSpec(r, k))
    assert ps.n == r * (k + 1) + 1
    assert validate_general_position(ps) is None
    hull = set(convex_hull(ps))
    assert set(ps.meta["hull_vertices"]) <= hull
    assert chain_visibility_violations(ps.points, ps.meta["groups"]) == []


def test_double_chain_of_ten():
    ps = double_chain(10)
    assert ps.n == 10
    assert len(ps.meta["lower"]) == len(ps.meta["upper"]) == 5
    assert mutual_visibility_violations(ps, ps.meta["lower"], ps.meta["upper"]) == []


@pytest.mark.parametrize("r, k", [(2, 1), (3, 2), (2, 3)])
def test_generalized_double_chain_visibility(r, k):
    ps = generalized_double_chain(ChainSpec(r, k))
    assert ps.n == 2 * (r * (k + 1) + 1)
    assert ps.meta["visibility_checked"]


def test_double_chain_rejects_odd():
    with pytest.raises(ConstructionError):
        double_chain(9)


def test_two_chains():
    ps = two_chains(2, 3)
    assert ps.n == 5
    assert mutual_visibility_violations(ps, ps.meta["lower"], ps.meta["upper"]) == []


@pytest.mark.parametrize("n", [4, 8, 10, 12, 16])
def test_s4_gadget_congruences(n):
    ps = s4_matching_gadget(n)
    assert ps.n == n
    p = ps.points
    for t in range(n // 4):
        a, b, c, d = p[4 * t:4 * t + 4]
        assert squared_distance(a, c) == squared_distance(b, c)
        assert squared_distance(a, d) == squared_distance(b, d)
    if n % 4:
        assert ps.meta["labels"][-2:] == ["e", "f"]


@pytest.mark.parametrize("k", [1, 2, 3])
def test_deltoid_equidistant(k):
    ps = deltoid_tour_gadget(k)
    assert ps.n == 4 * k + 1
    p = ps.points
    for i in range(k):
        a, b, c, d = p[4 * i:4 * i + 4]
        assert squared_distance(a, b) == squared_distance(a, c) == squared_distance(a, d)
    # the apexes a_i are interior, everything else is on the hull
    hull = set(convex_hull(ps))
    assert hull == set(range(ps.n)) - {4 * i for i in range(k)}


def test_hexagon_gadget_fans():
    ps = hexagon_tour_gadget(2)
    assert ps.n == 13
    p = ps.points
    for i in range(2):
        a = p[6 * i]
        fan = {squared_distance(a, q) for q in p[6 * i + 1:6 * i + 6]}
        assert len(fan) == 1


def test_matching_spokes():
    ps = matching_spokes(3)
    assert ps.n == 6


@pytest.mark.parametrize("n, sizes", [(9, [3, 3, 3]), (10, [3, 3, 3, 1]), (11, [3, 3, 3, 2])])
def test_rotated_triangles(n, sizes):
    ps = rotated_triangle_gadget(n)
    assert ps.n == n
    assert ps.meta["group_sizes"] == sizes


def test_rotated_triangles_rejects_big_eps():
    with pytest.raises(ConstructionError):
        rotated_triangle_gadget(9, Fraction(1, 2))


@pytest.mark.parametrize("n", [3, 6, 11])
def test_regular_polygon(n):
    ps = convex_polygon(n)
    assert ps.meta["regular"] == n
    assert in_convex_position(ps)


def test_perturbed_polygon_is_in_hull_order():
    import random

    ps = perturbed_convex_polygon(9, random.Random(2))
    hull = convex_hull(ps)
    start = hull.index(0)
    assert hull[start:] + hull[:start] == list(range(9))
