import random

import mpmath
import pytest

from planegraphs.constructions import (
    convex_polygon,
    deltoid_tour_gadget,
    hexagon_tour_gadget,
    matching_spokes,
    random_point_set,
    rotated_triangle_gadget,
    s4_matching_gadget,
)
from planegraphs.enumeration import EdgeGraph, GraphClass, crossing_table, enumerate_graphs, enumerate_masks
from planegraphs.geometry import GeometryError, PointSet
from planegraphs.weighted import (
    ALLOWED,
    FORBIDDEN,
    MAX,
    MIN,
    WeightModel,
    extremal_multiplicity,
    span_profile_bound_check,
    star_weight,
    verify_lemma_L1,
)


def close(a, b, tol="1e-40"):
    return abs(mpmath.mpf(a) - mpmath.mpf(b)) <= mpmath.mpf(tol)


def test_weight_model_precision():
    with pytest.raises(ValueError):
        WeightModel(PointSet.convex(4), digits=20)
    m = WeightModel(PointSet.from_points([(0, 0), (1, 0), (0, 1)]))
    assert close(m.edge_weight(1, 2), mpmath.sqrt(2))
    assert m.keys[0] == 1


def test_regular_polygon_uses_span_keys():
    m = WeightModel(convex_polygon(6))
    assert m.by_span
    assert close(m.edge_weight(0, 3), 2)
    assert close(m.edge_weight(0, 2), mpmath.sqrt(3))


@pytest.mark.parametrize("ps, cls, obj, crossings, expected", [
    (s4_matching_gadget(8), GraphClass.PERFECT_MATCHING, MAX, FORBIDDEN, 4),
    (rotated_triangle_gadget(9), GraphClass.SPANNING_CYCLE, MIN, ALLOWED, 8),
    (convex_polygon(6), GraphClass.SPANNING_CYCLE, MIN, ALLOWED, 1),
    (deltoid_tour_gadget(2), GraphClass.SPANNING_CYCLE, MAX, FORBIDDEN, 4),
    (s4_matching_gadget(12), GraphClass.PERFECT_MATCHING, MAX, FORBIDDEN, 8),
    (s4_matching_gadget(10), GraphClass.PERFECT_MATCHING, MAX, FORBIDDEN, 4),
], ids=["s4-8", "triangles-9", "hexagon-min", "deltoid-2", "s4-12", "s4-10"])
def test_multiplicities(ps, cls, obj, crossings, expected):
    rep = extremal_multiplicity(ps, cls, obj, crossings)
    assert rep.multiplicity == expected
    assert rep.provable and not rep.warnings
    model = WeightModel(ps)
    for g in rep.witnesses:
        assert model.equal(model.weight(g.mask), rep.weight)


def test_hexagon_gadget_multiplicity():
    # best-effort construction: four insertion choices per gadget
    rep = extremal_multiplicity(hexagon_tour_gadget(2), GraphClass.SPANNING_CYCLE, MAX, FORBIDDEN)
    assert rep.multiplicity == 16


def test_workers_give_same_report():
    ps = rotated_triangle_gadget(8)
    a = extremal_multiplicity(ps, "cycle", MIN, ALLOWED)
    b = extremal_multiplicity(ps, "cycle", MIN, ALLOWED, workers=2)
    assert a.multiplicity == b.multiplicity and a.weight == b.weight


def test_empty_class():
    with pytest.raises(GeometryError):
        extremal_multiplicity(PointSet.convex(5), "matching")


def test_bad_policy():
    with pytest.raises(ValueError):
        extremal_multiplicity(PointSet.convex(5), "tree", "biggest")


@pytest.mark.parametrize("factor", ["10", "0.1"])
@pytest.mark.parametrize("ps, cls, obj, crossings", [
    (s4_matching_gadget(8), "matching", MAX, FORBIDDEN),
    (rotated_triangle_gadget(9), "cycle", MIN, ALLOWED),
    (deltoid_tour_gadget(2), "cycle", MAX, FORBIDDEN),
], ids=["s4", "triangles", "deltoid"])
def test_theta_stability(ps, cls, obj, crossings, factor):
    base = extremal_multiplicity(ps, cls, obj, crossings)
    model = WeightModel(ps, theta=mpmath.mpf("1e-30") * mpmath.mpf(factor))
    assert extremal_multiplicity(ps, cls, obj, crossings, model=model).multiplicity == base.multiplicity


def test_star_weight_square():
    assert close(star_weight(4), 2 * mpmath.sqrt(2) + 2)


def test_star_weight_pentagon():
    with mpmath.workdps(60):
        l1, l2 = (2 * mpmath.sin(i * mpmath.pi / 5) for i in (1, 2))
        assert close(star_weight(5, 3), 2 * (l1 + l2))


def test_star_weight_hexagon():
    assert close(star_weight(6), 2 * (1 + mpmath.sqrt(3)) + 2)


def test_star_weight_vertex_range():
    with pytest.raises(ValueError):
        star_weight(5, 5)


@pytest.mark.parametrize("n", range(3, 10))
def test_lemma_star_is_longest(n):
    ok, rep = verify_lemma_L1(n, report=True)
    assert ok
    assert rep.multiplicity >= 2 ** (n - 2) or n == 3


def test_lemma_n3_all_tie():
    ok, rep = verify_lemma_L1(3, report=True)
    assert ok and rep.multiplicity == 3


def test_span_profile_examples():
    star = EdgeGraph(7, tuple((0, j) for j in range(1, 7)))
    assert span_profile_bound_check(star, 7)
    path = EdgeGraph(6, tuple((i, i + 1) for i in range(5)))
    assert span_profile_bound_check(path, 6)
    # two diameters and a span-2 chord break the bound N_2 <= n - 3
    bad = EdgeGraph(6, ((0, 3), (1, 4), (2, 5), (0, 2), (3, 5)))
    assert not span_profile_bound_check(bad, 6)


def test_span_profile_all_trees_convex8():
    ps = PointSet.convex(8)
    assert all(span_profile_bound_check(t, 8) for t in enumerate_graphs(ps, "tree"))


@pytest.mark.parametrize("n", range(3, 9))
def test_longest_trees_meet_profile_and_star(n):
    rep = extremal_multiplicity(convex_polygon(n), "tree", MAX, FORBIDDEN, witnesses=10**6)
    assert close(rep.weight, star_weight(n), "1e-30")
    assert all(span_profile_bound_check(t, n) for t in rep.witnesses)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_spokes_longest_matching_is_noncrossing(k):
    ps = matching_spokes(k)
    rep = extremal_multiplicity(ps, "matching", MAX, ALLOWED)
    assert rep.multiplicity == 1
    g = rep.witnesses[0]
    assert crossing_table(ps).is_plane(g.mask)
    assert sorted(g.edges) == [(2 * i, 2 * i + 1) for i in range(k)]


def test_s4_longest_matching_over_all_matchings_crosses():
    # the gadget only controls non-crossing matchings; across copies longer crossing ones exist
    ps = s4_matching_gadget(8)
    rep = extremal_multiplicity(ps, "matching", MAX, ALLOWED)
    assert not crossing_table(ps).is_plane(rep.witnesses[0].mask)


@pytest.mark.parametrize("seed", range(6))
def test_shortest_tour_is_automatically_noncrossing(seed):
    rng = random.Random(seed)
    ps = random_point_set(5 + seed % 4, rng)
    over_all = extremal_multiplicity(ps, "cycle", MIN, ALLOWED, witnesses=10**6)
    plane = extremal_multiplicity(ps, "cycle", MIN, FORBIDDEN)
    assert over_all.weight == plane.weight
    table = crossing_table(ps)
    assert all(table.is_plane(g.mask) for g in over_all.witnesses)


def test_near_tie_is_reported():
    # a regular hexagon: two hull edges weigh exactly one diameter, spans differ
    ps = convex_polygon(6)
    model = WeightModel(ps)
    a = (1 << crossing_table(ps).eid(0, 1)) | (1 << crossing_table(ps).eid(1, 2))
    b = 1 << crossing_table(ps).eid(0, 3)
    assert model.equal(model.weight(a), model.weight(b))
    assert model.key(a) != model.key(b)


def test_report_json():
    rep = extremal_multiplicity(s4_matching_gadget(8), "matching", MAX, FORBIDDEN)
    doc = rep.to_json()
    assert doc["multiplicity"] == 4 and len(doc["witnesses"]) == 4
