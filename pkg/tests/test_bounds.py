import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from planegraphs.bounds import (
    PUBLISHED_ST,
    PUBLISHED_TRI,
    AlphaMatrix,
    AlphaVector,
    DomainError,
    cf_lower_objective,
    dc_binomial_check,
    dc_upper_bound,
    entropy,
    gen_entropy,
    gen_entropy_gradient,
    golden_max,
    optimize,
    sc_branch_high,
    sc_branch_low,
    sc_upper_minimize,
    sc_upper_rate,
    st_lower_objective,
    st_single_bridge_optimum,
    tri_growth_rate,
    tri_lower_objective,
)


@pytest.mark.parametrize("q, expected", [(0, 0), (1, 0), (0.5, 1), (0.25, 0.8112781244591328)])
def test_entropy(q, expected):
    assert entropy(q) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("q", [-0.1, 1.1])
def test_entropy_domain(q):
    with pytest.raises(DomainError):
        entropy(q)


def test_gen_entropy():
    assert gen_entropy([0.25] * 4) == pytest.approx(2)
    assert gen_entropy([1, 0, 0]) == 0
    assert gen_entropy([0.5, 0.5]) == pytest.approx(entropy(0.5))


@pytest.mark.parametrize("bad", [[0.5, 0.6], [1.2, -0.2], []])
def test_gen_entropy_domain(bad):
    with pytest.raises(DomainError):
        gen_entropy(bad)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(7)
    h = 1e-6
    for _ in range(100):
        a = rng.dirichlet(np.ones(rng.integers(2, 7))) * 0.9 + 0.01
        g = gen_entropy_gradient(a)
        for i in range(a.size):
            e = np.zeros_like(a)
            e[i] = h
            fd = (gen_entropy(a + e, check=False) - gen_entropy(a - e, check=False)) / (2 * h)
            assert abs(fd - g[i]) < 1e-5


def test_gradient_domain():
    with pytest.raises(DomainError):
        gen_entropy_gradient([0.0, 1.0])


def test_alpha_vector():
    v = AlphaVector([0.5, 0.5])
    assert v.k == 1
    with pytest.raises(DomainError):
        AlphaVector([0.5, 0.6])


@pytest.mark.parametrize("a", [i / 10 for i in range(1, 10)])
def test_tri_k1_closed_form(a):
    expected = math.sqrt(3 * 2 ** (4 - a + entropy(a)))
    assert abs(tri_lower_objective(1, (1 - a, a)) - expected) < 1e-12


@pytest.mark.parametrize("seed", range(10))
def test_tri_k2_closed_form(seed):
    a = np.random.default_rng(seed).dirichlet(np.ones(3))
    expected = 2 ** ((8 - a[2] + gen_entropy(a)) / 3)
    assert abs(tri_lower_objective(2, a) - expected) < 1e-12


@pytest.mark.parametrize("seed", range(10))
def test_tri_k3_closed_form(seed):
    a = np.random.default_rng(seed).dirichlet(np.ones(4))
    log2 = (math.log2(5) + 8 - (a[1] + 2 * a[2] + 3 * a[3]) + gen_entropy(a)
            + a[1] * math.log2(3) + (a[2] + a[3]) * math.log2(5))
    assert abs(tri_lower_objective(3, a) - 2 ** (log2 / 4)) < 1e-12


@pytest.mark.parametrize("k, expected", [(0, 4), (1, 2 * math.sqrt(3)), (2, 2 * 4 ** (1 / 3))])
def test_tri_growth_rate(k, expected):
    assert tri_growth_rate(k) == pytest.approx(expected, rel=1e-15)


def test_tri_domain():
    with pytest.raises(DomainError):
        tri_lower_objective(5, [0.2] * 6)
    with pytest.raises(DomainError):
        tri_lower_objective(2, [0.5, 0.5])
    with pytest.raises(DomainError):
        tri_growth_rate(-1)


@pytest.mark.parametrize("k, lo", [(1, 8.485), (2, 8.617), (3, 8.650), (4, 8.648)])
def test_tri_published_parameters(k, lo):
    assert lo <= tri_lower_objective(k, PUBLISHED_TRI[k]) < lo + 0.001


def test_matrix_forms_agree():
    up = AlphaMatrix([[0.1, 0.02], [0.01]])
    sq = AlphaMatrix([[0.1, 0.02], [0.02, 0.01]])
    assert np.allclose(up.full, sq.full)
    assert AlphaMatrix.from_upper(2, [0.1, 0.02, 0.01]).upper() == up.upper()
    with pytest.raises(DomainError):
        AlphaMatrix([[0.1, 0.2, 0.3], [0.1]])


def test_matrix_derived():
    d = AlphaMatrix([[0.1, 0.0], [0.05, 0.0]]).derived()
    assert d["alpha_L"] == pytest.approx(0.1 + 2 * 0.05)
    assert d["alpha_U"] == pytest.approx(0.15)
    assert d["n_U"] == pytest.approx(1 - 0.05 - 1.5 * 0.05)
    assert d["n_L"] == pytest.approx(1 - 0.5 * 0.15)


def test_infeasible_matrix():
    with pytest.raises(DomainError):
        st_lower_objective([[0.9, 0.5], [0.5]])
    with pytest.raises(DomainError):
        cf_lower_objective([[-0.1]])


def test_st_single_bridge():
    a = st_single_bridge_optimum()
    best = st_lower_objective([[a]])
    assert best == pytest.approx(10.424, abs=5e-4)
    for d in (-0.01, 0.01):
        assert st_lower_objective([[a + d]]) < best


def test_st_small_alpha_tends_to_convex_base():
    assert st_lower_objective([[1e-12]]) == pytest.approx(6.75, rel=1e-9)


def test_st_published_z2():
    assert st_lower_objective(PUBLISHED_ST[2]) == pytest.approx(11.611, abs=5e-3)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=9, max_size=9))
def test_st_transpose_invariant(raw):
    m = np.array(raw).reshape(3, 3)
    scale = m.sum() * 6 + 1e-9
    m = AlphaMatrix((m / scale + 1e-4).tolist())
    if m.violations():
        return
    assert st_lower_objective(m) == pytest.approx(st_lower_objective(m.transpose()), rel=1e-12)
    assert cf_lower_objective(m) == pytest.approx(cf_lower_objective(m.transpose()), rel=1e-12)


def test_golden_max():
    x, fx = golden_max(lambda t: -(t - 0.3) ** 2, 0, 1)
    assert x == pytest.approx(0.3, abs=1e-8) and fx == pytest.approx(0, abs=1e-15)


def test_sc_bound():
    sc = sc_upper_minimize()
    assert 0 < sc.a < 0.5
    low = sc_branch_low(sc.a)
    _, high = golden_max(sc_branch_high, sc.a, 0.5)
    assert abs(low - high) < 1e-4
    assert sc.factor == pytest.approx(2 ** sc.rate)
    assert sc.base == pytest.approx(30 * sc.factor)
    for d in (-0.01, 0.01):
        assert sc_upper_rate(sc.a + d) >= sc.rate - 1e-9


def test_sc_rate_continuous():
    xs = np.linspace(0.01, 0.49, 200)
    ys = [sc_upper_rate(x) for x in xs]
    assert max(abs(a - b) for a, b in zip(ys, ys[1:])) < 0.02


def test_sc_domain():
    with pytest.raises(DomainError):
        sc_upper_rate(0.5)


@pytest.mark.parametrize("m", [10, 20])
def test_dc_binomial(m):
    assert dc_binomial_check(m)


def test_dc_bound():
    dc = dc_upper_bound()
    assert dc.base == pytest.approx(3 * 8.225)
    assert dc.reported == 24.68
    assert all(dc.checks.values())


def test_optimize_tri3():
    rep = optimize("tri", 3, restarts=2)
    assert rep.base == pytest.approx(8.650615, abs=1e-5)
    assert rep.params == pytest.approx([8 / 35, 12 / 35, 10 / 35, 5 / 35], abs=1e-4)


def test_optimize_tri4_no_regression():
    rep = optimize("tri", 4, restarts=2)
    assert rep.base >= tri_lower_objective(4, PUBLISHED_TRI[4]) - 1e-9
    assert rep.base < 8.65


def test_optimize_st2():
    rep = optimize("trees", 2, restarts=2)
    assert rep.objective == "st"
    assert rep.base == pytest.approx(11.611, abs=5e-3)
    assert rep.base >= max(rep.start_bases) - 1e-9


def test_optimize_deterministic():
    a = optimize("cf", 2, restarts=3, seed=4).to_json()
    b = optimize("cf", 2, restarts=3, seed=4).to_json()
    assert a == b


def test_optimize_sc():
    rep = optimize("sc", 0)
    assert rep.base == pytest.approx(sc_upper_minimize().factor)
