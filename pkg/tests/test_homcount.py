import itertools
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from ldgraphs import graphs as g
from ldgraphs import homcount as hc
from ldgraphs.graphs import PatternGraph
from ldgraphs.matrices import J

from conftest import random_adj, random_xn


def brute_hom(H, X, injective=False):
    N = len(X)
    tot = 0.0
    for phi in itertools.product(range(N), repeat=H.n):
        if injective and len(set(phi)) < H.n:
            continue
        w = 1.0
        for u, v in H.edges:
            w *= X[phi[u], phi[v]]
        tot += w
    return tot


def test_hom_examples():
    assert hc.hom(g.cycle(3), J(3)).value == 6
    X = 0.3 * J(5)
    assert hc.hom(g.empty(3), X).value == pytest.approx(125)
    for N0 in (4, 5, 6):
        for ell in (3, 4, 5):
            if ell <= N0:
                assert hc.hom(g.cycle(ell), J(N0)).value >= math.perm(N0, ell)


def test_hom_exact_integer_path():
    v = hc.hom(g.cycle(4), J(4))
    assert v.exact and isinstance(v.value, int) and v.value == 84


def test_hom_matches_brute_force(rng):
    pats = [g.cycle(3), g.cycle(4), g.star(3), g.path(4), g.complete(4), g.complete_bipartite(2, 3),
            PatternGraph(4, ((0, 1), (1, 2), (2, 0), (2, 3)))]
    for H in pats:
        X = random_xn(4, rng)
        assert hc.hom(H, X, exact=False).value == pytest.approx(brute_hom(H, X), rel=1e-12)


def test_hom_size_guard():
    with pytest.raises(ValueError):
        hc.hom(g.cycle(9), J(3))


def test_hom_batch(rng):
    A = np.stack([random_adj(7, 0.5, rng) for _ in range(5)])
    out = hc.hom_batch(g.cycle(4), A)
    assert [int(x) for x in out] == [hc.hom(g.cycle(4), a).value for a in A]


def test_cycle_spectral_examples():
    assert hc.hom_cycle_spectral(3, J(4)).value == pytest.approx(24)
    c4 = np.zeros((4, 4))
    for i in range(4):
        c4[i, (i + 1) % 4] = c4[(i + 1) % 4, i] = 1
    assert hc.hom_cycle_spectral(4, c4).value == pytest.approx(32)
    assert hc.hom_cycle_spectral(5, np.zeros((4, 4))).value == 0


def test_cycle_spectral_agreement(rng):
    for N in (5, 10, 20):
        for _ in range(30):
            X = random_xn(N, rng)
            for ell in range(3, 9):
                h = hc.hom(g.cycle(ell), X).value
                assert abs(hc.hom_cycle_spectral(ell, X).value - h) <= 1e-8 * max(1.0, h)


def test_inj_examples(rng):
    A = random_adj(7, 0.4, rng)
    assert hc.inj(g.complete(2), A).value == A.sum()
    assert hc.inj(g.cycle(3), J(4)).value == 24
    assert hc.inj(g.cycle(4), J(3)).value == 0


def test_inj_methods_agree(rng):
    for H in (g.cycle(4), g.star(3), g.complete_bipartite(2, 3), g.path(5)):
        X = random_xn(7, rng)
        a = hc.inj(H, X, method="backtrack").value
        b = hc.inj(H, X, method="mobius").value
        assert a == pytest.approx(b, rel=1e-10)
        assert a == pytest.approx(brute_hom(H, X, injective=True), rel=1e-10) if H.n <= 5 else True
        A = random_adj(7, 0.5, rng)
        assert hc.inj(H, A, method="backtrack").value == hc.inj(H, A, method="mobius").value


def test_inj_le_hom(rng):
    for H in (g.cycle(3), g.cycle(5), g.star(4)):
        X = random_xn(6, rng)
        assert hc.inj(H, X).value <= hc.hom(H, X).value * (1 + 1e-12)


def test_inj_counts_subgraphs_networkx(rng):
    # inj_{K3}(A) = 6 * (number of triangles)
    for _ in range(10):
        A = random_adj(9, 0.5, rng)
        G = nx.from_numpy_array(A)
        tri = sum(nx.triangles(G).values()) // 3
        assert hc.inj(g.cycle(3), A).value == 6 * tri


def test_identity_examples(rng):
    rep = hc.hom_quotient_identity_check(g.cycle(4), J(4).astype(np.int64))
    assert rep.ok and rep.lhs == 84 and len(rep.terms) == 4
    assert sorted(t for _, t in rep.terms) == [12, 24, 24, 24]
    A = random_adj(8, 0.5, rng)
    rep = hc.hom_quotient_identity_check(g.complete(2), A)
    assert rep.ok and rep.lhs == hc.inj(g.complete(2), A).value
    assert hc.hom_quotient_identity_check(g.cycle(3), random_adj(6, 0.6, rng)).ok
    with pytest.raises(ValueError):
        hc.hom_quotient_identity_check(g.cycle(3), 0.5 * J(4))


def test_identity_exhaustive_small_patterns(rng):
    from test_graphs import atlas_patterns

    mats = [random_adj(int(rng.integers(3, 9)), 0.5, rng) for _ in range(4)]
    for H in atlas_patterns(5):
        for A in mats:
            assert hc.hom_quotient_identity_check(H, A).ok


def test_dir_derivative_examples(rng):
    W = random_xn(6, rng)
    Z = random_xn(6, rng) - 0.5 * J(6)
    assert hc.dir_derivative(g.complete(2), W, Z) == pytest.approx(2 * np.triu(Z, 1).sum())
    N, p = 7, 0.3
    d = hc.dir_derivative(g.cycle(3), p * J(N), J(N))
    assert d == pytest.approx(3 * p ** 2 * N * (N - 1) * (N - 2), rel=1e-12)


@pytest.mark.parametrize("H", [g.cycle(4), g.cycle(3), g.star(3), g.complete(2)], ids=str)
def test_dir_derivative_finite_differences(H, rng):
    for _ in range(5):
        N = 10
        W = random_xn(N, rng)
        Z = rng.normal(size=(N, N))
        Z = np.triu(Z, 1)
        Z = Z + Z.T
        h = 1e-5
        fd = (hc.hom(H, W + h * Z, exact=False).value - hc.hom(H, W - h * Z, exact=False).value) / (2 * h)
        d = hc.dir_derivative(H, W, Z)
        assert abs(d - fd) <= 1e-5 * abs(d)
        assert abs(d) <= hc.dir_derivative_bound(H, W, Z) * (1 + 1e-12)


def test_gradient_symmetric_and_consistent(rng):
    for H in (g.cycle(3), g.cycle(5), g.star(3), g.path(4)):
        W = random_xn(8, rng)
        val, G = hc.hom_grad(H, W)
        assert np.array_equal(G, G.T)
        assert np.all(np.diag(G) == 0)
        assert val == pytest.approx(hc.hom(H, W).value, rel=1e-12)
        Z = random_xn(8, rng)
        assert np.sum(np.triu(G * Z, 1)) == pytest.approx(hc.dir_derivative(H, W, Z), rel=1e-10)


def test_hom_density():
    N, p = 9, 0.4
    assert hc.hom_density(g.complete(2), p * J(N)) == pytest.approx(p * (N - 1) / N)
    assert hc.hom_density(g.cycle(3), np.zeros((4, 4))) == 0
    assert 0 <= hc.hom_density(g.cycle(5), J(6)) <= 1


def test_sidorenko_for_seminorming_patterns(rng):
    for H in (g.cycle(4), g.cycle(6), g.complete_bipartite(2, 2)):
        for _ in range(200):
            X = random_xn(int(rng.integers(2, 8)), rng) ** rng.uniform(0.2, 4)
            lhs = hc.hom_density(H, X)
            rhs = hc.hom_density(g.complete(2), X) ** H.m
            assert lhs >= rhs - 1e-10


@given(arrays(np.float64, (5, 5), elements=st.floats(0, 1)), arrays(np.float64, (5, 5), elements=st.floats(0, 1)))
def test_hom_monotone(a, b):
    X = np.triu(a, 1)
    X = X + X.T
    Y = np.minimum(1.0, X + np.triu(b, 1) + np.triu(b, 1).T)
    for H in (g.cycle(3), g.star(3)):
        assert hc.hom(H, X, exact=False).value <= hc.hom(H, Y, exact=False).value * (1 + 1e-12) + 1e-12


@given(st.integers(1, 6), st.integers(1, 6))
def test_empty_pattern_counts(n, N):
    assert hc.hom(g.empty(n), 0.5 * J(N), exact=False).value == pytest.approx(float(N) ** n)
