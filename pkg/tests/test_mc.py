import math
from fractions import Fraction
from itertools import combinations

import networkx as nx
import numpy as np
import pytest

from ldgraphs import graphs as g
from ldgraphs.homcount import hom
from ldgraphs.matrices import as_array
from ldgraphs.mc import (EdgeCount, HomCount, SchattenNorm, TailProblem, TiltSpec, enumerate_tail,
                         functional_from_name, is_tail, plain_mc, sample_edges, sample_gnp,
                         tilt_ball_probability, to_adjacency)
from ldgraphs.mc.convex import ConvexSet, random_convex_sets, verify_convex_bound
from ldgraphs.mc.spectral import spectral_tail_study
from ldgraphs.mc.tilted import clique_event_logprob, hub_event_logprob, log_dq_dmup


def test_sample_gnp_extremes_and_determinism():
    A0 = as_array(sample_gnp(8, 0.0, seed=1))
    A1 = as_array(sample_gnp(8, 1.0, seed=1))
    assert A0.sum() == 0
    assert A1.sum() == 8 * 7
    a = as_array(sample_gnp(20, 0.3, seed=5, index=7))
    b = as_array(sample_gnp(20, 0.3, seed=5, index=7))
    c = as_array(sample_gnp(20, 0.3, seed=6, index=7))
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    assert np.array_equal(a, a.T) and np.all(np.diag(a) == 0)


def test_sample_edges_chunk_independent():
    full = sample_edges(7, 0.4, 3, 0, 50)
    parts = np.vstack([sample_edges(7, 0.4, 3, s, 10) for s in range(0, 50, 10)])
    assert np.array_equal(full, parts)


def test_edge_frequency():
    E = sample_edges(10, 0.3, 11, 0, 4000)
    assert abs(E.mean() - 0.3) < 4 * math.sqrt(0.21 / E.size)


def test_functionals():
    E = sample_edges(6, 0.5, 2, 0, 20)
    A = to_adjacency(E, 6)
    assert np.array_equal(EdgeCount().batch(A), E.sum(axis=1))
    h = HomCount(g.cycle(3)).batch(A)
    for a, v in zip(A, h):
        G = nx.from_numpy_array(a)
        assert v == 2 * sum(nx.triangles(G).values())
    s = SchattenNorm(2).batch(A)
    assert np.allclose(s, np.sqrt(2 * E.sum(axis=1)))
    assert functional_from_name("schatten:inf").alpha == np.inf
    assert functional_from_name("C4").name == "hom[C4]"
    with pytest.raises(ValueError):
        TailProblem(EdgeCount(), 5, 0.5, "gt", 1)


def test_enumerate_oracles():
    r = enumerate_tail(TailProblem(HomCount(g.cycle(3)), 4, 0.5, "ge", 6), exact=True)
    assert r.value == Fraction(23, 64) and r.mode == "exact"
    assert enumerate_tail(TailProblem(EdgeCount(), 5, 0.3, "ge", 0), exact=True).value == 1
    p = 0.3
    r = enumerate_tail(TailProblem(EdgeCount(), 3, p, "ge", 1))
    assert r.value == pytest.approx(1 - (1 - p) ** 3, rel=1e-12)
    r = enumerate_tail(TailProblem(EdgeCount(), 6, 0.5, "le", 2), exact=True)
    assert r.value == Fraction(1 + 15 + 105, 2 ** 15)


def test_enumerate_brute_force():
    N, p = 4, 0.35
    pairs = list(combinations(range(N), 2))
    tot = 0.0
    for mask in range(1 << len(pairs)):
        A = np.zeros((N, N))
        k = 0
        for b, (i, j) in enumerate(pairs):
            if mask >> b & 1:
                A[i, j] = A[j, i] = 1
                k += 1
        if hom(g.cycle(4), A).value <= 20:
            tot += p ** k * (1 - p) ** (len(pairs) - k)
    r = enumerate_tail(TailProblem(HomCount(g.cycle(4)), N, p, "le", 20))
    assert r.value == pytest.approx(tot, rel=1e-12)


def test_plain_mc_and_untilted_is_agree():
    prob = TailProblem(HomCount(g.cycle(3)), 4, 0.5, "ge", 6)
    mc = plain_mc(prob, 20000, seed=4)
    assert abs(mc.value - 23 / 64) <= 4 * mc.std_error
    same = is_tail(prob, TiltSpec("product", r=0.5), 20000, seed=4)
    assert same.value == mc.value and same.mode == "monte-carlo"


def test_product_tilt_lower_tail():
    prob = TailProblem(EdgeCount(), 6, 0.5, "le", 2)
    est = is_tail(prob, TiltSpec("product", r=0.2), 50000, seed=0)
    exact = 121 / 32768
    assert abs(est.value - exact) / exact < 0.05
    assert est.mode == "importance-sampling"
    assert abs(est.mean_lr - 1) <= 4 * est.lr_std_error


def test_mixture_tilt_upper_tail():
    N, p = 6, 0.3
    prob = TailProblem(HomCount(g.cycle(3)), N, p, "ge", 60)
    exact = float(enumerate_tail(prob).value)
    mix = TiltSpec("mixture", components=(TiltSpec("clique", N0=4), TiltSpec("hub", k=1), TiltSpec("product", r=0.5)),
                   weights=(0.4, 0.3, 0.3))
    est = is_tail(prob, mix, 40000, seed=2)
    assert abs(est.value - exact) / exact < 0.1


def test_tilt_validation():
    for kw in [dict(kind="product", r=1.0), dict(kind="clique", N0=1), dict(kind="hub", k=0), dict(kind="blob"),
               dict(kind="mixture", components=(TiltSpec("product", r=0.3),), weights=(0.5,))]:
        with pytest.raises(ValueError):
            TiltSpec(**kw)


def test_clique_density_normalised():
    # the clique proposal density integrates to 1 under mu_p: check by enumeration at N = 5
    N, p, N0 = 5, 0.4, 3
    d = N * (N - 1) // 2
    masks = np.arange(1 << d)
    E = ((masks[:, None] >> np.arange(d)) & 1).astype(np.uint8)
    k = E.sum(axis=1)
    w = p ** k * (1 - p) ** (d - k)
    for spec in (TiltSpec("clique", N0=N0), TiltSpec("hub", k=2)):
        q = np.exp(log_dq_dmup(spec, E, N, p))
        assert np.sum(w * q) == pytest.approx(1.0, rel=1e-12)


def test_planted_logprobs():
    assert clique_event_logprob(4, 0.5) == pytest.approx(6 * math.log(0.5))
    assert hub_event_logprob(10, 2, 0.5) == pytest.approx((1 + 16) * math.log(0.5))


def test_convex_sets_bound():
    rng = np.random.default_rng(0)
    for K in random_convex_sets(5, 0.4, 12, rng):
        rep = verify_convex_bound(K, 5, 0.4)
        assert rep.holds()
        assert rep.ip_lower <= rep.ip_upper + 1e-9
    rep = verify_convex_bound(ConvexSet("cube"), 4, 0.3)
    assert rep.mu == pytest.approx(1.0) and rep.bound == 1.0


def test_spectral_study_deterministic_checks():
    rep = spectral_tail_study(30, 0.2, [1, 3, 6], 1.0, samples=200, seed=1)
    assert rep.ok
    assert 0 <= rep.hs_exceed_2 <= 1


def test_tilt_ball_sanity():
    rep = tilt_ball_probability(8, 0.4, 0.3, "calibrate", 2, samples=2000, seed=0)
    assert rep.proposal_mass > 0.5
    assert rep.estimate >= rep.bound
    with pytest.raises(ValueError):
        tilt_ball_probability(8, 0.4, 0.5, 0.1, 2, samples=10, seed=0)
