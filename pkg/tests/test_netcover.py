import math

import numpy as np
import pytest

from ldgraphs import graphs as g
from ldgraphs import netcover as nc
from ldgraphs.matrices import J

from conftest import random_xn


def test_mat_assemble_rank_one():
    N = 6
    u = np.ones((N, 1)) / math.sqrt(N)
    X = nc.mat_assemble(nc.SpectralPoint(np.array([N - 1.0]), u))
    assert np.allclose(X, (N - 1) / N * np.ones((N, N)))


def test_mat_assemble_round_trip(rng):
    for _ in range(10):
        pt = nc.random_rank_point(12, 4, rng)
        X = nc.mat_assemble(pt)
        back = nc.spectral_point(X, 4)
        assert np.allclose(nc.mat_assemble(back), X, atol=1e-10)
        assert back.is_ordered()
    Q, _ = np.linalg.qr(rng.normal(size=(8, 3)))
    assert np.allclose(nc.mat_assemble(nc.SpectralPoint(np.zeros(3), Q)), 0)
    with pytest.raises(ValueError):
        nc.mat_assemble(nc.SpectralPoint(np.ones(2), 2 * Q[:, :2]))
    with pytest.raises(ValueError):
        nc.SpectralPoint(np.ones(3), Q[:, :2])


def test_orthonormalize(rng):
    V = nc.orthonormalize(rng.normal(size=(10, 3)))
    assert np.allclose(V.T @ V, np.eye(3))


def test_net_bound_zero_perturbation(rng):
    X = random_xn(15, rng)
    pt = nc.spectral_point(X, 3)
    lhs, rhs = nc.hs_chain(pt, pt)
    assert lhs == 0 and rhs == 0


def test_net_bound_random(rng):
    X = random_xn(30, rng)
    for d in (1e-6, 1e-3, 1e-1):
        rep = nc.net_perturbation_bound(X, 5, d, d, trials=50, seed=1)
        assert rep.ok and rep.min_slack >= 0
        assert rep.rank_one_identity_err <= 1e-12


def test_rank_one_identity(rng):
    for _ in range(100):
        u, v = rng.normal(size=(2, 9))
        u /= np.linalg.norm(u)
        v /= np.linalg.norm(v)
        assert nc.rank_one_gap(u, v) <= 1e-13


def test_trace_identity(rng):
    Y = nc.mat_assemble(nc.random_rank_point(20, 3, rng))
    rep = nc.orthogonal_residual_trace_identity(Y, np.zeros((20, 20)))
    assert rep.ok
    M = rng.normal(size=(20, 20))
    Z = nc.residual_in_kernel(Y, M + M.T)
    rep = nc.orthogonal_residual_trace_identity(Y, Z, alphas=(2.5, 3.0))
    assert rep.ok and max(rep.trace_errors.values()) <= 1e-8
    with pytest.raises(ValueError, match="ker"):
        nc.orthogonal_residual_trace_identity(Y, M + M.T)


def test_kernel_projector(rng):
    Y = nc.mat_assemble(nc.random_rank_point(10, 2, rng))
    P = nc.kernel_projector(Y)
    assert np.allclose(P @ P, P, atol=1e-10)
    assert np.trace(P) == pytest.approx(8)
    assert np.allclose(Y @ P, 0, atol=1e-9)


def test_split_containment(rng):
    for R in (1, 3, 6):
        X = random_xn(25, rng)
        for ell in (3, 4, 6):
            rep = nc.split_containment(X, R, ell, 1e-6, seed=R)
            assert rep.ok, rep


def test_cycle_fluctuation_zero_residual(rng):
    Y = nc.mat_assemble(nc.random_rank_point(10, 2, rng))
    diff, zterm, slack = nc.cycle_fluctuation_bound(Y, Y, np.zeros_like(Y), 4)
    assert diff == pytest.approx(0, abs=1e-9) and zterm == 0 and slack == 0


def test_cycle_fluctuation_checks():
    rep = nc.cycle_fluctuation_check(30, 4, 4, 0.3, 0.2, trials=50, seed=0)
    assert rep.ok
    rep = nc.cycle_fluctuation_check(20, 3, 4, 0.5, 0.3, trials=20, seed=1, single=True)
    # one eigenvalue in Z and exact split: the bound is attained
    assert rep.ok and rep.max_ratio == pytest.approx(1.0, abs=1e-4)


def test_schatten_fluctuation(rng):
    Y = nc.mat_assemble(nc.random_rank_point(15, 3, rng))
    M = rng.normal(size=(15, 15))
    Z = nc.residual_in_kernel(Y, M + M.T)
    E = 1e-5 * rng.normal(size=(15, 15))
    E = E + E.T
    for a in (2.5, 3.0, 5.0):
        diff, zterm, slack = nc.schatten_fluctuation_bound(Y + Z + E, Y, Z, a)
        assert diff <= zterm + slack


def test_hom_fluctuation_identical_points(rng):
    c = 0.3 * J(8)
    rep = nc.hom_fluctuation_check(g.cycle(3), c, 0.3, pairs=[(c, c)])
    assert rep.ok and rep.max_ratio_integral == 0


def test_hom_fluctuation_k2_equality():
    # the rank-one direction 11^T with its diagonal removed: sum(dX) = N ||dX||_op
    N, s = 9, 0.1
    Y = 0.3 * J(N)
    X = Y + s * J(N)
    rep = nc.hom_fluctuation_check(g.complete(2), Y, 0.3, pairs=[(X, Y)])
    assert rep.max_ratio_integral == pytest.approx(1.0, rel=1e-10)
    assert rep.ok


@pytest.mark.parametrize("H,trials", [(g.cycle(3), 500), (g.cycle(4), 60), (g.star(3), 60)], ids=str)
def test_hom_fluctuation_random(H, trials):
    N, p = 25, 0.3
    rep = nc.hom_fluctuation_check(H, p * J(N), p, trials=trials, seed=2)
    assert rep.ok
    assert rep.max_ratio_integral <= rep.max_ratio_sampled * (1 + 1e-12) or rep.max_ratio_sampled <= 1
    assert rep.max_ratio_sampled <= 1 and rep.max_ratio_trivial <= 1


def test_op_ball():
    B = nc.OpBall(0.2 * J(5), 0.5)
    assert B.contains(0.2 * J(5))
    assert B.contains(0.2 * J(5) + 0.1 * J(5))
    assert not B.contains(0.2 * J(5) + 0.2 * J(5))
    with pytest.raises(ValueError):
        nc.OpBall(J(3), 0.0)


def test_inequality_suite():
    res = nc.inequality_suite(trials=2500, seed=3)
    total = sum(s.trials for s in res.values())
    assert total >= 10_000
    for s in res.values():
        assert s.ok, s
