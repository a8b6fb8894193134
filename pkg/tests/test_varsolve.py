import math

import numpy as np
import pytest

from ldgraphs import graphs as g
from ldgraphs import varsolve as vs
from ldgraphs.homcount import hom
from ldgraphs.matrices import J, as_array, schatten
from ldgraphs.rates import ip_matrix, ip_scalar, n_pairs


def test_problem_validation():
    with pytest.raises(ValueError):
        vs.VarProblem("hom", 10, 0.2, 2.0)
    with pytest.raises(ValueError):
        vs.VarProblem("schatten", 10, 0.2, 0.1)
    with pytest.raises(ValueError):
        vs.VarProblem("cut", 10, 0.2, 1.0)
    with pytest.raises(ValueError):
        vs.VarProblem("edges", 10, 1.2, 1.0)
    with pytest.raises(ValueError):
        vs.VarProblem("edges", 10, 0.2, 1.0, direction="up")


def test_thresholds():
    assert vs.VarProblem("hom", 10, 0.5, 2.0, pattern=g.cycle(3)).threshold == pytest.approx(2 * 1000 * 0.125)
    assert vs.VarProblem("schatten", 10, 0.5, 0.2, alpha=4).threshold == pytest.approx(1.8)
    assert vs.VarProblem("edges", 10, 0.5, 2.0).threshold == pytest.approx(45)


def test_hom_J_and_schatten_J():
    for N in (3, 5, 8):
        assert vs.hom_J(g.cycle(3), N) == pytest.approx(N * (N - 1) * (N - 2))
        assert vs.hom_J(g.star(2), N) == pytest.approx(N * (N - 1) ** 2)
        for a in (1, 2, 4, np.inf):
            assert vs.schatten_J(N, a) == pytest.approx(schatten(J(N), a), rel=1e-10)


def test_k2_oracle():
    # hom_{K2}(cJ) = c N (N-1) >= t N^2 p is solved by c = t p N/(N-1); Jensen makes it optimal.
    N, p, t = 12, 0.2, 2.0
    prob = vs.VarProblem("hom", N, p, t, pattern=g.complete(2))
    sol = vs.solve_phi(prob, vs.SolveOptions(threads=1))
    c = t * p * N / (N - 1)
    exact = n_pairs(N) * ip_scalar(p, c)
    assert sol.objective == pytest.approx(exact, rel=1e-6)
    assert sol.feasibility_gap <= 1e-9


def test_edges_lower_exact():
    N, p, t = 10, 0.4, 0.5
    prob = vs.VarProblem("edges", N, p, t, direction="lower")
    sol = vs.solve_psi(prob, vs.SolveOptions(threads=1))
    assert sol.certified_bound == pytest.approx(n_pairs(N) * ip_scalar(p, t * p))
    assert sol.objective == pytest.approx(sol.certified_bound, rel=1e-6)


def test_warm_start_dominance():
    prob = vs.VarProblem("hom", 60, 0.2, 2.0, pattern=g.cycle(3))
    sol = vs.solve_phi(prob, vs.SolveOptions(threads=1))
    assert sol.objective <= sol.best_candidate_cost * (1 + 1e-12)
    X = as_array(sol.X)
    assert hom(g.cycle(3), X, exact=False).value >= prob.threshold * (1 - 1e-9)
    assert ip_matrix(0.2, X) == pytest.approx(sol.objective, rel=1e-9)
    assert np.allclose(X, X.T) and np.all(np.diag(X) == 0)
    assert X.min() >= 0 and X.max() <= 1


def test_level_one_costs_at_most_uniform():
    # at t = 1 the only gap is hom(pJ) = p^3 N(N-1)(N-2) < N^3 p^3
    N, p = 20, 0.3
    prob = vs.VarProblem("hom", N, p, 1.0, pattern=g.cycle(3))
    sol = vs.solve_phi(prob, vs.SolveOptions(threads=1))
    c = p * (N ** 3 / (N * (N - 1) * (N - 2))) ** (1 / 3)
    assert sol.objective <= n_pairs(N) * ip_scalar(p, c) * (1 + 1e-9)
    assert vs.uniform_level(prob) == pytest.approx(c)


def test_psi_sandwich_and_cert():
    for alpha in (1, 2, 4, np.inf):
        N, p, q = 8, 0.5, 0.25
        prob = vs.VarProblem("schatten", N, p, q, direction="lower", alpha=alpha)
        sol = vs.solve_psi(prob, vs.SolveOptions(threads=1))
        exact = vs.constant_family_value(prob)
        assert sol.certified_bound <= exact + 1e-9
        assert exact <= sol.objective * (1 + 1e-6) + 1e-9
        assert sol.objective == pytest.approx(exact, rel=1e-4)


def test_certified_convex_psi_examples():
    assert vs.certified_convex_psi(4, 10, 0.5, 0.25) == pytest.approx(45 * ip_scalar(0.5, 0.25))
    assert vs.certified_convex_psi(2, 10, 0.5, 0.5) == 0
    assert vs.certified_convex_psi(g.cycle(4), 10, 0.3, 0.1) == pytest.approx(45 * ip_scalar(0.3, 0.1))
    with pytest.raises(ValueError):
        vs.certified_convex_psi(g.cycle(3), 10, 0.5, 0.25)
    with pytest.raises(ValueError):
        vs.certified_convex_psi(0.5, 10, 0.5, 0.25)


def test_solver_deterministic_across_threads():
    prob = vs.VarProblem("hom", 25, 0.25, 2.5, pattern=g.cycle(4))
    a = vs.solve_phi(prob, vs.SolveOptions(seed=3, threads=1))
    b = vs.solve_phi(prob, vs.SolveOptions(seed=3, threads=3))
    assert a.objective == b.objective
    assert np.array_equal(as_array(a.X), as_array(b.X))
    assert a.start_label == b.start_label


def test_direction_guards():
    up = vs.VarProblem("edges", 6, 0.3, 2.0)
    lo = vs.VarProblem("edges", 6, 0.3, 0.5, direction="lower")
    with pytest.raises(ValueError):
        vs.solve_psi(up)
    with pytest.raises(ValueError):
        vs.solve_phi(lo)


def test_ip_polyhedron_single_halfspace():
    # sum x_k <= b with d coordinates: by symmetry the optimum is x_k = b/d
    d, p, b = 6, 0.5, 1.2
    res = vs.ip_polyhedron(np.ones((1, d)), np.array([b]), p, interior=np.full(d, 0.1))
    exact = d * ip_scalar(p, b / d)
    assert res.dual <= exact + 1e-9
    assert res.primal >= exact - 1e-9
    assert res.gap <= 1e-6
    # an inactive constraint costs nothing
    res = vs.ip_polyhedron(np.ones((1, d)), np.array([5.0]), p)
    assert res.dual == pytest.approx(0, abs=1e-9) and res.primal == pytest.approx(0, abs=1e-9)


def test_constant_family_upper_infeasible():
    prob = vs.VarProblem("edges", 6, 0.5, 3.0)
    assert vs.constant_family_value(prob) == math.inf


@pytest.mark.parametrize("H", [g.cycle(4), g.cycle(3), g.star(2)], ids=str)
def test_lower_level_one_is_free(H):
    # hom_H(pJ) = p^m hom_H(J) <= p^m N^n, so pJ itself meets the lower threshold at t = 1
    prob = vs.VarProblem("hom", 12, 0.3, 1.0, direction="lower", pattern=H)
    sol = vs.solve(prob, vs.SolveOptions(threads=1))
    assert sol.objective == pytest.approx(0.0, abs=1e-12)
