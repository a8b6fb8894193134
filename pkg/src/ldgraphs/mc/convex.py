"""Exact checks of mu_p(K) <= exp(-I_p(K)) for closed convex K.

K is given in edge coordinates x in [0,1]^{C(N,2)} (upper triangle,
row-major), either as linear inequalities A x <= b, as a Schatten ball
{||X||_{S_alpha} <= radius}, or as the whole cube. mu_p(K) is summed over
every labelled graph; I_p(K) comes from the Lagrangian dual (a certified
lower bound, reported together with a primal value and the gap) or from the
closed form over constant matrices for Schatten balls.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..matrices import schatten_from_eigs
from ..rates import ip_scalar, n_pairs
from ..varsolve import ip_polyhedron, schatten_J
from .enumeration import MAX_ENUM_N, counts_by_edges, graph_table, weight_sum
from .functionals import SchattenNorm
from .sampling import n_edges

SLACK = 1e-9


@dataclass
class ConvexSet:
    kind: str                 # "halfspaces" | "schatten" | "cube"
    A: np.ndarray | None = None
    b: np.ndarray | None = None
    alpha: float | None = None
    radius: float | None = None
    interior: np.ndarray | None = None
    label: str = ""


@dataclass
class ConvexReport:
    label: str
    N: int
    p: float
    mu: float           # exact mu_p(K)
    ip_lower: float     # certified lower bound on I_p(K)
    ip_upper: float     # I_p at a feasible point
    bound: float        # exp(-ip_lower)
    margin: float       # bound - mu

    def holds(self, tol: float = 1e-6) -> bool:
        return self.mu <= self.bound + tol


_EDGE_CACHE: dict = {}


def all_edge_vectors(N: int) -> np.ndarray:
    if N > MAX_ENUM_N:
        raise ValueError(f"exact enumeration supports N <= {MAX_ENUM_N}")
    if N not in _EDGE_CACHE:
        d = n_edges(N)
        masks = np.arange(1 << d, dtype=np.int64)
        _EDGE_CACHE[N] = ((masks[:, None] >> np.arange(d)) & 1).astype(np.uint8)
    return _EDGE_CACHE[N]


def verify_convex_bound(K: ConvexSet, N: int, p: float) -> ConvexReport:
    d = n_edges(N)
    E = all_edge_vectors(N)
    pops = E.sum(axis=1, dtype=np.int64)
    if K.kind == "cube":
        inside = np.ones(len(E), dtype=bool)
        lo = hi = 0.0
    elif K.kind == "halfspaces":
        A = np.atleast_2d(K.A)
        lhs = E.astype(np.float64) @ A.T
        inside = np.all(lhs <= K.b[None, :] + SLACK * np.maximum(1.0, np.abs(K.b))[None, :], axis=1)
        pv = ip_polyhedron(A, K.b, p, interior=K.interior)
        lo, hi = pv.dual, pv.primal
    elif K.kind == "schatten":
        vals, _ = graph_table(SchattenNorm(K.alpha), N)
        inside = vals <= K.radius + SLACK * max(1.0, K.radius)
        c = min(p, K.radius / schatten_J(N, K.alpha))
        lo = hi = n_pairs(N) * ip_scalar(p, c)
    else:
        raise ValueError(f"unknown convex set kind {K.kind!r}")
    mu = weight_sum(counts_by_edges(inside, pops, d), p, d)
    bound = math.exp(-lo)
    return ConvexReport(K.label or K.kind, N, p, mu, lo, hi, bound, bound - mu)


def random_convex_sets(N: int, p: float, count: int, rng: np.random.Generator) -> list:
    """A mix of edge-sum caps, random polytopes around a random interior point, and Schatten balls."""
    d = n_edges(N)
    out = [ConvexSet("cube", label="cube")]
    kinds = ["sum", "poly", "poly", "schatten"]
    i = 0
    while len(out) < count:
        kind = kinds[i % len(kinds)]
        i += 1
        if kind == "sum":
            c = rng.uniform(0.05, 1.2) * p * d
            x0 = np.full(d, min(c / d, 1.0) * 0.5)
            out.append(ConvexSet("halfspaces", np.ones((1, d)), np.array([c]), interior=x0, label=f"sum<= {c:.4g}"))
        elif kind == "poly":
            m = int(rng.integers(1, 4))
            A = rng.normal(size=(m, d))
            A[0] = np.abs(A[0])  # at least one constraint pushes edge weight down
            x0 = rng.uniform(0.0, 1.0, size=d) * rng.uniform(0.2, 1.0)
            b = A @ x0 + rng.uniform(0.01, 0.5, size=m) * np.abs(A).sum(axis=1) * 0.1
            out.append(ConvexSet("halfspaces", A, b, interior=x0, label=f"poly{m}"))
        else:
            alpha = [2.0, 3.0, 4.0, np.inf][int(rng.integers(0, 4))]
            radius = rng.uniform(0.3, 1.1) * p * schatten_J(N, alpha)
            out.append(ConvexSet("schatten", alpha=alpha, radius=radius, label=f"S{alpha}<= {radius:.4g}"))
    return out
