"""Closed-form rate quantities for subgraph-count tails.

I_p (Bernoulli relative entropy), the independence-polynomial root theta_H(u),
the leading constant c_H(u), predicted upper-tail rates, the planted
clique / hub / uniform candidate matrices, and the calculators for the
error terms of the quantitative cycle-count estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import rel_entr

from . import homcount
from .graphs import PatternGraph, degree_profile, independence_polynomial, poly_eval
from .matrices import SymMatrix, J, as_array


@dataclass(frozen=True)
class RateParams:
    N: int
    p: float
    t: float
    direction: str = "upper"

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError("p must lie in (0, 1)")
        if self.N < 1:
            raise ValueError("N must be positive")
        if self.direction == "upper":
            if not self.t > 1.0:
                raise ValueError("upper tail needs t = 1 + u > 1")
        elif self.direction == "lower":
            if not 0.0 <= self.t < 1.0:
                raise ValueError("lower tail needs t in [0, 1)")
        else:
            raise ValueError(f"direction must be 'upper' or 'lower', got {self.direction!r}")

    @property
    def u(self) -> float:
        return self.t - 1.0


# ---------------------------------------------------------------- relative entropy

def ip_scalar(p: float, x):
    """x log(x/p) + (1-x) log((1-x)/(1-p)), with 0 log 0 = 0. Vectorised in x."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    x = np.asarray(x, dtype=np.float64)
    if np.any((x < 0) | (x > 1)) or np.any(np.isnan(x)):
        raise ValueError("x must lie in [0, 1]")
    out = rel_entr(x, p) + rel_entr(1.0 - x, 1.0 - p)
    return float(out) if out.ndim == 0 else out


def ip_deriv(p: float, x):
    """d I_p / dx = logit(x) - logit(p)."""
    x = np.asarray(x, dtype=np.float64)
    return np.log(x / (1 - x)) - math.log(p / (1 - p))


def ip_matrix(p: float, X) -> float:
    """sum_{i<j} I_p(x_ij)."""
    a = as_array(X)
    i, j = np.triu_indices(a.shape[0], 1)
    return float(np.sum(ip_scalar(p, a[i, j])))


def ip_upper(p: float, x: np.ndarray) -> float:
    return float(np.sum(ip_scalar(p, x)))


def n_pairs(N: int) -> int:
    return N * (N - 1) // 2


# ---------------------------------------------------------------- theta and c_H

@lru_cache(maxsize=None)
def _core_poly(H: PatternGraph) -> tuple:
    return tuple(independence_polynomial(degree_profile(H).max_degree_core))


def theta(H: PatternGraph, u: float) -> float:
    """Unique theta > 0 with P_{H*}(theta) = 1 + u, by bisection on [0, u]."""
    if not u > 0:
        raise ValueError("u must be positive")
    prof = degree_profile(H)
    if prof.max_degree < 2:
        raise ValueError("theta needs max degree at least 2")
    coeffs = _core_poly(H)
    target = 1.0 + u
    lo, hi = 0.0, float(u)  # P(u) >= 1 + a_1 u >= 1 + u
    if poly_eval(coeffs, hi) < target:
        raise ArithmeticError(f"bracket [0, {u}] does not contain the root")
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if poly_eval(coeffs, mid) < target:
            lo = mid
        else:
            hi = mid
    r = hi if abs(poly_eval(coeffs, hi) - target) <= abs(poly_eval(coeffs, lo) - target) else lo
    if abs(poly_eval(coeffs, r) - target) > 1e-12 * target:
        raise ArithmeticError(f"bisection did not converge: bracket [{lo!r}, {hi!r}]")
    return r


def is_regular(H: PatternGraph) -> bool:
    d = H.degrees
    return H.m > 0 and bool(np.all(d == d[0]))


def c_H(H: PatternGraph, u: float) -> float:
    th = theta(H, u)
    if is_regular(H):
        return min(th, 0.5 * u ** (2.0 / H.n))
    return th


def c3_closed(u: float) -> float:
    return u / 3.0 if u <= 27.0 / 8.0 else 0.5 * u ** (2.0 / 3.0)


def c4_closed(u: float) -> float:
    return -1.0 + math.sqrt(1.0 + u / 2.0) if u <= 16.0 else 0.5 * math.sqrt(u)


def predicted_upper_rate(H: PatternGraph, N: int, p: float, u: float) -> float:
    """c_H(u) N^2 p^Delta log(1/p)."""
    Delta = degree_profile(H).max_degree
    return c_H(H, u) * N ** 2 * p ** Delta * math.log(1.0 / p)


# ---------------------------------------------------------------- candidates

@dataclass
class CandidateMatrix:
    matrix: SymMatrix
    ip_cost: float
    label: str
    hom_values: dict = field(default_factory=dict)
    feasible: dict = field(default_factory=dict)
    size: int = 0  # planted block size (clique N0 or hub k)


def threshold(H: PatternGraph, N: int, p: float, t: float) -> float:
    return t * float(N) ** H.n * p ** H.m


def _finish(mat, p, label, size, patterns, t, direction):
    X = SymMatrix(mat)
    cand = CandidateMatrix(X, ip_matrix(p, X), label, size=size)
    for H in patterns:
        v = float(homcount.hom(H, X, exact=False).value)
        cand.hom_values[H.label()] = v
        if t is not None:
            thr = threshold(H, X.N, p, t)
            cand.feasible[H.label()] = v >= thr if direction == "upper" else v <= thr
    return cand


def clique_block(N: int, p: float, N0: int) -> np.ndarray:
    if not 0 <= N0 <= N:
        raise ValueError(f"planted block of size {N0} exceeds N={N}")
    a = p * J(N)
    a[:N0, :N0] = 1.0
    np.fill_diagonal(a, 0.0)
    return a


def clique_candidate(N: int, p: float, a: float, patterns=(), t=None, N0: int | None = None) -> CandidateMatrix:
    """p everywhere, 1 on a planted block of size N0 = floor(a N p)."""
    if N0 is None:
        N0 = int(math.floor(a * N * p))
    return _finish(clique_block(N, p, N0), p, "clique", N0, patterns, t, "upper")


def hub_block(N: int, p: float, k: int) -> np.ndarray:
    if not 0 <= k <= N:
        raise ValueError(f"hub of size {k} exceeds N={N}")
    a = p * J(N)
    a[:k, :] = 1.0
    a[:, :k] = 1.0
    np.fill_diagonal(a, 0.0)
    return a


def hub_candidate(N: int, p: float, b: float, Delta: int = 2, patterns=(), t=None, k: int | None = None) -> CandidateMatrix:
    """p everywhere, with the first floor(b N p^Delta) vertices joined to all others."""
    if k is None:
        k = int(math.floor(b * N * p ** Delta))
    return _finish(hub_block(N, p, k), p, "hub", k, patterns, t, "upper")


def uniform_candidate(N: int, p: float, b: float, patterns=(), t=None, direction: str = "upper") -> CandidateMatrix:
    """Constant matrix b p J."""
    if not 0.0 <= b * p <= 1.0:
        raise ValueError("b p must lie in [0, 1]")
    return _finish(b * p * J(N), p, "uniform", N, patterns, t, direction)


def clique_cost(N0: int, p: float) -> float:
    return n_pairs(N0) * math.log(1.0 / p)


def hub_cost(N: int, k: int, p: float) -> float:
    pairs = n_pairs(k) + k * (N - k)
    return pairs * math.log(1.0 / p)


# ---------------------------------------------------------------- quantitative terms

@dataclass(frozen=True)
class QuantTerms:
    eps_plus: float
    eps_minus: float
    complexity: float
    p_excep_plus: float
    p_excep_minus: float


def quant_terms(ell: int, N: int, p: float, K: float, R: float, c_plus: float = 1.0, c_minus: float = 1.0) -> QuantTerms:
    """Fluctuation terms, entropy term and exception probabilities of the cycle-count estimate.

    The absolute constants c_plus, c_minus are not determined by the theory;
    the default 1 is a placeholder.
    """
    if not 1 <= R <= N:
        raise ValueError("R must lie in [1, N]")
    if K < 1:
        raise ValueError("K must be at least 1")
    g = 0.5 - 1.0 / ell
    eps_plus = 1.0 / (N ** g * math.sqrt(p)) + K / R ** g
    eps_minus = K / (math.sqrt(p) * R ** g)
    complexity = ell * R * N * math.log(N)
    p_plus = 4 * N * math.exp(-c_plus * K ** 2 * N ** 2 * p ** 2)
    p_minus = math.exp(-c_minus * K ** 2 * N ** 2 * p)
    return QuantTerms(eps_plus, eps_minus, complexity, p_plus, p_minus)


def take_kr(ell: int, N: int, p: float, W: float, direction: str = "upper") -> tuple:
    """The (K, R) choices that make the fluctuation term at most 1/W."""
    if direction == "upper":
        K = math.sqrt(W ** 2 * math.log(1.0 / p))
        R = (W ** 4 * math.log(N)) ** (ell / (ell - 2.0))
    else:
        K = W
        R = (W ** 4 / p) ** (ell / (ell - 2.0))
    return K, R


# ---------------------------------------------------------------- tables

RATE_COLUMNS = ("pattern", "N", "p", "u", "theta", "c_H", "predicted_rate", "clique_cost", "hub_cost")


def rate_row(H: PatternGraph, N: int, p: float, u: float) -> dict:
    """One rate-table row. The clique uses a = (2t)^(1/v(H)) when H is regular
    (absent otherwise); the hub uses b = theta_H(u)."""
    prof = degree_profile(H)
    th = theta(H, u)
    c = c_H(H, u)
    t = 1.0 + u
    if is_regular(H):
        N0 = int(math.floor((2 * t) ** (1.0 / H.n) * N * p ** (prof.max_degree / 2.0)))
        cc = clique_cost(min(N0, N), p)
    else:
        cc = float("nan")
    k = int(math.floor(th * N * p ** prof.max_degree))
    return {
        "pattern": H.label(),
        "N": N,
        "p": p,
        "u": u,
        "theta": th,
        "c_H": c,
        "predicted_rate": c * N ** 2 * p ** prof.max_degree * math.log(1.0 / p),
        "clique_cost": cc,
        "hub_cost": hub_cost(N, min(k, N), p),
    }
