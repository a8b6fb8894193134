"""Importance sampling for graph tail events.

Proposals are product measures mu_r, planted cliques, planted hubs, or
mixtures of these. Every proposal dominates mu_p on the graphs it can
produce, and the likelihood ratio d mu_p / dq is computed exactly:

  product(r):        log d mu_r/d mu_p = kappa * sum(r - A_ij) + C(N,2) I_p(r),
                     kappa = log((1-r)/(1-p)) + log(p/r)
  planted clique N0: d q/d mu_p = #{N0-cliques} / (C(N,N0) p^C(N0,2))
  planted hub k:     d q/d mu_p = C(#universal vertices, k) / (C(N,k) p^(C(k,2)+k(N-k)))
  mixture:           d q/d mu_p = sum_k w_k d q_k/d mu_p
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

from .. import kernels
from ..rates import ip_scalar
from ..matrices import schatten_from_eigs
from .enumeration import TailEstimate
from .functionals import TailProblem
from .sampling import aux_uniform, n_edges, random_subsets, sample_edges, sample_keys, to_adjacency

CHUNK = 10000


@dataclass
class TiltSpec:
    """kind: "product" (r), "clique" (N0), "hub" (k) or "mixture" (components, weights)."""

    kind: str
    r: float | None = None
    N0: int | None = None
    k: int | None = None
    components: tuple = ()
    weights: tuple = ()

    def __post_init__(self):
        if self.kind == "product":
            if self.r is None or not 0.0 < self.r < 1.0:
                raise ValueError("product tilt needs r in (0, 1)")
        elif self.kind == "clique":
            if self.N0 is None or self.N0 < 2:
                raise ValueError("clique tilt needs N0 >= 2")
        elif self.kind == "hub":
            if self.k is None or self.k < 1:
                raise ValueError("hub tilt needs k >= 1")
        elif self.kind == "mixture":
            if not self.components or len(self.components) != len(self.weights):
                raise ValueError("mixture needs matching components and weights")
            w = np.asarray(self.weights, dtype=float)
            if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
                raise ValueError("mixture weights must be nonnegative and sum to 1")
            if any(c.kind == "mixture" for c in self.components):
                raise ValueError("nested mixtures are not supported")
        else:
            raise ValueError(f"unknown tilt kind {self.kind!r}")


def _log_binom(n, k):
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def kappa(p: float, r: float) -> float:
    return math.log((1 - r) / (1 - p)) + math.log(p / r)


def log_dmur_dmup(E: np.ndarray, p: float, r: float) -> np.ndarray:
    """log d mu_r / d mu_p for edge vectors E, shape (B, d)."""
    d = E.shape[1]
    s = E.sum(axis=1, dtype=np.int64).astype(np.float64)
    return kappa(p, r) * (d * r - s) + d * ip_scalar(p, r)


def log_dq_dmup(spec: TiltSpec, E: np.ndarray, N: int, p: float) -> np.ndarray:
    """log of the density of the proposal with respect to mu_p, per sample."""
    d = E.shape[1]
    if spec.kind == "product":
        return log_dmur_dmup(E, p, spec.r)
    if spec.kind == "clique":
        N0 = spec.N0
        c = kernels.count_cliques(to_adjacency(E, N), N0).astype(np.float64)
        with np.errstate(divide="ignore"):
            return np.log(c) - _log_binom(N, N0) - (N0 * (N0 - 1) / 2) * math.log(p)
    if spec.kind == "hub":
        k = spec.k
        A = to_adjacency(E, N)
        U = (A.sum(axis=2) == N - 1).sum(axis=1)
        h = k * (k - 1) / 2 + k * (N - k)
        out = np.full(E.shape[0], -np.inf)
        ok = U >= k
        out[ok] = _log_binom(U[ok], k) - _log_binom(N, k) - h * math.log(p)
        return out
    comps = np.stack([log_dq_dmup(c, E, N, p) for c in spec.components])
    w = np.asarray(spec.weights, dtype=float)
    with np.errstate(divide="ignore"):
        return logsumexp(comps + np.log(w)[:, None], axis=0)


def draw(spec: TiltSpec, N: int, p: float, seed: int, start: int, count: int) -> np.ndarray:
    """Edge vectors of samples start..start+count-1 from the proposal."""
    d = n_edges(N)
    if spec.kind == "product":
        return sample_edges(N, spec.r, seed, start, count)
    if spec.kind in ("clique", "hub"):
        size = spec.N0 if spec.kind == "clique" else spec.k
        E = sample_edges(N, p, seed, start, count)
        S = random_subsets(N, size, seed, start, count)
        i, j = np.triu_indices(N, 1)
        if spec.kind == "clique":
            forced = S[:, i] & S[:, j]
        else:
            forced = S[:, i] | S[:, j]
        E[forced] = 1
        return E
    # mixture: component chosen by an auxiliary uniform, then drawn with its own rule
    u = aux_uniform(seed ^ 0x5DEECE66D, start, count)
    cw = np.cumsum(spec.weights)
    comp = np.minimum(np.searchsorted(cw, u, side="right"), len(cw) - 1)
    E = np.empty((count, d), dtype=np.uint8)
    for c, sub in enumerate(spec.components):
        rows = np.flatnonzero(comp == c)
        if rows.size == 0:
            continue
        # regenerate each selected sample at its own index so chunking never matters
        full = draw(sub, N, p, seed, start, count)
        E[rows] = full[rows]
    return E


def _fsum_stats(chunks):
    """Combine per-chunk (n, sum, sumsq) with exact-order fsum."""
    n = sum(c[0] for c in chunks)
    s = math.fsum(c[1] for c in chunks)
    q = math.fsum(c[2] for c in chunks)
    return n, s, q


def _mean_se(n, s, q):
    mean = s / n
    var = max(q / n - mean * mean, 0.0) * n / max(n - 1, 1)
    return mean, math.sqrt(var / n)


def is_tail(problem: TailProblem, tilt: TiltSpec, samples: int, seed: int, chunk: int = CHUNK) -> TailEstimate:
    """Plain importance sampling: mean of 1{event} * d mu_p / dq over proposal draws."""
    if samples < 1:
        raise ValueError("samples must be positive")
    N, p = problem.N, problem.p
    est, lr, w2 = [], [], []
    for start in range(0, samples, chunk):
        cnt = min(chunk, samples - start)
        E = draw(tilt, N, p, seed, start, cnt)
        with np.errstate(over="ignore"):
            L = np.exp(-log_dq_dmup(tilt, E, N, p))
        hit = problem.event(to_adjacency(E, N))
        W = np.where(hit, L, 0.0)
        est.append((cnt, math.fsum(W), math.fsum(W * W)))
        lr.append((cnt, math.fsum(L), math.fsum(L * L)))
    n, s, q = _fsum_stats(est)
    mean, se = _mean_se(n, s, q)
    ess = (s * s / q) if q > 0 else 0.0
    if ess == 0.0:
        raise RuntimeError("zero effective sample size: no proposal draw hit the event")
    lm, lse = _mean_se(*_fsum_stats(lr))
    untilted = tilt.kind == "product" and tilt.r == p
    mode = "monte-carlo" if untilted else "importance-sampling"
    return TailEstimate(problem, mean, mode, se, n, seed, ess=ess, mean_lr=lm, lr_std_error=lse)


def plain_mc(problem: TailProblem, samples: int, seed: int, chunk: int = CHUNK) -> TailEstimate:
    """Crude Monte Carlo frequency with binomial standard error."""
    N, p = problem.N, problem.p
    hits = 0
    for start in range(0, samples, chunk):
        cnt = min(chunk, samples - start)
        E = sample_edges(N, p, seed, start, cnt)
        hits += int(problem.event(to_adjacency(E, N)).sum())
    mean = hits / samples
    se = math.sqrt(mean * (1 - mean) / samples)
    return TailEstimate(problem, mean, "monte-carlo", se, samples, seed, ess=float(samples))


# ---------------------------------------------------------------- tilted ball probability

@dataclass
class BallReport:
    N: int
    p: float
    r: float
    eps: float
    alpha: float
    estimate: float
    std_error: float
    bound: float
    ratio: float
    proposal_mass: float  # mu_r(B), fraction of proposal draws in the ball
    samples: int
    seed: int
    extra: dict = field(default_factory=dict)


def _ball_dist(E, N, r, alpha):
    A = to_adjacency(E, N).astype(np.float64)
    A -= r * (np.ones((N, N)) - np.eye(N))
    lam = np.linalg.eigvalsh(A)
    return np.array([schatten_from_eigs(row, alpha) for row in lam]) / (r * N)


def tilt_ball_probability(N: int, p: float, r: float, eps, alpha, samples: int, seed: int,
                          chunk: int = 5000) -> BallReport:
    """Estimate mu_p(B) for B = {A : ||A - r J||_{S_alpha} <= eps r N} by sampling mu_r.

    Compares against 1/2 exp(-C(N,2) I_p(r) - eps p N^2). ``eps="calibrate"``
    sets eps to twice the median normalised distance in a pilot run, so that
    mu_r(B) is well above 1/2 (the regime the lower bound is about).
    """
    if not (0 < r <= p <= 0.5):
        raise ValueError("need 0 < r <= p <= 1/2")
    alpha = np.inf if alpha in ("inf", np.inf) else float(alpha)
    d = n_edges(N)
    pilot_seed = (seed ^ 0xB5AD4ECEDA1CE2A9) & ((1 << 64) - 1)
    if eps == "calibrate":
        m = min(2000, samples)
        dist = _ball_dist(sample_edges(N, r, pilot_seed, 0, m), N, r, alpha)
        eps = 2.0 * float(np.median(dist))
    eps = float(eps)
    est, inball = [], 0
    for start in range(0, samples, chunk):
        cnt = min(chunk, samples - start)
        E = sample_edges(N, r, seed, start, cnt)
        hit = _ball_dist(E, N, r, alpha) <= eps
        inball += int(hit.sum())
        L = np.where(hit, np.exp(-log_dmur_dmup(E, p, r)), 0.0)
        est.append((cnt, math.fsum(L), math.fsum(L * L)))
    n, s, q = _fsum_stats(est)
    mean, se = _mean_se(n, s, q)
    bound = 0.5 * math.exp(-d * ip_scalar(p, r) - eps * p * N * N)
    return BallReport(N, p, r, eps, alpha, mean, se, bound, mean / bound, inball / n, n, seed)


# ---------------------------------------------------------------- planted events

def clique_event_logprob(N0: int, p: float) -> float:
    """log P(vertices 1..N0 span a clique) = C(N0,2) log p."""
    return N0 * (N0 - 1) / 2 * math.log(p)


def hub_event_logprob(N: int, k: int, p: float) -> float:
    """log P(vertices 1..k are joined to every other vertex)."""
    return (k * (k - 1) / 2 + k * (N - k)) * math.log(p)
