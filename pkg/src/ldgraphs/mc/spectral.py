"""Spectral statistics of G(N, p) adjacency matrices.

Deterministic facts (asserted on every sample):
  * |lambda_{R+1}| <= N / sqrt(R+1) for any matrix with entries in [0, 1];
  * eigenvalue moduli are non-increasing in the index;
  * ||A||_HS^2 = 2 * (number of edges);
  * if ||A||_HS < K N sqrt(p) then |lambda_R| <= K N sqrt(p) / sqrt(R) and
    sum_{j >= R} |lambda_j|^a <= (K N sqrt(p) / R^(1/2 - 1/a))^a for a >= 2.

Probabilistic bounds whose constants are not determined (tail bounds for
|lambda_R|, tail sums, ||A||_{HS,k}) are only reported as violation
frequencies for caller-supplied constants.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..matrices import order_by_modulus
from .sampling import sample_edges, to_adjacency

CHUNK = 200


@dataclass
class SpectralReport:
    N: int
    p: float
    K: float
    samples: int
    seed: int
    R_list: tuple
    alphas: tuple
    deterministic_violations: dict
    frequencies: dict
    hs_exceed_2: float  # fraction with ||A||_HS >= 2 N sqrt(p)
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v == 0 for v in self.deterministic_violations.values())


def spectral_tail_study(N: int, p: float, R_list, K: float, samples: int, seed: int,
                        alphas=(3.0, 4.0), C: float = 1.0, C_prime: float = 1.0,
                        tol: float = 1e-9) -> SpectralReport:
    """Sample G(N, p) and tabulate the spectral bounds (see module docstring).

    ``C`` and ``C_prime`` stand in for the unspecified absolute constants of
    the refined tail bounds; the default 1 is a placeholder, not a claim.
    """
    R_list = tuple(int(R) for R in R_list)
    if any(not 1 <= R < N for R in R_list):
        raise ValueError("each R must lie in [1, N-1]")
    det = {"rank_approx": 0, "modulus_order": 0, "hs_edges": 0, "ahs_R": 0, "ahs_alpha": 0}
    freq_cnt = {"lambdaR": np.zeros(len(R_list), np.int64),
                "tail": np.zeros((len(R_list), len(alphas)), np.int64),
                "hs_k": np.zeros(len(R_list), np.int64),
                "ehs": 0}
    hs2 = 0
    sq = math.sqrt(p)
    for start in range(0, samples, CHUNK):
        cnt = min(CHUNK, samples - start)
        E = sample_edges(N, p, seed, start, cnt)
        A = to_adjacency(E, N)
        edges = E.sum(axis=1, dtype=np.int64)
        lam_raw = np.linalg.eigvalsh(A.astype(np.float64))
        for b in range(cnt):
            lam = lam_raw[b][order_by_modulus(lam_raw[b])]
            mod = np.abs(lam)
            if np.any(np.diff(mod) > tol * max(1.0, mod[0])):
                det["modulus_order"] += 1
            hs_sq = int(A[b].sum(dtype=np.int64))
            if hs_sq != 2 * int(edges[b]) or abs(float(np.sum(lam ** 2)) - hs_sq) > 1e-8 * max(1, hs_sq):
                det["hs_edges"] += 1
            hs = math.sqrt(hs_sq)
            if hs >= 2 * N * sq:
                hs2 += 1
            in_ehs = hs >= K * N * sq
            freq_cnt["ehs"] += int(in_ehs)
            cum = np.cumsum(mod ** 2)
            for ri, R in enumerate(R_list):
                if mod[R] > N / math.sqrt(R + 1) + tol:
                    det["rank_approx"] += 1
                lamR = mod[R - 1]
                if not in_ehs:
                    if lamR > K * N * sq / math.sqrt(R) * (1 + tol):
                        det["ahs_R"] += 1
                    for a in alphas:
                        lhs = float(np.sum(mod[R - 1:] ** a))
                        rhs = (K * N * sq / R ** (0.5 - 1.0 / a)) ** a
                        if lhs > rhs * (1 + 1e-9):
                            det["ahs_alpha"] += 1
                if lamR > C * (math.sqrt(N * p) + K * N * p / math.sqrt(R)):
                    freq_cnt["lambdaR"][ri] += 1
                for ai, a in enumerate(alphas):
                    lhs = float(np.sum(mod[R:] ** a))
                    rhs = C * (N ** (1 + a / 2) * p ** (a / 2) + (K * N * p) ** a / R ** (a / 2 - 1))
                    if lhs > rhs:
                        freq_cnt["tail"][ri, ai] += 1
                if math.sqrt(cum[R - 1]) >= K * N * p + C_prime * math.sqrt(R * N * p):
                    freq_cnt["hs_k"][ri] += 1
    freqs = {
        "lambdaR": (freq_cnt["lambdaR"] / samples).tolist(),
        "tail": (freq_cnt["tail"] / samples).tolist(),
        "hs_k": (freq_cnt["hs_k"] / samples).tolist(),
        "in_E_HS": freq_cnt["ehs"] / samples,
    }
    return SpectralReport(N, p, K, samples, seed, R_list, tuple(alphas), det, freqs, hs2 / samples)
