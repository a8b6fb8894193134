"""Exact tail probabilities by listing every labelled graph on N <= 7 vertices."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .functionals import GraphFunctional, TailProblem
from .sampling import n_edges, to_adjacency

MAX_ENUM_N = 7
CHUNK = 1 << 15


@dataclass
class TailEstimate:
    problem: object
    value: float
    mode: str
    std_error: float = 0.0
    samples: int = 0
    seed: int | None = None
    ess: float = 0.0
    mean_lr: float = 1.0
    lr_std_error: float = 0.0
    extra: dict = field(default_factory=dict)


def _masks_to_edges(masks: np.ndarray, d: int) -> np.ndarray:
    bits = (masks[:, None] >> np.arange(d, dtype=np.int64)[None, :]) & 1
    return bits.astype(np.uint8)


@lru_cache(maxsize=16)
def _values(functional: GraphFunctional, N: int) -> tuple:
    """Functional value and edge count for every graph, indexed by edge bitmask."""
    d = n_edges(N)
    total = 1 << d
    vals = []
    pops = []
    for lo in range(0, total, CHUNK):
        masks = np.arange(lo, min(total, lo + CHUNK), dtype=np.int64)
        E = _masks_to_edges(masks, d)
        vals.append(functional.batch(to_adjacency(E, N)))
        pops.append(E.sum(axis=1, dtype=np.int64))
    return np.concatenate(vals), np.concatenate(pops)


def graph_table(functional: GraphFunctional, N: int) -> tuple:
    """(values, edge_counts) over all 2^C(N,2) labelled graphs, bitmask order."""
    if N > MAX_ENUM_N:
        raise ValueError(f"exact enumeration supports N <= {MAX_ENUM_N}")
    return _values(functional, N)


def counts_by_edges(event: np.ndarray, pops: np.ndarray, d: int) -> np.ndarray:
    return np.bincount(pops[event], minlength=d + 1).astype(np.int64)


def weight_sum(counts, p, d: int):
    """sum_k counts[k] p^k (1-p)^(d-k); exact when p is a Fraction."""
    if isinstance(p, Fraction):
        return sum(Fraction(int(c)) * p ** k * (1 - p) ** (d - k) for k, c in enumerate(counts) if c)
    p = float(p)
    terms = []
    for k, c in enumerate(counts):
        if c:
            terms.append(int(c) * p ** k * (1.0 - p) ** (d - k))
    return math.fsum(terms)


def enumerate_tail(problem: TailProblem, exact: bool = False) -> TailEstimate:
    """Exact P(event) under G(N, p). With ``exact`` the value is also returned as a Fraction."""
    N = problem.N
    if N > MAX_ENUM_N:
        raise ValueError(f"exact enumeration supports N <= {MAX_ENUM_N}")
    d = n_edges(N)
    vals, pops = graph_table(problem.functional, N)
    counts = counts_by_edges(problem.indicator(vals), pops, d)
    p = problem.p
    frac = None
    if exact:
        frac = weight_sum(counts, Fraction(p).limit_denominator(1 << 30) if not isinstance(p, Fraction) else p, d)
    value = float(frac) if frac is not None else weight_sum(counts, p, d)
    return TailEstimate(problem, value, "exact", 0.0, 1 << d, None,
                        extra={"counts": counts.tolist(), "fraction": frac})
