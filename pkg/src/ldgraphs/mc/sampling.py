"""Reproducible G(N, p) sampling from a counter-based hash.

Sample s of a run with master seed S draws its edge uniforms from the key
stream_keys(S, s); the uniform of edge e (upper-triangle index, row-major)
is the hash of (key, e). Any sample can therefore be regenerated on its
own, in any order or chunking, with bit-identical results.
"""
from __future__ import annotations

import numpy as np

from .. import kernels
from ..matrices import ADJACENCY, SymMatrix

AUX = np.uint64(1 << 63)  # stream offset for per-sample auxiliary draws


def n_edges(N: int) -> int:
    return N * (N - 1) // 2


def sample_keys(seed: int, start: int, count: int, aux: bool = False) -> np.ndarray:
    idx = np.arange(start, start + count, dtype=np.uint64)
    if aux:
        idx = idx | AUX
    return kernels.stream_keys(seed, idx)


def edge_uniforms(N: int, seed: int, start: int, count: int, aux: bool = False) -> np.ndarray:
    return kernels.hash_uniforms(sample_keys(seed, start, count, aux), n_edges(N))


def sample_edges(N: int, p, seed: int, start: int = 0, count: int = 1) -> np.ndarray:
    """(count, C(N,2)) uint8 edge indicators; p may be a scalar or per-edge vector."""
    keys = sample_keys(seed, start, count)
    if np.ndim(p) == 0:
        return kernels.bernoulli_edges(keys, n_edges(N), float(p))
    U = kernels.hash_uniforms(keys, n_edges(N))
    return (U < np.asarray(p)[None, :]).astype(np.uint8)


def to_adjacency(E: np.ndarray, N: int) -> np.ndarray:
    """(B, C(N,2)) edge vectors -> (B, N, N) symmetric 0/1 arrays (uint8)."""
    E = np.atleast_2d(E)
    A = np.zeros((E.shape[0], N, N), dtype=np.uint8)
    i, j = np.triu_indices(N, 1)
    A[:, i, j] = E
    A[:, j, i] = E
    return A


def sample_gnp(N: int, p: float, seed: int, index: int = 0) -> SymMatrix:
    """One G(N, p) adjacency matrix; sample ``index`` of the stream keyed by ``seed``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    E = sample_edges(N, p, seed, index, 1)
    return SymMatrix(to_adjacency(E, N)[0].astype(float), kind=ADJACENCY)


def random_subsets(N: int, k: int, seed: int, start: int, count: int) -> np.ndarray:
    """(count, N) boolean masks of uniformly random k-subsets, from the auxiliary stream."""
    keys = sample_keys(seed, start, count, aux=True)
    U = kernels.hash_uniforms(keys, N + 1)[:, 1:]
    order = np.argsort(U, axis=1, kind="stable")
    mask = np.zeros((count, N), dtype=bool)
    np.put_along_axis(mask, order[:, :k], True, axis=1)
    return mask


def aux_uniform(seed: int, start: int, count: int) -> np.ndarray:
    """One auxiliary uniform per sample (used for mixture component choice)."""
    keys = sample_keys(seed, start, count, aux=True)
    return kernels.hash_uniforms(keys, 1)[:, 0]
