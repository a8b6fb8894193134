"""Numpy/Python versions of the compiled kernels in ``_kernels.pyx``.

Semantics match bit for bit: the RNG hashes use wrapping uint64 arithmetic
and the backtracking counters visit maps in the same order.
"""
from __future__ import annotations

import itertools

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
SALT = np.uint64(0x632BE59BD9B4E019)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S11 = (np.uint64(s) for s in (30, 27, 31, 11))
_TWO_M53 = 1.0 / 9007199254740992.0


def mix64(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def stream_keys(seed: int, streams: np.ndarray) -> np.ndarray:
    streams = np.asarray(streams, dtype=np.uint64)
    with np.errstate(over="ignore"):
        inner = mix64(streams * GOLDEN + SALT)
    return mix64(np.uint64(seed) ^ inner)


def _hash_grid(keys: np.ndarray, d: int) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.uint64)
    with np.errstate(over="ignore"):
        offs = np.arange(1, d + 1, dtype=np.uint64) * GOLDEN
        return mix64(keys[:, None] + offs[None, :])


def hash_uniforms(keys: np.ndarray, d: int) -> np.ndarray:
    return (_hash_grid(keys, d) >> _S11).astype(np.float64) * _TWO_M53


def bernoulli_edges(keys: np.ndarray, d: int, p: float) -> np.ndarray:
    return (hash_uniforms(keys, d) < p).astype(np.uint8)


def _inj(X, back, nback, zero, one):
    n = len(nback)
    N = len(X)
    if n == 0:
        return one
    phi = [0] * n
    used = [False] * N

    def rec(depth, acc):
        total = zero
        for c in range(N):
            if used[c]:
                continue
            w = acc
            for j in range(nback[depth]):
                w = w * X[phi[back[depth][j]]][c]
                if w == 0:
                    break
            if w == 0:
                continue
            if depth == n - 1:
                total += w
            else:
                phi[depth] = c
                used[c] = True
                total += rec(depth + 1, w)
                used[c] = False
        return total

    return rec(0, one)


def inj_count_float(X, back, nback) -> float:
    Xl = np.asarray(X, dtype=np.float64).tolist()
    return float(_inj(Xl, np.asarray(back).tolist(), np.asarray(nback).tolist(), 0.0, 1.0))


def inj_count_int(X, back, nback) -> int:
    Xl = np.asarray(X, dtype=np.int64).tolist()
    return int(_inj(Xl, np.asarray(back).tolist(), np.asarray(nback).tolist(), 0, 1))


def count_cliques(adj: np.ndarray, k: int) -> np.ndarray:
    """Number of k-vertex cliques in each graph of a (S, N, N) 0/1 batch."""
    adj = np.asarray(adj, dtype=bool)
    S, N = adj.shape[0], adj.shape[1]
    if N > 64:
        raise ValueError("count_cliques supports N <= 64")
    out = np.zeros(S, dtype=np.int64)
    if k == 0:
        out[:] = 1
        return out
    if k == 1:
        out[:] = N
        return out
    for combo in itertools.combinations(range(N), k):
        ok = np.ones(S, dtype=bool)
        for a, b in itertools.combinations(combo, 2):
            ok &= adj[:, a, b]
        out += ok
    return out
