# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.

Every function here has a numpy twin in ``_fallback`` with identical
semantics; ``tests/test_kernels.py`` checks them against each other.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, uint8_t

cnp.import_array()

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil
    int __builtin_popcountll(unsigned long long) nogil

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t SALT = 0x632BE59BD9B4E019ULL
cdef double TWO_M53 = 1.0 / 9007199254740992.0


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


def stream_keys(uint64_t seed, const uint64_t[:] streams):
    cdef Py_ssize_t n = streams.shape[0], i
    out = np.empty(n, dtype=np.uint64)
    cdef uint64_t[:] o = out
    with nogil:
        for i in range(n):
            o[i] = mix64(seed ^ mix64(streams[i] * GOLDEN + SALT))
    return out


def hash_uniforms(const uint64_t[:] keys, Py_ssize_t d):
    cdef Py_ssize_t s = keys.shape[0], i, e
    out = np.empty((s, d), dtype=np.float64)
    cdef double[:, :] o = out
    cdef uint64_t k
    with nogil:
        for i in range(s):
            k = keys[i]
            for e in range(d):
                o[i, e] = <double>(mix64(k + <uint64_t>(e + 1) * GOLDEN) >> 11) * TWO_M53
    return out


def bernoulli_edges(const uint64_t[:] keys, Py_ssize_t d, double p):
    cdef Py_ssize_t s = keys.shape[0], i, e
    out = np.empty((s, d), dtype=np.uint8)
    cdef uint8_t[:, :] o = out
    cdef uint64_t k
    cdef double u
    with nogil:
        for i in range(s):
            k = keys[i]
            for e in range(d):
                u = <double>(mix64(k + <uint64_t>(e + 1) * GOLDEN) >> 11) * TWO_M53
                o[i, e] = 1 if u < p else 0
    return out


cdef double _inj_float(const double[:, :] X, const int64_t[:, :] back, const int64_t[:] nback,
                       int64_t* phi, uint8_t* used, Py_ssize_t depth, Py_ssize_t n,
                       Py_ssize_t N, double acc) noexcept nogil:
    cdef double total = 0.0, w
    cdef Py_ssize_t c, j
    for c in range(N):
        if used[c]:
            continue
        w = acc
        for j in range(nback[depth]):
            w = w * X[phi[back[depth, j]], c]
            if w == 0.0:
                break
        if w == 0.0:
            continue
        if depth == n - 1:
            total += w
        else:
            phi[depth] = c
            used[c] = 1
            total += _inj_float(X, back, nback, phi, used, depth + 1, n, N, w)
            used[c] = 0
    return total


cdef int64_t _inj_int(const int64_t[:, :] X, const int64_t[:, :] back, const int64_t[:] nback,
                      int64_t* phi, uint8_t* used, Py_ssize_t depth, Py_ssize_t n,
                      Py_ssize_t N, int64_t acc) noexcept nogil:
    cdef int64_t total = 0, w
    cdef Py_ssize_t c, j
    for c in range(N):
        if used[c]:
            continue
        w = acc
        for j in range(nback[depth]):
            w = w * X[phi[back[depth, j]], c]
            if w == 0:
                break
        if w == 0:
            continue
        if depth == n - 1:
            total += w
        else:
            phi[depth] = c
            used[c] = 1
            total += _inj_int(X, back, nback, phi, used, depth + 1, n, N, w)
            used[c] = 0
    return total


def inj_count_float(const double[:, :] X, const int64_t[:, :] back, const int64_t[:] nback):
    cdef Py_ssize_t n = nback.shape[0], N = X.shape[0]
    if n == 0:
        return 1.0
    phi = np.zeros(n, dtype=np.int64)
    used = np.zeros(max(N, 1), dtype=np.uint8)
    cdef int64_t[:] ph = phi
    cdef uint8_t[:] us = used
    cdef double r
    with nogil:
        r = _inj_float(X, back, nback, &ph[0], &us[0], 0, n, N, 1.0)
    return r


def inj_count_int(const int64_t[:, :] X, const int64_t[:, :] back, const int64_t[:] nback):
    cdef Py_ssize_t n = nback.shape[0], N = X.shape[0]
    if n == 0:
        return 1
    phi = np.zeros(n, dtype=np.int64)
    used = np.zeros(max(N, 1), dtype=np.uint8)
    cdef int64_t[:] ph = phi
    cdef uint8_t[:] us = used
    cdef int64_t r
    with nogil:
        r = _inj_int(X, back, nback, &ph[0], &us[0], 0, n, N, 1)
    return int(r)


cdef int64_t _cliques(const uint64_t* nbr, uint64_t cand, int k) noexcept nogil:
    # cand: vertices that may extend the current clique (all larger than its members)
    cdef int64_t total = 0
    cdef uint64_t rest
    cdef int v
    if k == 0:
        return 1
    while cand:
        v = __builtin_ctzll(cand)
        cand &= cand - 1
        if k == 1:
            total += 1
        else:
            rest = cand & nbr[v]
            if __builtin_popcountll(rest) >= k - 1:
                total += _cliques(nbr, rest, k - 1)
    return total


def count_cliques(const uint8_t[:, :, :] adj, int k):
    """Number of k-vertex cliques in each graph of a (S, N, N) 0/1 batch (N <= 64)."""
    cdef Py_ssize_t S = adj.shape[0], N = adj.shape[1], s, i, j
    if N > 64:
        raise ValueError("count_cliques supports N <= 64")
    out = np.zeros(S, dtype=np.int64)
    cdef int64_t[:] o = out
    cdef uint64_t nbr[64]
    cdef uint64_t full
    full = (~<uint64_t>0) if N == 64 else ((<uint64_t>1 << N) - 1)
    with nogil:
        for s in range(S):
            for i in range(N):
                nbr[i] = 0
                for j in range(N):
                    if adj[s, i, j]:
                        nbr[i] |= (<uint64_t>1) << j
            o[s] = _cliques(nbr, full, k)
    return out
