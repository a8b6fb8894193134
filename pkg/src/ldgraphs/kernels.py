"""Backend selection for the hot loops.

The compiled module ``_kernels`` is used when it imports; otherwise the
numpy versions in ``_fallback`` are used. Setting ``LDG_PURE_PYTHON=1``
forces the fallback. ``BACKEND`` records which one is live.
"""
from __future__ import annotations

import os

import numpy as np

from . import _fallback

_MASK64 = (1 << 64) - 1

if os.environ.get("LDG_PURE_PYTHON", "") not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        _impl = _fallback
        BACKEND = "python"


def stream_keys(seed: int, streams, impl=None) -> np.ndarray:
    """Per-stream 64-bit keys derived from ``seed`` (any int, reduced mod 2**64)."""
    impl = impl or _impl
    streams = np.ascontiguousarray(streams, dtype=np.uint64)
    return impl.stream_keys(int(seed) & _MASK64, streams)


def hash_uniforms(keys, d: int, impl=None) -> np.ndarray:
    """Uniforms on [0, 1) with 53-bit resolution, shape (len(keys), d)."""
    impl = impl or _impl
    return impl.hash_uniforms(np.ascontiguousarray(keys, dtype=np.uint64), int(d))


def bernoulli_edges(keys, d: int, p: float, impl=None) -> np.ndarray:
    """0/1 uint8 array of shape (len(keys), d), entry = [uniform < p]."""
    impl = impl or _impl
    return impl.bernoulli_edges(np.ascontiguousarray(keys, dtype=np.uint64), int(d), float(p))


def inj_count(X, back, nback, integer: bool, impl=None):
    """Sum over injective maps of the product of X along pattern edges.

    ``back[k, :nback[k]]`` lists the earlier-placed neighbours of the k-th
    placed pattern vertex.
    """
    impl = impl or _impl
    back = np.ascontiguousarray(back, dtype=np.int64)
    nback = np.ascontiguousarray(nback, dtype=np.int64)
    if back.ndim != 2:
        back = back.reshape(len(nback), -1)
    if integer:
        return impl.inj_count_int(np.ascontiguousarray(X, dtype=np.int64), back, nback)
    return impl.inj_count_float(np.ascontiguousarray(X, dtype=np.float64), back, nback)


def count_cliques(adj, k: int, impl=None) -> np.ndarray:
    impl = impl or _impl
    return impl.count_cliques(np.ascontiguousarray(adj, dtype=np.uint8), int(k))


__all__ = [
    "BACKEND",
    "stream_keys",
    "hash_uniforms",
    "bernoulli_edges",
    "inj_count",
    "count_cliques",
]
