import numpy as np
import pytest
from hypothesis import given, strategies as st

from ldgraphs import _fallback, kernels
from ldgraphs.homcount import placement_order

compiled = pytest.importorskip("ldgraphs._kernels")


@given(st.integers(0, 2 ** 64 - 1), st.lists(st.integers(0, 2 ** 40), min_size=1, max_size=8))
def test_stream_keys_parity(seed, streams):
    s = np.asarray(streams, dtype=np.uint64)
    a = kernels.stream_keys(seed, s, impl=compiled)
    b = kernels.stream_keys(seed, s, impl=_fallback)
    assert np.array_equal(a, b)


@given(st.integers(0, 2 ** 64 - 1), st.integers(1, 40))
def test_uniforms_parity_and_range(seed, d):
    keys = kernels.stream_keys(seed, np.arange(5, dtype=np.uint64))
    a = kernels.hash_uniforms(keys, d, impl=compiled)
    b = kernels.hash_uniforms(keys, d, impl=_fallback)
    assert np.array_equal(a, b)
    assert a.min() >= 0.0 and a.max() < 1.0


def test_bernoulli_parity():
    keys = kernels.stream_keys(7, np.arange(50, dtype=np.uint64))
    for p in (0.0, 0.3, 1.0):
        a = kernels.bernoulli_edges(keys, 28, p, impl=compiled)
        b = kernels.bernoulli_edges(keys, 28, p, impl=_fallback)
        assert np.array_equal(a, b)
    assert kernels.bernoulli_edges(keys, 28, 0.0).sum() == 0
    assert kernels.bernoulli_edges(keys, 28, 1.0).all()


def test_uniform_mean():
    keys = kernels.stream_keys(1, np.arange(2000, dtype=np.uint64))
    u = kernels.hash_uniforms(keys, 50)
    assert abs(u.mean() - 0.5) < 0.01


def test_clique_count_parity(rng):
    A = (rng.random((20, 9, 9)) < 0.6).astype(np.uint8)
    A = np.triu(A, 1)
    A = A + A.transpose(0, 2, 1)
    for k in (2, 3, 4):
        assert np.array_equal(kernels.count_cliques(A, k, impl=compiled),
                              kernels.count_cliques(A, k, impl=_fallback))
    assert np.array_equal(kernels.count_cliques(A, 2), A.sum(axis=(1, 2)) // 2)


def test_inj_parity(rng):
    from ldgraphs import graphs

    for H in (graphs.cycle(3), graphs.cycle(4), graphs.star(3), graphs.complete(4)):
        order, back, nback = placement_order(H)
        a = np.triu((rng.random((8, 8)) < 0.5).astype(np.int64), 1)
        a = a + a.T
        X = np.triu(rng.random((8, 8)), 1)
        X = X + X.T
        ai = kernels.inj_count(a, back, nback, True, impl=compiled)
        bi = kernels.inj_count(a, back, nback, True, impl=_fallback)
        assert ai == bi
        af = kernels.inj_count(X, back, nback, False, impl=compiled)
        bf = kernels.inj_count(X, back, nback, False, impl=_fallback)
        assert af == pytest.approx(bf, rel=1e-12)


def test_backend_flag():
    assert kernels.BACKEND in ("cython", "python")


def test_forced_fallback_gives_same_samples():
    import os
    import subprocess
    import sys

    code = ("from ldgraphs import kernels; from ldgraphs.mc import sample_edges; "
            "print(kernels.BACKEND, sample_edges(9, 0.3, 77, 5, 4).tobytes().hex())")
    env = dict(os.environ, LDG_PURE_PYTHON="1")
    r = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True)
    backend, hexed = r.stdout.split()
    assert backend == "python"
    from ldgraphs.mc import sample_edges

    assert hexed == sample_edges(9, 0.3, 77, 5, 4).tobytes().hex()


def test_benchmark_runs(capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    assert mod.main(["--repeat", "1"]) == 0
    assert "speedup" in capsys.readouterr().out
