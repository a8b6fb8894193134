"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each row checks that both backends return identical output before timing.
"""
import argparse
import sys
import timeit

import numpy as np

from ldgraphs import _fallback, graphs, kernels
from ldgraphs.homcount import placement_order

try:
    from ldgraphs import _kernels
except ImportError:
    _kernels = None


def cases():
    rng = np.random.default_rng(0)
    keys = kernels.stream_keys(1, np.arange(2000))
    yield "hash_uniforms 2000x190", lambda impl: kernels.hash_uniforms(keys, 190, impl=impl)
    yield "bernoulli_edges 2000x190", lambda impl: kernels.bernoulli_edges(keys, 190, 0.3, impl=impl)

    a = np.triu((rng.random((40, 40)) < 0.3).astype(np.int64), 1)
    A = a + a.T
    for H in (graphs.cycle(4), graphs.cycle(5), graphs.star(3)):
        _, back, nback = placement_order(H)
        yield f"inj_count {H.label()} N=40", lambda impl, back=back, nback=nback: kernels.inj_count(A, back, nback, True, impl=impl)

    E = (rng.random((500, 12, 12)) < 0.5).astype(np.uint8)
    E = np.triu(E, 1)
    E = E | E.transpose(0, 2, 1)
    yield "count_cliques k=4 500xN=12", lambda impl: kernels.count_cliques(E, 4, impl=impl)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled module not built; only the fallback is available", file=sys.stderr)
        return 1
    print(f"{'kernel':32s} {'cython [ms]':>12s} {'python [ms]':>12s} {'speedup':>8s}")
    for name, fn in cases():
        if not np.array_equal(np.asarray(fn(_kernels)), np.asarray(fn(_fallback))):
            print(f"{name}: backends disagree", file=sys.stderr)
            return 1
        tc = min(timeit.repeat(lambda: fn(_kernels), number=1, repeat=args.repeat)) * 1e3
        tp = min(timeit.repeat(lambda: fn(_fallback), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:32s} {tc:12.3f} {tp:12.3f} {tp / tc:8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
