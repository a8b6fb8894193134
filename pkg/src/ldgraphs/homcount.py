"""Homomorphism counts of a pattern H in a weighted symmetric matrix.

hom_H(X) = sum over all maps phi: V(H) -> [N] of prod_{uv in E} X[phi(u), phi(v)],
evaluated by summing out pattern vertices one at a time (greedy minimum
degree order). inj_H restricts the sum to injective maps and is computed
either by backtracking or by Moebius inversion over quotient graphs; the
two routes are independent and are tested against each other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .graphs import PatternGraph, quotients, quotient_of, set_partitions, mobius_weight, remove_edge_closure
from .matrices import ADJACENCY, SymMatrix, as_array, eigenvalues, op_norm

MAX_HOM_VERTICES = 8
BACKTRACK_LIMIT = 5e7  # falling-factorial size above which inj switches to Moebius inversion


@dataclass(frozen=True)
class HomValue:
    value: float | int
    method: str
    pattern: PatternGraph = field(repr=False)
    exact: bool = False

    def __float__(self):
        return float(self.value)


# ---------------------------------------------------------------- contraction

def _contract(factors, keep=(), extent=None, dtype=np.float64):
    """Sum a product of factors over every label not in ``keep``.

    ``factors`` is a list of (labels, array) with integer labels; ``extent``
    maps labels that appear in no factor to their range (they contribute a
    multiplicative constant, or a broadcast axis when kept).
    """
    extent = extent or {}
    facs = [(tuple(l), np.asarray(a, dtype=dtype)) for l, a in factors]
    keep = tuple(keep)
    present = set()
    for l, _ in facs:
        present.update(l)
    scale = 1
    for lab, size in extent.items():
        if lab not in present and lab not in keep:
            scale *= size
    elim = sorted(present - set(keep))
    while elim:
        best = None
        for v in elim:
            touching = [i for i, (l, _) in enumerate(facs) if v in l]
            scope = set()
            for i in touching:
                scope.update(facs[i][0])
            key = (len(scope), v)
            if best is None or key < best[0]:
                best = (key, v, touching, scope)
        _, v, touching, scope = best
        out = tuple(sorted(scope - {v}))
        ops = []
        for i in touching:
            ops += [facs[i][1], list(facs[i][0])]
        new = np.einsum(*ops, list(out), optimize="greedy")
        facs = [f for i, f in enumerate(facs) if i not in touching] + [(out, new)]
        elim.remove(v)
    ops = []
    for l, a in facs:
        ops += [a, list(l)]
    missing = [k for k in keep if k not in present]
    if not ops:
        res = np.ones([extent[k] for k in keep], dtype=dtype) if keep else np.asarray(1, dtype=dtype)
    elif missing:
        shape = {}
        for l, a in facs:
            for lab, s in zip(l, a.shape):
                shape[lab] = s
        for k in missing:
            ops += [np.ones(extent[k], dtype=dtype), [k]]
        res = np.einsum(*ops, list(keep), optimize="greedy")
    else:
        res = np.einsum(*ops, list(keep), optimize="greedy")
    return res * scale if scale != 1 else res


def _edge_factors(H: PatternGraph, a: np.ndarray, multiplicity=None, batch_label=None):
    mult = dict(multiplicity) if multiplicity is not None else {e: 1 for e in H.edges}
    facs = []
    for (u, v), k in mult.items():
        arr = a if k == 1 else a ** k
        labels = (u, v) if batch_label is None else (batch_label, u, v)
        facs.append((labels, arr))
    return facs


def _check_size(H: PatternGraph):
    if H.n > MAX_HOM_VERTICES:
        raise ValueError(f"pattern too large: {H.n} > {MAX_HOM_VERTICES} vertices")


def _int_ok(X, n: int) -> bool:
    a = as_array(X)
    N = a.shape[0]
    if isinstance(X, SymMatrix):
        is01 = X.kind == ADJACENCY
    else:
        is01 = bool(np.all((a == 0) | (a == 1)))
    return is01 and n * math.log2(max(N, 2)) <= 62


def is_cycle(H: PatternGraph) -> bool:
    return H.n >= 3 and H.m == H.n and bool(np.all(H.degrees == 2)) and H.is_connected


def hom(H: PatternGraph, X, exact: bool | None = None) -> HomValue:
    """Weighted homomorphism count; exact integers for small 0/1 inputs."""
    _check_size(H)
    a = as_array(X)
    N = a.shape[0]
    use_int = _int_ok(X, H.n) if exact is None else bool(exact)
    if use_int and not _int_ok(a, H.n):
        raise ValueError("exact integer counting needs a 0/1 matrix with n*log2(N) <= 62")
    extent = {v: N for v in range(H.n)}
    if use_int:
        val = _contract(_edge_factors(H, a.astype(np.int64)), (), extent, dtype=np.int64)
        return HomValue(int(val), "contraction", H, True)
    val = _contract(_edge_factors(H, a), (), extent)
    return HomValue(float(val), "contraction", H, False)


def hom_multigraph(n: int, multiplicity, X, exact: bool = False):
    """hom of a loop-free multigraph given as {(u, v): multiplicity} on n vertices."""
    a = as_array(X)
    N = a.shape[0]
    dtype = np.int64 if exact else np.float64
    arr = a.astype(dtype)
    facs = []
    for (u, v), k in dict(multiplicity).items():
        facs.append(((u, v), arr if k == 1 else arr ** k))
    val = _contract(facs, (), {v: N for v in range(n)}, dtype=dtype)
    return int(val) if exact else float(val)


def hom_batch(H: PatternGraph, A: np.ndarray) -> np.ndarray:
    """hom_H for a stack of matrices of shape (B, N, N); integer if A is integer."""
    _check_size(H)
    A = np.asarray(A)
    B, N = A.shape[0], A.shape[1]
    dtype = np.int64 if np.issubdtype(A.dtype, np.integer) or A.dtype == bool else np.float64
    b = H.n
    extent = {v: N for v in range(H.n)}
    extent[b] = B
    facs = _edge_factors(H, A.astype(dtype), batch_label=b)
    return _contract(facs, (b,), extent, dtype=dtype)


def hom_count(H: PatternGraph, X):
    return hom(H, X).value


def hom_density(H: PatternGraph, X) -> float:
    """N^{-v(H)} hom_H(X): the homomorphism density of the step graphon of X."""
    N = as_array(X).shape[0]
    return float(hom(H, X).value) / float(N) ** H.n


def hom_cycle_spectral(ell: int, X) -> HomValue:
    """sum_j lambda_j^ell, equal to hom of the ell-cycle."""
    from .graphs import cycle

    if ell < 3:
        raise ValueError("cycle length must be at least 3")
    lam = X.spectrum().eigenvalues if isinstance(X, SymMatrix) else eigenvalues(X)
    return HomValue(float(np.sum(lam ** ell)), "spectral", cycle(ell), False)


# ---------------------------------------------------------------- injective counts

def placement_order(H: PatternGraph) -> tuple:
    """BFS order (each component from its max-degree vertex) and back-edge table."""
    nb = H.neighbours()
    deg = H.degrees
    order, seen = [], set()
    for s in sorted(range(H.n), key=lambda v: (-deg[v], v)):
        if s in seen:
            continue
        seen.add(s)
        queue = [s]
        while queue:
            x = queue.pop(0)
            order.append(x)
            for y in sorted(nb[x], key=lambda v: (-deg[v], v)):
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
    pos = {v: i for i, v in enumerate(order)}
    width = max(1, max((len(nb[v]) for v in order), default=1))
    back = np.zeros((H.n, width), dtype=np.int64)
    nback = np.zeros(H.n, dtype=np.int64)
    for k, v in enumerate(order):
        prev = sorted(pos[w] for w in nb[v] if pos[w] < k)
        nback[k] = len(prev)
        back[k, : len(prev)] = prev
    return order, back, nback


def falling(N: int, n: int) -> int:
    r = 1
    for i in range(n):
        r *= N - i
    return max(r, 0)


def inj_backtrack(H: PatternGraph, X, exact: bool | None = None):
    a = as_array(X)
    use_int = _int_ok(X, H.n) if exact is None else exact
    _, back, nback = placement_order(H)
    if use_int:
        return kernels.inj_count(a.astype(np.int64), back, nback, True)
    return kernels.inj_count(a, back, nback, False)


def inj_mobius(H: PatternGraph, X, exact: bool | None = None):
    """inj_H = sum_P mu(P) hom_{H/P}; quotients keep edge multiplicities."""
    if H.n > 8:
        raise ValueError("pattern too large for quotient enumeration")
    use_int = _int_ok(X, H.n) if exact is None else exact
    total = 0 if use_int else 0.0
    terms = []
    for rgs in set_partitions(H.n):
        q = quotient_of(H, rgs)
        if q is None:
            continue  # a loop meets the zero diagonal
        w = mobius_weight(q.blocks)
        h = hom_multigraph(len(q.blocks), q.multiplicity, X, exact=use_int)
        terms.append(w * h)
    if use_int:
        return int(sum(terms))
    return math.fsum(terms)


def inj(H: PatternGraph, X, method: str = "auto", exact: bool | None = None) -> HomValue:
    """Sum over injective maps V(H) -> [N]."""
    _check_size(H)
    a = as_array(X)
    N = a.shape[0]
    use_int = _int_ok(X, H.n) if exact is None else bool(exact)
    if method == "auto":
        method = "backtrack" if falling(N, H.n) <= BACKTRACK_LIMIT else "mobius"
    if method == "backtrack":
        v = inj_backtrack(H, X, use_int)
    elif method == "mobius":
        v = inj_mobius(H, X, use_int)
    else:
        raise ValueError(f"unknown method {method!r}")
    return HomValue(v, "injective-sum", H, use_int)


@dataclass
class IdentityReport:
    ok: bool
    lhs: int
    rhs: int
    terms: list

    def __bool__(self):
        return self.ok


def hom_quotient_identity_check(H: PatternGraph, A) -> IdentityReport:
    """Check hom_H(A) = sum over loop-free quotients F of inj_F(A), in integers."""
    a = as_array(A)
    if not np.all((a == 0) | (a == 1)):
        raise ValueError("identity check needs a 0/1 adjacency matrix")
    lhs = hom(H, a, exact=True).value
    terms = []
    for q in quotients(H):
        terms.append((q.blocks, int(inj(q.graph, a, exact=True).value)))
    rhs = sum(t for _, t in terms)
    return IdentityReport(lhs == rhs, int(lhs), int(rhs), terms)


# ---------------------------------------------------------------- derivatives

def edge_marginals(H: PatternGraph, X) -> list:
    """For each edge e=(u,v): the N x N matrix of hom with e's factor removed, kept at (u, v)."""
    a = as_array(X)
    N = a.shape[0]
    extent = {v: N for v in range(H.n)}
    out = []
    for k, (u, v) in enumerate(H.edges):
        facs = [((x, y), a) for j, (x, y) in enumerate(H.edges) if j != k]
        out.append(_contract(facs, (u, v), extent))
    return out


def hom_grad(H: PatternGraph, X) -> tuple:
    """(hom_H(X), G) with G[i, j] = d hom / d x_ij for the symmetric parameter x_ij = x_ji.

    G is symmetric with zero diagonal.
    """
    a = as_array(X)
    if is_cycle(H):
        P = np.linalg.matrix_power(a, H.n - 1)
        val = float(np.sum(P * a))
        G = 2.0 * H.n * P
    else:
        margs = edge_marginals(H, a)
        G = np.zeros_like(a)
        for M in margs:
            G += M + M.T
        val = float(hom(H, a, exact=False).value)
    G = (G + G.T) / 2
    np.fill_diagonal(G, 0.0)
    return val, G


def dir_derivative(H: PatternGraph, W, Z) -> float:
    """D_H(W, Z): sum over edges of the count with that edge's factor replaced by Z."""
    w, z = as_array(W), as_array(Z)
    N = w.shape[0]
    extent = {v: N for v in range(H.n)}
    total = []
    for k in range(H.m):
        facs = [((x, y), z if j == k else w) for j, (x, y) in enumerate(H.edges)]
        total.append(float(_contract(facs, (), extent)))
    return math.fsum(total)


def dir_derivative_bound(H: PatternGraph, W, Z) -> float:
    """N ||Z||_op sum_e hom_{H_(e)}(W), with H_(e) the graph left after deleting e's endpoints."""
    w = as_array(W)
    N = w.shape[0]
    s = 0.0
    for e in H.edges:
        rest = remove_edge_closure(H, [e])
        s += 1.0 if rest is None else float(hom(rest, w, exact=False).value)
    return N * op_norm(Z) * s
