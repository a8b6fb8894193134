"""Symmetric zero-diagonal matrices, their spectra and spectral norms."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

CONTINUOUS = "continuous"
ADJACENCY = "adjacency"


class SymMatrix:
    """N x N symmetric matrix with zero diagonal.

    Only the strict upper triangle of the input is read; the stored array is
    exactly symmetric. ``kind`` is "continuous" (entries in [0, 1]),
    "adjacency" (entries in {0, 1}) or "signed" (any real, used for
    perturbations and directions).
    """

    __slots__ = ("a", "kind", "_spec")

    def __init__(self, a, kind: str = CONTINUOUS, check: bool = True):
        a = np.asarray(a, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("expected a square matrix")
        if check and not np.all(np.isfinite(a)):
            raise ValueError("non-finite entries")
        up = np.triu(a, 1)
        full = up + up.T
        if kind == CONTINUOUS:
            if check and (full.min(initial=0.0) < 0.0 or full.max(initial=0.0) > 1.0):
                raise ValueError("entries outside [0, 1]")
        elif kind == ADJACENCY:
            if check and not np.all((full == 0.0) | (full == 1.0)):
                raise ValueError("adjacency entries must be 0 or 1")
        elif kind != "signed":
            raise ValueError(f"unknown kind {kind!r}")
        full.flags.writeable = False
        self.a = full
        self.kind = kind
        self._spec = None

    @property
    def N(self) -> int:
        return self.a.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.a if dtype is None else self.a.astype(dtype)

    def upper(self) -> np.ndarray:
        i, j = np.triu_indices(self.N, 1)
        return self.a[i, j]

    @classmethod
    def from_upper(cls, x, N: int, kind: str = CONTINUOUS, check: bool = True) -> "SymMatrix":
        a = np.zeros((N, N))
        i, j = np.triu_indices(N, 1)
        a[i, j] = x
        return cls(a, kind, check)

    def spectrum(self) -> "Spectrum":
        if self._spec is None:
            self._spec = spectrum(self.a)
        return self._spec

    def __repr__(self):
        return f"SymMatrix(N={self.N}, kind={self.kind})"


def as_array(X) -> np.ndarray:
    if isinstance(X, SymMatrix):
        return X.a
    return np.asarray(X, dtype=np.float64)


def J(N: int) -> np.ndarray:
    """All-ones matrix minus the identity."""
    return np.ones((N, N)) - np.eye(N)


def const(N: int, c: float) -> SymMatrix:
    return SymMatrix(c * J(N))


def random_continuous(N: int, rng: np.random.Generator) -> SymMatrix:
    return SymMatrix(rng.random((N, N)))


def random_adjacency(N: int, p: float, rng: np.random.Generator) -> SymMatrix:
    return SymMatrix((rng.random((N, N)) < p).astype(float), kind=ADJACENCY)


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray   # non-increasing modulus
    eigenvectors: np.ndarray  # columns, orthonormal

    def reconstruct(self, k: int | None = None) -> np.ndarray:
        lam, U = self.eigenvalues[:k], self.eigenvectors[:, :k]
        return (U * lam) @ U.T


def order_by_modulus(lam: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Permutation sorting by |lambda| descending; ties go positive-first, then by value."""
    lam = np.asarray(lam, dtype=np.float64)
    if tol is None:
        tol = 1e-10 * max(1.0, float(np.max(np.abs(lam), initial=0.0)))
    mod = np.abs(lam)
    order = np.argsort(-mod, kind="stable")
    out = []
    i = 0
    while i < len(order):
        j = i + 1
        while j < len(order) and mod[order[i]] - mod[order[j]] <= tol:
            j += 1
        grp = order[i:j]
        grp = grp[np.argsort(-lam[grp], kind="stable")]
        out.extend(grp.tolist())
        i = j
    return np.asarray(out, dtype=np.int64)


def spectrum(X) -> Spectrum:
    a = as_array(X)
    if a.shape[0] < 1:
        raise ValueError("empty matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("non-finite entries")
    lam, U = np.linalg.eigh(a)
    idx = order_by_modulus(lam)
    return Spectrum(lam[idx], U[:, idx])


def eigenvalues(X) -> np.ndarray:
    """Eigenvalues in non-increasing modulus order (no eigenvectors)."""
    lam = np.linalg.eigvalsh(as_array(X))
    return lam[order_by_modulus(lam)]


def schatten_from_eigs(lam, alpha) -> float:
    lam = np.abs(np.asarray(lam, dtype=np.float64))
    if alpha == np.inf or alpha == "inf":
        return float(lam.max(initial=0.0))
    alpha = float(alpha)
    if alpha < 1:
        raise ValueError("not a norm")
    top = lam.max(initial=0.0)
    if top == 0.0:
        return 0.0
    # scale to keep large powers finite
    return float(top * np.sum((lam / top) ** alpha) ** (1.0 / alpha))


def schatten(X, alpha) -> float:
    """(sum_j |lambda_j|^alpha)^(1/alpha); alpha = inf gives the operator norm."""
    if not (alpha == np.inf or alpha == "inf") and float(alpha) < 1:
        raise ValueError("not a norm")
    if isinstance(X, SymMatrix):
        lam = X.spectrum().eigenvalues
    else:
        lam = np.linalg.eigvalsh(as_array(X))
    return schatten_from_eigs(lam, alpha)


def op_norm(X) -> float:
    return schatten(X, np.inf)


def hs_norm(X) -> float:
    return float(np.linalg.norm(as_array(X)))


def hs_k(X, k: int) -> float:
    """HS norm of the projection onto the top-k (by modulus) eigenspace."""
    a = as_array(X)
    N = a.shape[0]
    if not 1 <= k <= N:
        raise ValueError(f"k must be in [1, {N}]")
    lam = X.spectrum().eigenvalues if isinstance(X, SymMatrix) else eigenvalues(a)
    return float(np.sqrt(np.sum(lam[:k] ** 2)))


def rank_split(X, R: int) -> tuple:
    """(X_le, X_gt): projection onto the top-R eigenpairs and the residual."""
    a = as_array(X)
    N = a.shape[0]
    if not 1 <= R <= N - 1:
        raise ValueError(f"R must be in [1, {N - 1}]")
    sp = X.spectrum() if isinstance(X, SymMatrix) else spectrum(a)
    low = sp.reconstruct(R)
    return low, a - low


def load_csv(path) -> SymMatrix:
    """N rows of N comma-separated numbers; symmetry checked to 1e-12."""
    a = np.loadtxt(Path(path), delimiter=",", ndmin=2)
    if a.shape[0] != a.shape[1]:
        raise ValueError("matrix CSV must be square")
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-12:
        raise ValueError("matrix is not symmetric within 1e-12")
    if np.max(np.abs(np.diag(a)), initial=0.0) > 1e-12:
        raise ValueError("diagonal must be zero")
    kind = ADJACENCY if np.all((a == 0) | (a == 1)) else CONTINUOUS
    if kind == CONTINUOUS and (a.min() < 0 or a.max() > 1):
        kind = "signed"
    return SymMatrix((a + a.T) / 2, kind=kind)


def save_csv(path, X) -> None:
    a = as_array(X)
    with open(path, "w") as fh:
        for row in a:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
