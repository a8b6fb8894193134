"""Finite-precision checks of the covering argument for cycle and hom counts.

The covering proof replaces a matrix X by a point Y = Mat(mu, v) of a net
for its top-R spectral part plus a residual Z supported on ker(Y). Each
function below verifies one explicit inequality of that chain at a test
resolution delta (e.g. 1e-6) instead of the astronomically small net
resolutions of the asymptotic statement; slack is propagated explicitly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import homcount
from .graphs import PatternGraph, degree_profile, remove_edge_closure
from .matrices import as_array, order_by_modulus, schatten_from_eigs, spectrum

ORTH_TOL = 1e-8


# ---------------------------------------------------------------- spectral points

@dataclass(frozen=True)
class SpectralPoint:
    lambdas: np.ndarray  # length R, non-increasing modulus
    frame: np.ndarray    # N x R, orthonormal columns

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        U = np.asarray(self.frame, dtype=float)
        if U.ndim != 2 or U.shape[1] != lam.shape[0]:
            raise ValueError("frame must have one column per eigenvalue")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "frame", U)

    @property
    def R(self) -> int:
        return self.lambdas.shape[0]

    def gram_error(self) -> float:
        U = self.frame
        return float(np.max(np.abs(U.T @ U - np.eye(self.R)), initial=0.0))

    def is_ordered(self) -> bool:
        m = np.abs(self.lambdas)
        return bool(np.all(np.diff(m) <= 1e-12 * max(1.0, m.max(initial=0.0))))


def mat_assemble(point: SpectralPoint) -> np.ndarray:
    """sum_j lambda_j u_j u_j^T."""
    if point.gram_error() > ORTH_TOL:
        raise ValueError("frame is not orthonormal")
    U = point.frame
    return (U * point.lambdas) @ U.T


def spectral_point(X, R: int) -> SpectralPoint:
    sp = spectrum(X)
    return SpectralPoint(sp.eigenvalues[:R].copy(), sp.eigenvectors[:, :R].copy())


def orthonormalize(V: np.ndarray) -> np.ndarray:
    """Nearest matrix with orthonormal columns (polar factor via SVD)."""
    W, _, Zt = np.linalg.svd(V, full_matrices=False)
    return W @ Zt


def perturb(point: SpectralPoint, d_lambda: float, d_frame: float, rng: np.random.Generator) -> SpectralPoint:
    """A nearby point with ||lambda - mu||_2 = d_lambda and a re-orthonormalised frame."""
    R = point.R
    w = rng.normal(size=R)
    w *= d_lambda / max(np.linalg.norm(w), 1e-300)
    mu = point.lambdas + w
    G = rng.normal(size=point.frame.shape)
    G *= d_frame / max(np.linalg.norm(G), 1e-300)
    V = orthonormalize(point.frame + G)
    return SpectralPoint(mu, V)


# ---------------------------------------------------------------- net bound

@dataclass
class NetReport:
    trials: int
    min_slack: float          # min over trials of rhs - lhs
    max_lhs: float
    rank_one_identity_err: float
    ok: bool
    extra: dict = field(default_factory=dict)


def hs_chain(point: SpectralPoint, other: SpectralPoint) -> tuple:
    """(||X - Y||_HS, sqrt(R)||lambda - mu||_2 + ||mu||_2 sqrt(2) ||u - v||_HS)."""
    X, Y = mat_assemble(point), mat_assemble(other)
    lhs = float(np.linalg.norm(X - Y))
    R = point.R
    rhs = (math.sqrt(R) * float(np.linalg.norm(point.lambdas - other.lambdas))
           + float(np.linalg.norm(other.lambdas)) * math.sqrt(2.0) * float(np.linalg.norm(point.frame - other.frame)))
    return lhs, rhs


def rank_one_gap(u: np.ndarray, v: np.ndarray) -> float:
    """| ||uu^T - vv^T||_HS^2 - 2(1 - <u,v>^2) | for unit vectors."""
    lhs = float(np.linalg.norm(np.outer(u, u) - np.outer(v, v)) ** 2)
    return abs(lhs - 2.0 * (1.0 - float(u @ v) ** 2))


def net_perturbation_bound(X, R: int, delta_lambda: float, delta_frame: float,
                           trials: int = 100, seed: int = 0, tol: float = 1e-12) -> NetReport:
    """Check the HS perturbation chain for Mat on random nearby points.

    X is replaced by its top-R spectral part (so it is exactly rank R).
    """
    rng = np.random.default_rng(seed)
    pt = spectral_point(X, R)
    slack, lhs_max, r1 = math.inf, 0.0, 0.0
    for _ in range(trials):
        q = perturb(pt, delta_lambda, delta_frame, rng)
        lhs, rhs = hs_chain(pt, q)
        scale = max(1.0, float(np.linalg.norm(pt.lambdas)))
        slack = min(slack, rhs - lhs + tol * scale)
        lhs_max = max(lhs_max, lhs)
        u = pt.frame[:, 0]
        v = q.frame[:, 0]
        r1 = max(r1, rank_one_gap(u, v))
    return NetReport(trials, slack, lhs_max, r1, slack >= 0 and r1 <= 1e-10)


# ---------------------------------------------------------------- kernel residuals

def kernel_projector(Y, tol: float = 1e-10) -> np.ndarray:
    """Orthogonal projector onto ker(Y) (eigenvalues below tol * ||Y||_op)."""
    a = as_array(Y)
    lam, U = np.linalg.eigh(a)
    scale = max(1.0, float(np.max(np.abs(lam), initial=0.0)))
    K = U[:, np.abs(lam) <= tol * scale]
    return K @ K.T


def residual_in_kernel(Y, M) -> np.ndarray:
    """Z = Pi M Pi with Pi the projector onto ker(Y)."""
    P = kernel_projector(Y)
    Z = P @ as_array(M) @ P
    return (Z + Z.T) / 2


@dataclass
class TraceIdentityReport:
    ok: bool
    trace_errors: dict    # ell -> relative error
    schatten_errors: dict  # alpha -> relative error


def orthogonal_residual_trace_identity(Y, Z, ells=range(3, 9), alphas=(2.5,), rtol: float = 1e-8) -> TraceIdentityReport:
    """Tr(Y+Z)^l = Tr Y^l + Tr Z^l and ||Y+Z||_a^a = ||Y||_a^a + ||Z||_a^a when Im Z is in ker Y."""
    y, z = as_array(Y), as_array(Z)
    scale = max(1.0, float(np.linalg.norm(y)) * max(1.0, float(np.linalg.norm(z))))
    if float(np.linalg.norm(y @ z)) > 1e-8 * scale:
        raise ValueError("Im(Z) is not contained in ker(Y)")
    ly, lz, ls = (np.linalg.eigvalsh(m) for m in (y, z, y + z))
    terr, serr = {}, {}
    for ell in ells:
        lhs = float(np.sum(ls ** ell))
        rhs = float(np.sum(ly ** ell) + np.sum(lz ** ell))
        den = max(1e-300, float(np.sum(np.abs(ls) ** ell)))
        terr[ell] = abs(lhs - rhs) / den
    for a in alphas:
        lhs = schatten_from_eigs(ls, a) ** a
        rhs = schatten_from_eigs(ly, a) ** a + schatten_from_eigs(lz, a) ** a
        serr[a] = abs(lhs - rhs) / max(1e-300, lhs)
    ok = all(e <= rtol for e in terr.values()) and all(e <= rtol for e in serr.values())
    return TraceIdentityReport(ok, terr, serr)


# ---------------------------------------------------------------- low-rank split containment

@dataclass
class ContainmentReport:
    kernel_ok: bool
    schatten_ok: bool
    hs_ok: bool
    z_schatten: float
    x_gt_schatten: float
    hs_residual: float
    hs_allowance: float

    @property
    def ok(self) -> bool:
        return self.kernel_ok and self.schatten_ok and self.hs_ok


def split_containment(X, R: int, ell: float, delta: float, seed: int = 0) -> ContainmentReport:
    """Build Y from a delta-perturbed top-R spectral point and Z = Pi X_> Pi; check membership.

    The HS allowance is the explicit bound
    sqrt(R)||lambda-mu|| + ||mu|| sqrt(2)||u-v|| + ||X_>||_HS sqrt(2N) ||U - V||_HS.
    """
    a = as_array(X)
    N = a.shape[0]
    sp = spectrum(a)
    pt = SpectralPoint(sp.eigenvalues[:R], sp.eigenvectors[:, :R])
    X_le = mat_assemble(pt)
    X_gt = a - X_le
    q = perturb(pt, delta, delta, np.random.default_rng(seed))
    Y = mat_assemble(q)
    V = q.frame
    Pi = np.eye(N) - V @ V.T
    Z = Pi @ X_gt @ Pi
    Z = (Z + Z.T) / 2
    kern = float(np.linalg.norm(Y @ Z)) <= 1e-9 * max(1.0, float(np.linalg.norm(Y)) * float(np.linalg.norm(Z)))
    zs = schatten_from_eigs(np.linalg.eigvalsh(Z), ell)
    xs = schatten_from_eigs(sp.eigenvalues[R:], ell)
    hs_res = float(np.linalg.norm(a - Y - Z))
    _, chain = hs_chain(pt, q)
    allowance = chain + float(np.linalg.norm(X_gt)) * math.sqrt(2 * N) * float(np.linalg.norm(pt.frame - V))
    scale = max(1.0, float(np.linalg.norm(a)))
    return ContainmentReport(kern, zs <= xs * (1 + 1e-10) + 1e-12 * scale, hs_res <= allowance + 1e-12 * scale,
                             zs, xs, hs_res, allowance)


# ---------------------------------------------------------------- cycle-count fluctuations

@dataclass
class CycleFluctReport:
    max_ratio: float      # max |Tr X^l - Tr Y^l| / (||Z||_{S_l}^l + slack)
    max_ratio_eps: float  # same against eps^l N^l p^l + slack
    trials: int
    ok: bool


def cycle_fluctuation_bound(X, Y, Z, ell: int) -> tuple:
    """(|Tr X^l - Tr Y^l|, ||Z||_{S_l}^l, l ||X-Y-Z||_HS (||X||_HS^{l-1} + ||Y+Z||_HS^{l-1}))."""
    x, y, z = as_array(X), as_array(Y), as_array(Z)
    lx, ly, lz = (np.linalg.eigvalsh(m) for m in (x, y, z))
    diff = abs(float(np.sum(lx ** ell) - np.sum(ly ** ell)))
    zterm = float(np.sum(np.abs(lz) ** ell))
    slack = ell * float(np.linalg.norm(x - y - z)) * (float(np.linalg.norm(x)) ** (ell - 1)
                                                     + float(np.linalg.norm(y + z)) ** (ell - 1))
    return diff, zterm, slack


def random_rank_point(N: int, R: int, rng: np.random.Generator, scale: float | None = None) -> SpectralPoint:
    Q, _ = np.linalg.qr(rng.normal(size=(N, R)))
    lam = rng.uniform(-1, 1, size=R) * (scale if scale is not None else N / math.sqrt(R))
    lam = lam[order_by_modulus(lam)]
    return SpectralPoint(lam, Q)


def cycle_fluctuation_check(N: int, R: int, ell: int, eps: float, p: float, noise: float = 1e-6,
                            trials: int = 100, seed: int = 0, single: bool = False) -> CycleFluctReport:
    """X = Y + Z + E with rank-R Y, Z on ker(Y) scaled to ||Z||_{S_l} = eps N p, and small noise E."""
    rng = np.random.default_rng(seed)
    worst, worst_eps = 0.0, 0.0
    for _ in range(trials):
        pt = random_rank_point(N, R, rng)
        Y = mat_assemble(pt)
        if single:
            w = rng.normal(size=N)
            w -= pt.frame @ (pt.frame.T @ w)
            w /= np.linalg.norm(w)
            Z = np.outer(w, w)
        else:
            M = rng.normal(size=(N, N))
            Z = residual_in_kernel(Y, M + M.T)
        zn = schatten_from_eigs(np.linalg.eigvalsh(Z), ell)
        Z *= eps * N * p / zn
        E = rng.normal(size=(N, N))
        E = E + E.T
        E *= noise / max(np.linalg.norm(E), 1e-300)
        X = Y + Z + E
        diff, zterm, slack = cycle_fluctuation_bound(X, Y, Z, ell)
        fl = 1e-12 * max(1.0, float(np.sum(np.abs(np.linalg.eigvalsh(X)) ** ell)))
        worst = max(worst, diff / (zterm + slack + fl))
        worst_eps = max(worst_eps, diff / ((eps * N * p) ** ell + slack + fl))
    return CycleFluctReport(worst, worst_eps, trials, worst <= 1 + 1e-6 and worst_eps <= 1 + 1e-6)


def schatten_fluctuation_bound(X, Y, Z, alpha: float) -> tuple:
    """Schatten-norm version of cycle_fluctuation_bound: (| ||X||_a^a - ||Y||_a^a |, ||Z||_a^a, a ||X-Y-Z||_op (||X||_{a-1}^{a-1} + ||Y+Z||_{a-1}^{a-1}))."""
    x, y, z = as_array(X), as_array(Y), as_array(Z)
    lx, ly, lz, lyz = (np.linalg.eigvalsh(m) for m in (x, y, z, y + z))
    diff = abs(float(np.sum(np.abs(lx) ** alpha) - np.sum(np.abs(ly) ** alpha)))
    zterm = float(np.sum(np.abs(lz) ** alpha))
    op = float(np.max(np.abs(np.linalg.eigvalsh(x - y - z))))
    slack = alpha * op * (float(np.sum(np.abs(lx) ** (alpha - 1))) + float(np.sum(np.abs(lyz) ** (alpha - 1))))
    return diff, zterm, slack


# ---------------------------------------------------------------- hom fluctuations

@dataclass
class HomFluctReport:
    trials: int
    max_ratio_integral: float  # |dhom| / (N ||X-Y||_op sum_e int_0^1 hom_{H_(e)}(W_t) dt)
    max_ratio_sampled: float   # against the sampled Max over the ball
    max_ratio_trivial: float   # against the N^{v(H)-2} cap
    scale_ratio: float          # max |dhom| / (eps0 K N^n p^m), reported only
    ok: bool


def _segment_integral(F, X, Y, nodes, weights):
    """int_0^1 hom_F((1-t)Y + tX) dt; exact for Gauss-Legendre with enough nodes."""
    if F is None:
        return 1.0
    vals = [float(homcount.hom(F, (1 - t) * Y + t * X, exact=False).value) for t in nodes]
    return float(np.dot(weights, vals))


def _ball_point(center, radius, rng):
    """Random point of {||X - center||_op <= radius} with entries in [0, 1] and zero diagonal."""
    N = center.shape[0]
    D = rng.normal(size=(N, N))
    D = np.triu(D, 1)
    D = D + D.T
    D *= rng.uniform(0, 1) * radius / float(np.max(np.abs(np.linalg.eigvalsh(D))))
    s = 1.0
    for _ in range(60):
        X = center + s * D
        if X.min() >= 0 and X.max() <= 1:
            return X
        s *= 0.7
    return center.copy()


def hom_fluctuation_check(H: PatternGraph, center, p: float, eps0: float = 0.5, K: float = 1.0,
                          trials: int = 100, seed: int = 0, radius: float | None = None,
                          pairs=None) -> HomFluctReport:
    """Check |hom_H(X) - hom_H(Y)| <= N ||X-Y||_op sum_e Max(H_(e); B) on random pairs in B.

    B is the operator-norm ball around ``center`` (radius eps0 N p^Delta_star / 2
    by default) intersected with [0,1]-valued matrices. Three right-hand
    sides are checked: the exact segment integral, the sampled maximum over
    the ball, and the trivial cap N^{v(H)-2}.
    """
    c = as_array(center)
    N = c.shape[0]
    rng = np.random.default_rng(seed)
    ds = degree_profile(H).delta_star
    if radius is None:
        radius = eps0 * N * p ** ds / 2
    rests = [remove_edge_closure(H, [e]) for e in H.edges]
    nodes, weights = np.polynomial.legendre.leggauss(max(2, H.m))
    nodes = (nodes + 1) / 2
    weights = weights / 2
    if pairs is None:
        pairs = [(_ball_point(c, radius, rng), _ball_point(c, radius, rng)) for _ in range(trials)]
    pts = [x for pr in pairs for x in pr] + [c]
    sampled = []
    for F in rests:
        if F is None:
            sampled.append(1.0)
        else:
            sampled.append(max(float(homcount.hom(F, X, exact=False).value) for X in pts))
    cap = float(N) ** (H.n - 2)
    r_int = r_smp = r_cap = r_prop = 0.0
    for X, Y in pairs:
        dh = abs(float(homcount.hom(H, X, exact=False).value) - float(homcount.hom(H, Y, exact=False).value))
        op = float(np.max(np.abs(np.linalg.eigvalsh(X - Y)), initial=0.0))
        integ = sum(_segment_integral(F, X, Y, nodes, weights) for F in rests)
        seg_max = []
        for F, s in zip(rests, sampled):
            if F is None:
                seg_max.append(1.0)
            else:
                seg = max(float(homcount.hom(F, (1 - t) * Y + t * X, exact=False).value) for t in np.r_[nodes, 0.0, 1.0])
                seg_max.append(max(s, seg))
        fl = 1e-12 * max(1.0, abs(float(homcount.hom(H, X, exact=False).value)))
        r_int = max(r_int, dh / (N * op * integ + fl) if dh > fl else 0.0)
        r_smp = max(r_smp, dh / (N * op * sum(seg_max) + fl) if dh > fl else 0.0)
        r_cap = max(r_cap, dh / (N * op * H.m * cap + fl) if dh > fl else 0.0)
        r_prop = max(r_prop, dh / (eps0 * K * float(N) ** H.n * p ** H.m))
    ok = r_int <= 1 + 1e-9 and r_smp <= 1 + 1e-9 and r_cap <= 1 + 1e-9
    return HomFluctReport(len(pairs), r_int, r_smp, r_cap, r_prop, ok)


@dataclass(frozen=True)
class OpBall:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "center", as_array(self.center))

    def contains(self, X, tol: float = 1e-12) -> bool:
        d = as_array(X) - self.center
        return float(np.max(np.abs(np.linalg.eigvalsh(d)), initial=0.0)) <= self.radius * (1 + tol)


# ---------------------------------------------------------------- deterministic inequality suite

@dataclass
class InequalityStats:
    name: str
    trials: int = 0
    violations: int = 0
    worst_ratio: float = 0.0  # max lhs / rhs (<= 1 means the bound holds)

    def add(self, lhs: float, rhs: float, rtol: float = 1e-9, atol: float = 1e-12) -> None:
        self.trials += 1
        if lhs > rhs * (1 + rtol) + atol:
            self.violations += 1
        if rhs > 0:
            self.worst_ratio = max(self.worst_ratio, lhs / rhs)

    @property
    def ok(self) -> bool:
        return self.violations == 0


def _sv_schatten(M: np.ndarray, a) -> float:
    """Schatten norm of a (possibly non-symmetric) matrix via singular values."""
    s = np.linalg.svd(M, compute_uv=False)
    return schatten_from_eigs(s, a)


def _random_xn(N: int, rng: np.random.Generator) -> np.ndarray:
    kind = rng.integers(3)
    if kind == 0:
        a = rng.random((N, N))
    elif kind == 1:
        a = (rng.random((N, N)) < rng.uniform(0.05, 0.95)).astype(float)
    else:
        a = rng.random((N, N)) ** 3
    a = np.triu(a, 1)
    return a + a.T


def _random_sym(N: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(N, N))
    return (a + a.T) / 2


def inequality_suite(trials: int = 2000, seed: int = 0, sizes=(5, 8, 12, 20)) -> dict:
    """Randomised check of the deterministic matrix inequalities behind the covering bounds.

    Each of the ``trials`` rounds draws X, Y in X_N, symmetric M1, M2, a
    rank-R Y' and a residual Z' on ker(Y'), and tests:
      rank_tail   ||X - X_le||_op = |lambda_{R+1}| <= N / sqrt(R+1)
      weyl        |lambda_j(M1) - lambda_j(M2)| <= ||M1 - M2||_op (real ordering)
      trace_power |Tr M1^l - Tr M2^l| <= l ||M1-M2||_op (||M1||_{l-1}^{l-1} + ||M2||_{l-1}^{l-1})
      holder      ||XY||_{S_g} <= ||X||_{S_a} ||Y||_{S_b}, (a,b,g) in {(4,4,2), (3,6,2), (inf,3,3)}
      additivity  trace and Schatten-2.5 additivity for Y' + Z'
    """
    rng = np.random.default_rng(seed)
    st = {k: InequalityStats(k) for k in ("rank_tail", "weyl", "trace_power", "holder", "additivity")}
    for _ in range(trials):
        N = int(rng.choice(sizes))
        X = _random_xn(N, rng)
        Y = _random_xn(N, rng)
        lx = np.linalg.eigvalsh(X)
        mod = np.sort(np.abs(lx))[::-1]
        R = int(rng.integers(1, N))
        st["rank_tail"].add(float(mod[R]), N / math.sqrt(R + 1))
        low = spectrum(X).reconstruct(R)
        st["rank_tail"].add(float(np.max(np.abs(np.linalg.eigvalsh(X - low)))) - float(mod[R]), 1e-9 * N)

        M1 = _random_sym(N, rng) if rng.random() < 0.5 else X
        M2 = M1 + rng.uniform(1e-6, 1) * _random_sym(N, rng) if rng.random() < 0.5 else _random_sym(N, rng)
        l1, l2 = np.linalg.eigvalsh(M1), np.linalg.eigvalsh(M2)
        op = float(np.max(np.abs(np.linalg.eigvalsh(M1 - M2))))
        st["weyl"].add(float(np.max(np.abs(l1 - l2))), op)
        ell = int(rng.integers(3, 9))
        lhs = abs(float(np.sum(l1 ** ell) - np.sum(l2 ** ell)))
        rhs = ell * op * (float(np.sum(np.abs(l1) ** (ell - 1))) + float(np.sum(np.abs(l2) ** (ell - 1))))
        st["trace_power"].add(lhs, rhs)

        A, B = (X, Y) if rng.random() < 0.5 else (M1, M2)
        for a, b, g in ((4, 4, 2), (3, 6, 2), (np.inf, 3, 3)):
            st["holder"].add(_sv_schatten(A @ B, g), _sv_schatten(A, a) * _sv_schatten(B, b))

        Rk = int(rng.integers(1, N))
        pt = random_rank_point(N, Rk, rng)
        Yp = mat_assemble(pt)
        P = np.eye(N) - pt.frame @ pt.frame.T
        Zp = P @ _random_sym(N, rng) @ P
        Zp = (Zp + Zp.T) / 2
        rep = orthogonal_residual_trace_identity(Yp, Zp)
        err = max(max(rep.trace_errors.values()), max(rep.schatten_errors.values()))
        st["additivity"].add(err, 1e-8, rtol=0.0, atol=0.0)
    return st
