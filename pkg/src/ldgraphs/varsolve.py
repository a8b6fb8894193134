"""Numerical solution of the upper/lower tail variational problems.

    phi: inf { I_p(X) : X in [0,1]^{N x N} sym, zero diag, F(X) >= threshold }
    psi: the same with F(X) <= threshold

for F a homomorphism count, a Schatten norm or the edge sum. The engine is
mirror descent in the bit-entropy geometry (iterates move in logit
coordinates, where the gradient of I_p is z - logit p) with Armijo
backtracking, an augmented Lagrangian for the single inequality
constraint, and a final feasibility polish. Every returned point is
feasible, so objectives are upper bounds on the infimum.

Convex, permutation-invariant sub-level sets (Schatten balls, seminorming
hom counts, edge sums) also have a closed-form value: averaging over vertex
relabellings moves any feasible point to a constant matrix without raising
I_p, so the infimum is over constant matrices c J.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import homcount, kernels
from .graphs import PatternGraph, classify, degree_profile
from .homcount import is_cycle
from .matrices import SymMatrix, J, schatten_from_eigs
from .rates import clique_block, hub_block, ip_scalar, n_pairs, theta

EPS0 = 1e-9
ZMAX = math.log((1 - EPS0) / EPS0)


# ---------------------------------------------------------------- functionals

class Functional:
    """F(X) with gradient in the upper-triangle parametrisation."""

    name = "functional"

    def value(self, a: np.ndarray) -> float:
        raise NotImplementedError

    def value_grad(self, a: np.ndarray) -> tuple:
        raise NotImplementedError

    def at_const(self, c: float, N: int) -> float:
        return self.value(c * J(N))


class HomFunctional(Functional):
    def __init__(self, H: PatternGraph):
        self.H = H
        self.name = f"hom[{H.label()}]"
        self._cycle = is_cycle(H)

    def value(self, a):
        if self._cycle:
            P = np.linalg.matrix_power(a, self.H.n - 1)
            return float(np.sum(P * a))
        return float(homcount.hom(self.H, a, exact=False).value)

    def value_grad(self, a):
        return homcount.hom_grad(self.H, a)

    def at_const(self, c, N):
        # hom_H(cJ) = c^m hom_H(J_N)
        return c ** self.H.m * hom_J(self.H, N)


_HOMJ_CACHE: dict = {}


def hom_J(H: PatternGraph, N: int) -> float:
    key = (H, N)
    if key not in _HOMJ_CACHE:
        if is_cycle(H):
            # eigenvalues of J_N: N-1 once, -1 with multiplicity N-1
            _HOMJ_CACHE[key] = float((N - 1) ** H.n + (N - 1) * (-1) ** H.n)
        else:
            _HOMJ_CACHE[key] = float(homcount.hom(H, J(N), exact=False).value)
    return _HOMJ_CACHE[key]


class SchattenFunctional(Functional):
    def __init__(self, alpha):
        self.alpha = np.inf if alpha in ("inf", np.inf) else float(alpha)
        if self.alpha < 1:
            raise ValueError("not a norm")
        self.name = f"schatten[{alpha}]"

    def value(self, a):
        return schatten_from_eigs(np.linalg.eigvalsh(a), self.alpha)

    def value_grad(self, a):
        lam, U = np.linalg.eigh(a)
        val = schatten_from_eigs(lam, self.alpha)
        if val == 0.0:
            return 0.0, np.zeros_like(a)
        if self.alpha == np.inf:
            k = int(np.argmax(np.abs(lam)))
            w = np.zeros_like(lam)
            w[k] = np.sign(lam[k])
        else:
            r = np.abs(lam) / val
            w = np.sign(lam) * r ** (self.alpha - 1)
        G = 2.0 * (U * w) @ U.T
        np.fill_diagonal(G, 0.0)
        return val, G

    def at_const(self, c, N):
        return abs(c) * schatten_J(N, self.alpha)


def schatten_J(N: int, alpha) -> float:
    """||J_N||_{S_alpha} = ((N-1)^alpha + N - 1)^(1/alpha)."""
    return schatten_from_eigs(np.r_[N - 1.0, -np.ones(N - 1)], alpha)


class EdgeFunctional(Functional):
    name = "edges"

    def value(self, a):
        return float(np.sum(np.triu(a, 1)))

    def value_grad(self, a):
        G = J(a.shape[0])
        return self.value(a), G

    def at_const(self, c, N):
        return c * n_pairs(N)


# ---------------------------------------------------------------- problems

@dataclass
class VarProblem:
    """Tail variational problem.

    ``kind`` is "hom" (threshold t N^n p^m), "schatten" (threshold q (N-1))
    or "edges" (threshold t C(N,2) p). ``direction`` is "upper" (F >= thr)
    or "lower" (F <= thr). ``level`` is t (hom, edges) or q (schatten).
    """

    kind: str
    N: int
    p: float
    level: float
    direction: str = "upper"
    pattern: PatternGraph | None = None
    alpha: float | None = None

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError("p must lie in (0, 1)")
        if self.direction not in ("upper", "lower"):
            raise ValueError("direction must be 'upper' or 'lower'")
        if self.level < 0:
            raise ValueError("threshold level must be nonnegative")
        if self.kind == "hom" and self.pattern is None:
            raise ValueError("hom problems need a pattern")
        if self.kind == "schatten" and self.alpha is None:
            raise ValueError("schatten problems need alpha")
        if self.kind not in ("hom", "schatten", "edges"):
            raise ValueError(f"unknown functional {self.kind!r}")

    @property
    def functional(self) -> Functional:
        if self.kind == "hom":
            return HomFunctional(self.pattern)
        if self.kind == "schatten":
            return SchattenFunctional(self.alpha)
        return EdgeFunctional()

    @property
    def threshold(self) -> float:
        if self.kind == "hom":
            H = self.pattern
            return self.level * float(self.N) ** H.n * self.p ** H.m
        if self.kind == "schatten":
            return self.level * (self.N - 1)
        return self.level * n_pairs(self.N) * self.p

    @property
    def sign(self) -> float:
        return 1.0 if self.direction == "upper" else -1.0


@dataclass
class VarSolution:
    X: SymMatrix
    objective: float
    feasibility_gap: float
    kkt_residual: float
    starts_used: int
    best_candidate_cost: float
    start_label: str = ""
    multiplier: float = 0.0
    certified_bound: float | None = None
    history: list = field(default_factory=list, repr=False)


@dataclass
class SolveOptions:
    max_iter: int = 5000
    rounds: int = 10
    rho_factor: float = 10.0
    gm_tol: float = 1e-7          # times C(N,2)
    stall_iters: int = 50
    stall_rtol: float = 1e-13
    armijo: float = 1e-4
    snap: float = 1e-7
    seed: int = 0
    threads: int | None = None
    noise_starts: int = 1
    noise: float = 0.1
    starts: tuple = ("clique", "hub", "uniform", "noise")
    extra_starts: tuple = ()      # additional (label, matrix) pairs


# ---------------------------------------------------------------- engine

def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _logit(x):
    x = np.clip(x, EPS0, 1 - EPS0)
    return np.log(x) - np.log1p(-x)


class _Engine:
    def __init__(self, prob: VarProblem, opts: SolveOptions):
        self.prob = prob
        self.opts = opts
        self.F = prob.functional
        self.N = prob.N
        self.iu = np.triu_indices(self.N, 1)
        self.d = len(self.iu[0])
        self.lp = math.log(prob.p / (1 - prob.p))
        self.thr = prob.threshold
        self.s = prob.sign

    def full(self, x):
        a = np.zeros((self.N, self.N))
        a[self.iu] = x
        return a + a.T

    def ip(self, x):
        return float(np.sum(ip_scalar(self.prob.p, x)))

    def g(self, x):
        """Normalised constraint, feasible iff >= 0."""
        if self.thr == 0:
            return self.s * self.F.value(self.full(x))
        return self.s * (self.F.value(self.full(x)) / self.thr - 1.0)

    def g_grad(self, x):
        v, G = self.F.value_grad(self.full(x))
        if self.thr == 0:
            return self.s * v, self.s * G[self.iu]
        return self.s * (v / self.thr - 1.0), self.s * G[self.iu] / self.thr

    def ip_grad(self, x):
        return _logit(x) - self.lp

    # augmented Lagrangian for g >= 0
    def phi(self, x, lam, rho):
        gv = self.g(x)
        m = max(0.0, lam - rho * gv)
        return self.ip(x) + (m * m - lam * lam) / (2 * rho), gv

    def phi_grad(self, x, lam, rho):
        gv, gg = self.g_grad(x)
        m = max(0.0, lam - rho * gv)
        f = self.ip(x) + (m * m - lam * lam) / (2 * rho)
        return f, self.ip_grad(x) - m * gg, gv

    def inner(self, x, lam, rho, hist):
        o = self.opts
        z = _logit(x)
        eta = 1.0
        f, grad, _ = self.phi_grad(x, lam, rho)
        tol = o.gm_tol * self.d
        best_f, stall = f, 0
        for it in range(o.max_iter):
            for _ in range(60):
                zn = np.clip(z - eta * grad, -ZMAX, ZMAX)
                xn = _sigmoid(zn)
                fn, _ = self.phi(xn, lam, rho)
                if fn <= f + o.armijo * float(grad @ (xn - x)):
                    break
                eta *= 0.5
            else:
                break
            gm = float(np.linalg.norm(xn - x)) / eta
            z, x = zn, xn
            f, grad, _ = self.phi_grad(x, lam, rho)
            eta = min(eta * 1.5, 1e6)
            if gm <= tol:
                break
            if best_f - f <= o.stall_rtol * max(1.0, abs(f)):
                stall += 1
                if stall >= o.stall_iters:
                    break
            else:
                stall = 0
                best_f = f
        hist.append(it + 1)
        return x

    def multiplier_estimate(self, x):
        gi = self.ip_grad(x)
        _, gg = self.g_grad(x)
        den = float(gg @ gg)
        return max(0.0, float(gi @ gg) / den) if den > 0 else 0.0

    def polish(self, x):
        """Move along the constraint gradient (logit coordinates) until g >= 0."""
        gv = self.g(x)
        if gv >= 0:
            return x
        z = _logit(x)
        for _ in range(200):
            gv, gg = self.g_grad(x)
            if gv >= 0:
                return x
            dz = gg * x * (1 - x)
            nrm = float(dz @ dz)
            if nrm == 0:
                return x
            tau = -gv / nrm
            for _ in range(60):
                zn = np.clip(z + tau * dz, -ZMAX, ZMAX)
                xn = _sigmoid(zn)
                if self.g(xn) > gv:
                    break
                tau *= 0.5
            else:
                return x
            # overshoot slightly so rounding cannot leave us just short
            z = np.clip(z + 1.01 * tau * dz, -ZMAX, ZMAX)
            x = _sigmoid(z)
        return x

    def snap(self, x):
        y = x.copy()
        y[y < self.opts.snap] = 0.0
        y[y > 1 - self.opts.snap] = 1.0
        if np.array_equal(y, x):
            return x
        if self.g(y) >= 0 and self.ip(y) <= self.ip(x):
            return y
        return x

    def kkt(self, x, lam):
        _, gg = self.g_grad(x)
        z = _logit(x)
        step = self.ip_grad(x) - lam * gg
        xn = _sigmoid(np.clip(z - step, -ZMAX, ZMAX))
        return float(np.mean(np.abs(xn - x)))

    def solve_from(self, x0, hist):
        o = self.opts
        x = np.clip(x0, EPS0, 1 - EPS0)
        x = self.polish(x)
        lam = self.multiplier_estimate(x)
        scale = max(1.0, self.ip(x), lam)
        rho = scale
        for _ in range(o.rounds):
            x = self.inner(x, lam, rho, hist)
            gv = self.g(x)
            lam_new = max(0.0, lam - rho * gv)
            done = gv >= -1e-9 and abs(lam_new - lam) <= 1e-6 * max(1.0, lam)
            lam = lam_new
            if done:
                break
            if gv < -1e-9:
                rho *= o.rho_factor
        x = self.polish(x)
        x = self.snap(x)
        return x, lam


# ---------------------------------------------------------------- starts

def _repair_grow(make, feasible, lo, hi):
    """Smallest integer size in [lo, hi] for which make(size) is feasible, or None."""
    if lo > hi:
        return None
    if feasible(make(lo)):
        return lo
    if not feasible(make(hi)):
        return None
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if feasible(make(mid)):
            hi = mid
        else:
            lo = mid
    return hi


def uniform_level(prob: VarProblem) -> float | None:
    """Constant c with F(cJ) = threshold (boundary of the constant family)."""
    F, N, thr = prob.functional, prob.N, prob.threshold
    if prob.kind == "hom":
        hj = hom_J(prob.pattern, N)
        if hj == 0:
            return None
        return (thr / hj) ** (1.0 / prob.pattern.m) if prob.pattern.m else None
    if prob.kind == "schatten":
        return thr / schatten_J(N, prob.alpha)
    return thr / n_pairs(N)


def candidate_starts(prob: VarProblem, opts: SolveOptions) -> list:
    """(label, upper-triangle vector, is_feasible) for each warm start."""
    N, p = prob.N, prob.p
    iu = np.triu_indices(N, 1)
    F, thr, s = prob.functional, prob.threshold, prob.sign

    def feasible(a):
        return s * (F.value(a) - thr) >= 0

    out = []
    c = uniform_level(prob)
    if "uniform" in opts.starts and c is not None:
        if prob.direction == "upper":
            cu = min(1.0, max(c, p) * (1 + 1e-12))
        else:
            cu = min(c, p) * (1 - 1e-12)
        a = cu * J(N)
        if 0 <= cu <= 1:
            out.append(("uniform", a[iu], feasible(a)))
    if prob.direction == "upper" and prob.kind in ("hom", "schatten"):
        if prob.kind == "hom":
            H = prob.pattern
            Delta = degree_profile(H).max_degree if H.m else 1
        else:
            H, Delta = None, 2
        if "clique" in opts.starts:
            lvl = prob.level
            n = H.n if H is not None else 2
            N0 = int(math.floor((2 * lvl) ** (1.0 / n) * N * p ** (Delta / 2.0)))
            N0 = min(max(N0, 2), N)
            k = _repair_grow(lambda k: clique_block(N, p, k), feasible, N0, N)
            if k is not None:
                out.append(("clique", clique_block(N, p, k)[iu], True))
        if "hub" in opts.starts:
            u = max(prob.level - 1.0, 1e-6)
            try:
                b = theta(H, u) if H is not None and Delta >= 2 else u
            except ValueError:
                b = u
            k0 = min(max(int(math.floor(b * N * p ** Delta)), 1), N)
            k = _repair_grow(lambda k: hub_block(N, p, k), feasible, k0, N)
            if k is not None:
                out.append(("hub", hub_block(N, p, k)[iu], True))
    if "noise" in opts.starts:
        base = out[0][1] if out else np.full(len(iu[0]), p)
        keys = kernels.stream_keys(opts.seed, np.arange(1000, 1000 + opts.noise_starts))
        U = kernels.hash_uniforms(keys, len(iu[0]))
        for r in range(opts.noise_starts):
            x = np.clip(base * (1 + opts.noise * (2 * U[r] - 1)), EPS0, 1 - EPS0)
            out.append((f"noise{r}", x, feasible(_full(x, N))))
    for label, mat in opts.extra_starts:
        a = np.asarray(mat, dtype=float)
        out.append((label, a[iu], feasible(a)))
    return out


def _full(x, N):
    a = np.zeros((N, N))
    a[np.triu_indices(N, 1)] = x
    return a + a.T


def _threads(opts):
    if opts.threads:
        return int(opts.threads)
    env = os.environ.get("LDG_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def solve(prob: VarProblem, opts: SolveOptions | None = None) -> VarSolution:
    """Multi-start solve; returns the feasible point of least I_p found."""
    opts = opts or SolveOptions()
    if prob.N > 400:
        raise ValueError("dense solver is limited to N <= 400")
    eng = _Engine(prob, opts)
    starts = candidate_starts(prob, opts)
    if not starts:
        raise RuntimeError("infeasible within budget")
    cand_costs = [eng.ip(x) for lab, x, ok in starts if ok and not lab.startswith("noise")]
    best_cand = min(cand_costs) if cand_costs else math.inf

    def run(item):
        idx, (label, x0, _) = item
        hist = []
        x, lam = eng.solve_from(x0, hist)
        return idx, label, x, lam, hist

    items = list(enumerate(starts))
    nthreads = min(_threads(opts), len(items))
    if nthreads > 1:
        with ThreadPoolExecutor(nthreads) as ex:
            results = list(ex.map(run, items))
    else:
        results = [run(it) for it in items]

    pool = []
    for idx, label, x, lam, hist in results:
        if eng.g(x) >= 0:
            pool.append((eng.ip(x), idx, label, x, lam, hist))
    for idx, (label, x0, ok) in items:
        if ok:
            pool.append((eng.ip(x0), idx + 0.5, label + ":raw", x0, eng.multiplier_estimate(np.clip(x0, EPS0, 1 - EPS0)), []))
    if not pool:
        raise RuntimeError("infeasible within budget")
    pool.sort(key=lambda r: (r[0], r[1]))
    obj, _, label, x, lam, hist = pool[0]
    gv = eng.g(x)
    return VarSolution(
        X=SymMatrix(eng.full(x)),
        objective=obj,
        feasibility_gap=max(0.0, -gv),
        kkt_residual=eng.kkt(np.clip(x, EPS0, 1 - EPS0), lam),
        starts_used=len(starts),
        best_candidate_cost=best_cand,
        start_label=label,
        multiplier=lam,
        history=hist,
    )


def solve_phi(prob: VarProblem, opts: SolveOptions | None = None) -> VarSolution:
    if prob.direction != "upper":
        raise ValueError("solve_phi is for upper-tail problems")
    return solve(prob, opts)


def solve_psi(prob: VarProblem, opts: SolveOptions | None = None) -> VarSolution:
    """Lower-tail solve; attaches the certified bound when the sub-level set is convex."""
    if prob.direction != "lower":
        raise ValueError("solve_psi is for lower-tail problems")
    sol = solve(prob, opts)
    cert = None
    if prob.kind == "schatten":
        cert = certified_convex_psi(prob.alpha, prob.N, prob.p, prob.level)
    elif prob.kind == "edges":
        cert = constant_family_value(prob)
    elif prob.kind == "hom" and classify(prob.pattern)["seminorming"] == "known-yes":
        # threshold level t corresponds to t = (qhat/p)^m with qhat = q - q/N
        H = prob.pattern
        qhat = prob.p * prob.level ** (1.0 / H.m)
        q = qhat / (1.0 - 1.0 / prob.N)
        cert = certified_convex_psi(H, prob.N, prob.p, min(q, prob.p))
    sol.certified_bound = cert
    if cert is not None and sol.objective < cert - 1e-8:
        raise AssertionError(f"solver objective {sol.objective} below certified bound {cert}")
    return sol


# ---------------------------------------------------------------- convex certificates

def certified_convex_psi(alpha_or_pattern, N: int, p: float, q: float) -> float:
    """Certified lower bound C(N,2) I_p(q) on the lower-tail value.

    For a Schatten norm the threshold is q (N-1); for a seminorming pattern
    it is qhat^m N^n with qhat = q - q/N. Patterns without a seminorming
    certificate raise.
    """
    if isinstance(alpha_or_pattern, PatternGraph):
        if classify(alpha_or_pattern)["seminorming"] != "known-yes":
            raise ValueError("no convexity certificate")
    else:
        a = alpha_or_pattern
        if not (a in ("inf", np.inf) or float(a) >= 1):
            raise ValueError("not a norm")
    if not 0 <= q <= 1:
        raise ValueError("q must lie in [0, 1]")
    if q >= p:
        return 0.0
    return n_pairs(N) * ip_scalar(p, q)


def constant_family_value(prob: VarProblem) -> float:
    """Exact infimum for a convex, relabelling-invariant constraint set.

    Valid for Schatten-norm balls/complements only in the lower direction,
    edge sums in either direction, and seminorming hom counts in the lower
    direction; the caller is responsible for convexity.
    """
    c = uniform_level(prob)
    p = prob.p
    if c is None:
        return math.inf
    if prob.direction == "lower":
        c = min(c, p)
    else:
        if c > 1:
            return math.inf
        c = max(c, p)
    return n_pairs(prob.N) * ip_scalar(p, min(max(c, 0.0), 1.0))


# ---------------------------------------------------------------- polyhedral sets

@dataclass
class PolyValue:
    dual: float      # certified lower bound on I_p(K)
    primal: float    # I_p at a feasible point (upper bound), inf if none found
    x: np.ndarray
    multipliers: np.ndarray

    @property
    def gap(self) -> float:
        return self.primal - self.dual


def ip_polyhedron(A, b, p: float, interior=None) -> PolyValue:
    """inf { sum_k I_p(x_k) : A x <= b, x in [0,1]^d } by Lagrangian duality.

    For lambda >= 0 the inner minimiser is x(lambda) = sigmoid(logit p - A^T lambda)
    and the dual function is concave with gradient A x(lambda) - b. The dual
    value is a lower bound for any lambda; the primal value comes from
    x(lambda*) pushed toward ``interior`` (a strictly feasible point) until
    feasible.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float)
    lp = math.log(p / (1 - p))

    def x_of(lam):
        return _sigmoid(lp - A.T @ lam)

    def neg_dual(lam):
        x = x_of(lam)
        val = float(np.sum(ip_scalar(p, np.clip(x, 0, 1)))) + float(lam @ (A @ x - b))
        return -val, -(A @ x - b)

    m = A.shape[0]
    res = minimize(neg_dual, np.zeros(m), jac=True, method="L-BFGS-B",
                   bounds=[(0, None)] * m, options={"maxiter": 5000, "ftol": 1e-15, "gtol": 1e-12})
    lam = np.maximum(res.x, 0.0)
    dual = -neg_dual(lam)[0]
    x = x_of(lam)
    viol = A @ x - b
    primal = math.inf
    if np.all(viol <= 0):
        primal = float(np.sum(ip_scalar(p, x)))
    elif interior is not None:
        y = np.asarray(interior, dtype=float)
        lo, hi = 0.0, 1.0  # weight on x
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            if np.all(A @ (mid * x + (1 - mid) * y) <= b):
                lo = mid
            else:
                hi = mid
        xf = lo * x + (1 - lo) * y
        x = xf
        primal = float(np.sum(ip_scalar(p, np.clip(xf, 0, 1))))
    return PolyValue(dual, primal, x, lam)
