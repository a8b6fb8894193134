"""Small pattern graphs H and their combinatorics.

Covers degree data (max degree, the edge-neighbourhood count Delta_star,
the max-degree core), induced deletions around edges, quotient graphs
for the hom/inj partition identity, independence polynomials, and the
bipartite/regular/seminorming classification.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

MAX_QUOTIENT_VERTICES = 8
MAX_INDPOLY_VERTICES = 24


@dataclass(frozen=True)
class PatternGraph:
    """Simple undirected graph on vertices 0..n-1 with canonically sorted edges."""

    n_vertices: int
    edges: tuple = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        n = int(self.n_vertices)
        if n < 1:
            raise ValueError("pattern needs at least one vertex")
        canon = []
        for e in self.edges:
            u, v = (int(x) for x in e)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) has a label outside [0, {n})")
            canon.append((min(u, v), max(u, v)))
        canon.sort()
        if len(set(canon)) != len(canon):
            raise ValueError("duplicate edge")
        object.__setattr__(self, "n_vertices", n)
        object.__setattr__(self, "edges", tuple(canon))

    @property
    def n(self) -> int:
        return self.n_vertices

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.edges:
            A[u, v] = A[v, u] = True
        return A

    @property
    def degrees(self) -> np.ndarray:
        d = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            d[u] += 1
            d[v] += 1
        return d

    def neighbours(self) -> list:
        nb = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nb[u].add(v)
            nb[v].add(u)
        return nb

    @property
    def is_connected(self) -> bool:
        nb = self.neighbours()
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in nb[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == self.n

    def induced(self, vertices: Iterable[int]) -> "PatternGraph":
        """Induced subgraph, relabelled to 0..k-1 in increasing order of the kept labels."""
        keep = sorted(set(int(v) for v in vertices))
        idx = {v: i for i, v in enumerate(keep)}
        if not keep:
            raise ValueError("induced subgraph would be empty")
        es = [(idx[u], idx[v]) for u, v in self.edges if u in idx and v in idx]
        return PatternGraph(len(keep), tuple(es))

    def label(self) -> str:
        return self.name or f"H(n={self.n},m={self.m})"

    def __str__(self):
        return self.label()


# ---------------------------------------------------------------- named patterns

def cycle(ell: int) -> PatternGraph:
    if ell < 3:
        raise ValueError("cycles need at least 3 vertices")
    return PatternGraph(ell, tuple((i, (i + 1) % ell) for i in range(ell)), name=f"C{ell}")


def complete(n: int) -> PatternGraph:
    return PatternGraph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)), name=f"K{n}")


def complete_bipartite(a: int, b: int) -> PatternGraph:
    es = tuple((i, a + j) for i in range(a) for j in range(b))
    return PatternGraph(a + b, es, name=f"K_{{{a},{b}}}")


def star(k: int) -> PatternGraph:
    """K_{1,k}: a centre joined to k leaves."""
    g = complete_bipartite(1, k)
    return PatternGraph(g.n, g.edges, name=f"star_{k}")


def path(k: int) -> PatternGraph:
    """Path on k vertices (k-1 edges)."""
    if k < 1:
        raise ValueError("path needs at least one vertex")
    return PatternGraph(k, tuple((i, i + 1) for i in range(k - 1)), name=f"path_{k}")


def empty(n: int) -> PatternGraph:
    return PatternGraph(n, (), name=f"E{n}")


_NAMED = [
    (re.compile(r"^C(\d+)$"), lambda g: cycle(int(g[0]))),
    (re.compile(r"^K(\d+)$"), lambda g: complete(int(g[0]))),
    (re.compile(r"^K_\{?(\d+),(\d+)\}?$"), lambda g: complete_bipartite(int(g[0]), int(g[1]))),
    (re.compile(r"^star_(\d+)$"), lambda g: star(int(g[0]))),
    (re.compile(r"^path_(\d+)$"), lambda g: path(int(g[0]))),
    (re.compile(r"^E(\d+)$"), lambda g: empty(int(g[0]))),
]


def named(name: str) -> PatternGraph:
    """Pattern from a name: C3..C12 (any ell >= 3), Kn, K_{m,n}, star_k, path_k, En."""
    s = name.strip().replace(" ", "")
    for rx, make in _NAMED:
        mt = rx.match(s)
        if mt:
            return make(mt.groups())
    raise ValueError(f"unknown pattern name {name!r}")


def parse_pattern(text: str, name: str = "") -> PatternGraph:
    """Parse the 'n m' + edge-lines format; '#' starts a comment."""
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    if not rows or len(rows[0]) != 2:
        raise ValueError("first line must be 'n m'")
    n, m = int(rows[0][0]), int(rows[0][1])
    body = rows[1:]
    if len(body) != m:
        raise ValueError(f"header declares {m} edges, found {len(body)}")
    es = []
    for r in body:
        if len(r) != 2:
            raise ValueError(f"bad edge line {' '.join(r)!r}")
        es.append((int(r[0]), int(r[1])))
    return PatternGraph(n, tuple(es), name=name)


def format_pattern(H: PatternGraph) -> str:
    lines = [f"{H.n} {H.m}"] + [f"{u} {v}" for u, v in H.edges]
    return "\n".join(lines) + "\n"


def load_pattern(spec: str) -> PatternGraph:
    """A built-in name, or a path to a pattern file."""
    try:
        return named(spec)
    except ValueError:
        p = Path(spec)
        if p.exists():
            return parse_pattern(p.read_text(), name=p.stem)
        raise


# ---------------------------------------------------------------- degree data

@dataclass(frozen=True)
class DegreeProfile:
    max_degree: int
    delta_star: int
    max_degree_core: PatternGraph


def remove_edge_closure(H: PatternGraph, edges) -> PatternGraph | None:
    """Induced subgraph on V minus every endpoint of the listed edges.

    Returns None when no vertex is left (the empty graph, hom = 1).
    """
    drop = set()
    es = set(H.edges)
    for e in edges:
        u, v = int(e[0]), int(e[1])
        key = (min(u, v), max(u, v))
        if key not in es:
            raise ValueError(f"edge {key} is not in the pattern")
        drop.update(key)
    keep = [v for v in range(H.n) if v not in drop]
    if not keep:
        return None
    return H.induced(keep)


def degree_profile(H: PatternGraph) -> DegreeProfile:
    if H.m == 0:
        raise ValueError("no edges")
    deg = H.degrees
    Delta = int(deg.max())
    by_adjacency = max(int(deg[u] + deg[v] - 1) for u, v in H.edges)
    smallest = min(
        (g.m if g is not None else 0) for g in (remove_edge_closure(H, [e]) for e in H.edges)
    )
    by_deletion = H.m - smallest
    if by_adjacency != by_deletion:  # pragma: no cover - an identity
        raise AssertionError(f"Delta_star mismatch: {by_adjacency} vs {by_deletion}")
    core = H.induced(np.flatnonzero(deg == Delta))
    return DegreeProfile(Delta, by_adjacency, core)


# ---------------------------------------------------------------- quotients

def set_partitions(n: int) -> Iterator[tuple]:
    """All partitions of range(n) as restricted growth strings, in lexicographic order."""
    if n == 0:
        yield ()
        return
    a = [0] * n

    def rec(i, top):
        if i == n:
            yield tuple(a)
            return
        for b in range(top + 2):
            a[i] = b
            yield from rec(i + 1, max(top, b))

    a[0] = 0
    yield from rec(1, 0)


def blocks_of(rgs: tuple) -> tuple:
    k = max(rgs) + 1 if rgs else 0
    out = [[] for _ in range(k)]
    for v, b in enumerate(rgs):
        out[b].append(v)
    return tuple(tuple(b) for b in out)


@dataclass(frozen=True)
class Quotient:
    blocks: tuple
    graph: PatternGraph
    # edge multiplicities of the multigraph quotient, keyed by canonical block pair
    multiplicity: tuple


@dataclass(frozen=True)
class QuotientFamily:
    pattern: PatternGraph
    entries: tuple

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def quotient_of(H: PatternGraph, rgs: tuple) -> Quotient | None:
    """Quotient by the partition with block labels ``rgs``; None if a block holds an edge."""
    cnt = Counter()
    for u, v in H.edges:
        a, b = rgs[u], rgs[v]
        if a == b:
            return None
        cnt[(min(a, b), max(a, b))] += 1
    k = max(rgs) + 1
    g = PatternGraph(k, tuple(cnt))
    mult = tuple(sorted(cnt.items()))
    return Quotient(blocks_of(rgs), g, mult)


def quotients(H: PatternGraph) -> QuotientFamily:
    """All loop-free quotients H/P, identity partition first."""
    if H.n > MAX_QUOTIENT_VERTICES:
        raise ValueError("pattern too large for quotient enumeration")
    entries = []
    for rgs in set_partitions(H.n):
        q = quotient_of(H, rgs)
        if q is not None:
            entries.append(q)
    # the identity partition (all singletons) is the last restricted growth string
    entries.sort(key=lambda q: -len(q.blocks))
    return QuotientFamily(H, tuple(entries))


def mobius_weight(blocks: tuple) -> int:
    """Moebius function of the partition lattice from the bottom element."""
    w = 1
    for b in blocks:
        k = len(b)
        w *= (-1) ** (k - 1) * _fact(k - 1)
    return w


@lru_cache(maxsize=None)
def _fact(k: int) -> int:
    return 1 if k <= 1 else k * _fact(k - 1)


# ---------------------------------------------------------------- independence polynomial

def independence_polynomial(G: PatternGraph) -> list:
    """Coefficients a_0..a_d, a_k = number of independent sets of size k (d = independence number)."""
    if G.n > MAX_INDPOLY_VERTICES:
        raise ValueError("pattern too large for independence polynomial")
    nb = [0] * G.n
    for u, v in G.edges:
        nb[u] |= 1 << v
        nb[v] |= 1 << u

    @lru_cache(maxsize=None)
    def poly(mask: int) -> tuple:
        if mask == 0:
            return (1,)
        v = (mask & -mask).bit_length() - 1
        without = poly(mask & ~(1 << v))
        with_v = poly(mask & ~(1 << v) & ~nb[v])
        out = [0] * max(len(without), len(with_v) + 1)
        for i, c in enumerate(without):
            out[i] += c
        for i, c in enumerate(with_v):
            out[i + 1] += c
        return tuple(out)

    coeffs = list(poly((1 << G.n) - 1))
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def poly_eval(coeffs, x: float) -> float:
    r = 0.0
    for c in reversed(coeffs):
        r = r * x + c
    return r


# ---------------------------------------------------------------- classification

def two_colouring(H: PatternGraph) -> np.ndarray | None:
    colour = -np.ones(H.n, dtype=np.int64)
    nb = H.neighbours()
    for s in range(H.n):
        if colour[s] >= 0:
            continue
        colour[s] = 0
        stack = [s]
        while stack:
            x = stack.pop()
            for y in nb[x]:
                if colour[y] < 0:
                    colour[y] = 1 - colour[x]
                    stack.append(y)
                elif colour[y] == colour[x]:
                    return None
    return colour


def classify(H: PatternGraph) -> dict:
    """Bipartite/regular flags plus a tri-state seminorming/Sidorenko label.

    Seminorming is reported known-yes only for the families with a known
    proof (even cycles, K_{a,b} with a and b even), known-no when H is not
    bipartite, and unknown otherwise.
    """
    col = two_colouring(H)
    bip = col is not None
    deg = H.degrees
    regular = bool(H.m > 0 and np.all(deg == deg[0]))
    semi = "unknown"
    if not bip:
        semi = "known-no"
    elif H.m > 0 and H.is_connected:
        even_cycle = regular and deg[0] == 2 and H.n % 2 == 0 and H.n >= 4
        a = int(np.sum(col == 0))
        b = H.n - a
        kab = H.m == a * b and a % 2 == 0 and b % 2 == 0
        if even_cycle or kab:
            semi = "known-yes"
    sido = "known-yes" if semi == "known-yes" else "unknown"
    return {"bipartite": bip, "regular": regular, "seminorming": semi, "sidorenko": sido}
