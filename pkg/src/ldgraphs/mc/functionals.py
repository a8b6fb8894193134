"""Graph functionals evaluated on batches of adjacency matrices, and tail events."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..graphs import PatternGraph, load_pattern
from ..homcount import hom_batch
from ..matrices import schatten_from_eigs

REL_SLACK = 1e-9


class GraphFunctional:
    name = "functional"
    integer = False

    def batch(self, A: np.ndarray) -> np.ndarray:
        """Values for a (B, N, N) 0/1 stack."""
        raise NotImplementedError

    # functionals are identified by name, so enumeration tables can be cached
    def __eq__(self, other):
        return isinstance(other, GraphFunctional) and self.name == other.name

    def __hash__(self):
        return hash(self.name)


class HomCount(GraphFunctional):
    integer = True

    def __init__(self, H: PatternGraph):
        self.H = H
        self.name = f"hom[{H.label()}]"

    def batch(self, A):
        return hom_batch(self.H, A.astype(np.int64))


class EdgeCount(GraphFunctional):
    name = "edges"
    integer = True

    def batch(self, A):
        return A.reshape(A.shape[0], -1).sum(axis=1, dtype=np.int64) // 2


class SchattenNorm(GraphFunctional):
    def __init__(self, alpha):
        self.alpha = np.inf if alpha in ("inf", np.inf) else float(alpha)
        self.name = f"schatten[{alpha}]"

    def batch(self, A):
        lam = np.linalg.eigvalsh(A.astype(np.float64))
        return np.array([schatten_from_eigs(row, self.alpha) for row in lam])


def functional_from_name(name: str) -> GraphFunctional:
    """'edges', 'schatten:<alpha>' or a pattern name/file for hom counts."""
    if name == "edges":
        return EdgeCount()
    if name.startswith("schatten:"):
        return SchattenNorm(name.split(":", 1)[1])
    return HomCount(load_pattern(name))


@dataclass(frozen=True)
class TailProblem:
    """Event {F(G) >= threshold} ("ge") or {F(G) <= threshold} ("le") under G(N, p)."""

    functional: GraphFunctional
    N: int
    p: float
    direction: str
    threshold: float

    def __post_init__(self):
        if self.direction not in ("ge", "le"):
            raise ValueError("direction must be 'ge' or 'le'")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")

    def indicator(self, values: np.ndarray) -> np.ndarray:
        # a small slack enlarges the event so rounding never drops boundary graphs
        t = self.threshold
        slack = 0.0 if self.functional.integer else REL_SLACK * max(1.0, abs(t))
        if self.direction == "ge":
            return values >= t - slack
        return values <= t + slack

    def event(self, A: np.ndarray) -> np.ndarray:
        return self.indicator(self.functional.batch(A))

    def describe(self) -> str:
        op = ">=" if self.direction == "ge" else "<="
        return f"P({self.functional.name}(G({self.N},{self.p})) {op} {self.threshold!r})"
