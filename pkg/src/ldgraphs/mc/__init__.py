"""Sampling, exact enumeration and importance sampling for graph tail events."""
from .enumeration import TailEstimate, enumerate_tail, graph_table
from .functionals import EdgeCount, HomCount, SchattenNorm, TailProblem, functional_from_name
from .sampling import sample_edges, sample_gnp, to_adjacency
from .tilted import TiltSpec, is_tail, plain_mc, tilt_ball_probability

__all__ = [
    "TailEstimate",
    "enumerate_tail",
    "graph_table",
    "EdgeCount",
    "HomCount",
    "SchattenNorm",
    "TailProblem",
    "functional_from_name",
    "sample_edges",
    "sample_gnp",
    "to_adjacency",
    "TiltSpec",
    "is_tail",
    "plain_mc",
    "tilt_ball_probability",
]
