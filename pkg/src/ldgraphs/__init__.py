"""Large-deviation rates and checks for subgraph counts in sparse random graphs."""
from .kernels import BACKEND
from .graphs import PatternGraph, cycle, complete, complete_bipartite, star, path, named, load_pattern
from .matrices import SymMatrix, spectrum, schatten, op_norm, hs_norm
from .homcount import hom, inj, hom_cycle_spectral, dir_derivative
from .rates import ip_scalar, theta, c_H, predicted_upper_rate
from .varsolve import VarProblem, SolveOptions, solve, solve_phi, solve_psi

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "PatternGraph", "cycle", "complete", "complete_bipartite", "star", "path", "named",
    "load_pattern", "SymMatrix", "spectrum", "schatten", "op_norm", "hs_norm", "hom", "inj",
    "hom_cycle_spectral", "dir_derivative", "ip_scalar", "theta", "c_H", "predicted_upper_rate",
    "VarProblem", "SolveOptions", "solve", "solve_phi", "solve_psi", "__version__",
]
