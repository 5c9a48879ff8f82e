"""Optimal Hardy weights for Schrodinger operators on weighted graphs."""
from .coarea import LevelFlux, coarea_integral, level_flux, stokes_residual
from .criticality import (
    OptimalityConfig,
    RegionFamily,
    SpectralReport,
    energy_decay_certificate,
    log_cutoff,
    null_criticality_divergence,
    null_sequence,
    optimality_report,
    rayleigh_sweep,
)
from .errors import GraphHardyError, InputError
from .families import halfline, halfline_dirichlet, integer_line, lattice, path_graph, regular_tree
from .graph import (
    Exhaustion,
    FiniteGraph,
    GraphFunction,
    OracleGraph,
    WeightedGraph,
    ball,
    build_finite_graph,
    load_graph,
    restrict,
    save_graph,
)
from .green import GreenFunction, green_dirichlet, green_exhaustion, green_fourier_lattice
from .hardy import (
    HardyWeight,
    construct_weight,
    construct_weight_bounded,
    halfline_weight,
    weight_series_halfline,
)
from .linalg import LinearSolveSpec, pcg
from .schrodinger import SchrodingerOperator, quadratic_form, weighted_mass

__version__ = "0.1.0"

__all__ = [
    "Exhaustion", "FiniteGraph", "GraphFunction", "GraphHardyError", "GreenFunction",
    "HardyWeight", "InputError", "LevelFlux", "LinearSolveSpec", "OptimalityConfig",
    "OracleGraph", "RegionFamily", "SchrodingerOperator", "SpectralReport", "WeightedGraph",
    "ball", "build_finite_graph", "coarea_integral", "construct_weight",
    "construct_weight_bounded", "energy_decay_certificate", "green_dirichlet",
    "green_exhaustion", "green_fourier_lattice", "halfline", "halfline_dirichlet",
    "halfline_weight", "integer_line", "lattice", "level_flux", "load_graph", "log_cutoff",
    "null_criticality_divergence", "null_sequence", "optimality_report", "path_graph", "pcg",
    "quadratic_form", "rayleigh_sweep", "regular_tree", "restrict", "save_graph",
    "stokes_residual", "weight_series_halfline", "weighted_mass",
]
