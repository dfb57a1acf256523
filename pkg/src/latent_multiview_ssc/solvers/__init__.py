from .baselines import BaselineResult, ViewWeights, amgl_fit, mlan_fit
from .graph import (
    AlphaEstimate,
    PairwiseDistances,
    alpha_from_k,
    connected_components,
    laplacian,
    project_row_to_simplex,
    squared_distances,
    update_similarity,
    zero_eigenvalue_multiplicity,
)
from .latent import SylvesterSystem, nnls_row, update_shared_factor, update_view_factors
from .lmssc import IterationRecord, SolverState, fit, objective, predict
from .propagate import HarmonicBlocks, decide, gfhf_baseline, harmonic_solve, knn_gaussian_graph

__all__ = [
    "AlphaEstimate",
    "BaselineResult",
    "HarmonicBlocks",
    "IterationRecord",
    "PairwiseDistances",
    "SolverState",
    "SylvesterSystem",
    "ViewWeights",
    "alpha_from_k",
    "amgl_fit",
    "connected_components",
    "decide",
    "fit",
    "gfhf_baseline",
    "harmonic_solve",
    "knn_gaussian_graph",
    "laplacian",
    "mlan_fit",
    "nnls_row",
    "objective",
    "predict",
    "project_row_to_simplex",
    "squared_distances",
    "update_shared_factor",
    "update_similarity",
    "update_view_factors",
    "zero_eigenvalue_multiplicity",
]
