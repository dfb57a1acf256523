from .dataset import inverse_permute, one_hot, permute_labeled_first, validate
from .types import (
    LabelIndicator,
    Laplacian,
    LatentModel,
    LmsscConfig,
    MultiViewDataset,
    SimilarityGraph,
    SolverWarning,
)

__all__ = [
    "LabelIndicator",
    "Laplacian",
    "LatentModel",
    "LmsscConfig",
    "MultiViewDataset",
    "SimilarityGraph",
    "SolverWarning",
    "inverse_permute",
    "one_hot",
    "permute_labeled_first",
    "validate",
]
