"""
Domain types shared by every solver.

Matrices follow the column-sample convention: a view X^v is d_v x N and the
shared latent representation H is r x N. Label scores F are N x c with the
labeled block first.
"""

from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..config import settings
from ..errors import InvariantError


@dataclass(frozen=True, eq=False)
class MultiViewDataset:
    views: tuple[np.ndarray, ...]
    labels: np.ndarray  # storage order, dense class ids 0..c-1
    labeled_count: int
    permutation: np.ndarray  # storage index -> original index
    n_classes: int | None = None

    @property
    def n_samples(self) -> int:
        return int(self.views[0].shape[1]) if self.views else 0

    @property
    def n_views(self) -> int:
        return len(self.views)

    @property
    def unlabeled_count(self) -> int:
        return self.n_samples - self.labeled_count

    @property
    def class_count(self) -> int:
        if self.n_classes is not None:
            return self.n_classes
        return int(self.labels.max()) + 1 if self.labels.size else 0

    @property
    def view_dims(self) -> list[int]:
        return [int(view.shape[0]) for view in self.views]

    @property
    def labeled_labels(self) -> np.ndarray:
        return self.labels[: self.labeled_count]

    @property
    def unlabeled_labels(self) -> np.ndarray:
        return self.labels[self.labeled_count:]


@dataclass(frozen=True, eq=False)
class SimilarityGraph:
    weights: np.ndarray
    neighbor_count_hint: int

    @property
    def n_nodes(self) -> int:
        return int(self.weights.shape[0])

    def validate(self, atol: float = 1e-8) -> None:
        s = self.weights
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise InvariantError(f"similarity must be square, got {s.shape}")
        if np.any(np.diag(s) != 0.0):
            raise InvariantError("similarity diagonal must be exactly zero")
        if s.min() < 0.0 or s.max() > 1.0:
            raise InvariantError("similarity entries must lie in [0, 1]")
        row_error = np.abs(s.sum(axis=1) - 1.0).max()
        if row_error > atol:
            raise InvariantError(f"similarity rows must sum to 1 (max deviation {row_error:.3e})")


@dataclass(frozen=True, eq=False)
class Laplacian:
    matrix: np.ndarray
    source: SimilarityGraph | None = None

    def validate(self, sym_tol: float = 1e-10, row_tol: float = 1e-8, psd_tol: float = 1e-8) -> None:
        lap = self.matrix
        asym = np.abs(lap - lap.T).max()
        if asym > sym_tol:
            raise InvariantError(f"laplacian not symmetric (max asymmetry {asym:.3e})")
        row_error = np.abs(lap.sum(axis=1)).max()
        if row_error > row_tol:
            raise InvariantError(f"laplacian rows must sum to 0 (max {row_error:.3e})")
        smallest = float(np.linalg.eigvalsh(lap)[0])
        if smallest < -psd_tol:
            raise InvariantError(f"laplacian not PSD (smallest eigenvalue {smallest:.3e})")


@dataclass(frozen=True, eq=False)
class LatentModel:
    view_factors: tuple[np.ndarray, ...]
    shared: np.ndarray

    @property
    def latent_dim(self) -> int:
        return int(self.shared.shape[0])

    def validate(self, atol: float = 1e-12) -> None:
        for v, factor in enumerate(self.view_factors):
            if factor.shape[1] != self.latent_dim:
                raise InvariantError(f"W^{v} has {factor.shape[1]} columns, expected r={self.latent_dim}")
            if factor.size and factor.min() < -atol:
                raise InvariantError(f"W^{v} has negative entries (min {factor.min():.3e})")


@dataclass(frozen=True, eq=False)
class LabelIndicator:
    scores: np.ndarray
    labeled_count: int

    @property
    def labeled_block(self) -> np.ndarray:
        return self.scores[: self.labeled_count]

    @property
    def unlabeled_block(self) -> np.ndarray:
        return self.scores[self.labeled_count:]

    def validate(self, labels: np.ndarray, atol: float = 1e-6) -> None:
        n_classes = self.scores.shape[1]
        expected = np.zeros((self.labeled_count, n_classes))
        expected[np.arange(self.labeled_count), labels[: self.labeled_count]] = 1.0
        if not np.array_equal(self.labeled_block, expected):
            raise InvariantError("labeled rows of F must equal the one-hot ground truth")
        f_u = self.unlabeled_block
        if f_u.size == 0:
            return
        if f_u.min() < -atol or f_u.max() > 1.0 + atol:
            raise InvariantError("unlabeled scores must lie in [0, 1]")
        row_error = np.abs(f_u.sum(axis=1) - 1.0).max()
        if row_error > atol:
            raise InvariantError(f"unlabeled score rows must sum to 1 (max deviation {row_error:.3e})")


@dataclass
class SolverWarning:
    kind: str  # "alpha-clamp", "laplacian-ridge", "sylvester-ridge", ...
    message: str
    iteration: int | None = None
    details: dict[str, Any] = field(default_factory=dict)


class LmsscConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    beta: float = Field(default_factory=lambda: settings.BETA)
    gamma: float = Field(default_factory=lambda: settings.GAMMA)
    latent_dim: int = Field(default_factory=lambda: settings.LATENT_DIM)
    neighbor_count: int = Field(default_factory=lambda: settings.NEIGHBOR_COUNT)
    max_iters: int = Field(default_factory=lambda: settings.MAX_ITERS)
    f_rel_tol: float = Field(default_factory=lambda: settings.F_REL_TOL)
    rng_seed: int = 0
    alpha_mode: Literal["mean", "per_point"] = "mean"
    defer_label_distance: bool = True
    check_invariants: bool = Field(default_factory=lambda: settings.CHECK_INVARIANTS)

    @field_validator("beta", "gamma", "f_rel_tol")
    @classmethod
    def _positive(cls, value: float, info):
        if not value > 0:
            raise ValueError(f"{info.field_name} must be > 0, got {value}")
        return value

    @field_validator("latent_dim", "neighbor_count", "max_iters")
    @classmethod
    def _at_least_one(cls, value: int, info):
        if value < 1:
            raise ValueError(f"{info.field_name} must be >= 1, got {value}")
        return value
