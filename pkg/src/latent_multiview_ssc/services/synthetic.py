"""
Planted multi-view generator: class clusters in a small latent space, mapped
into every view by a nonnegative factor, plus Gaussian noise.
"""

from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ..core.dataset import permute_labeled_first
from ..core.types import MultiViewDataset


class SyntheticSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_samples: int = 200
    n_classes: int = 4
    latent_dim: int = 5
    view_dims: list[int] = [20, 30, 40]
    cluster_separation: float = 10.0
    noise_sigma: float = 0.1
    rng_seed: int = 0

    @field_validator("latent_dim", "n_classes")
    @classmethod
    def _positive_dims(cls, value: int, info):
        if value < 1:
            raise ValueError(f"{info.field_name} must be >= 1")
        return value

    @field_validator("view_dims")
    @classmethod
    def _view_dims(cls, value: list[int]):
        if not value or min(value) < 1:
            raise ValueError("need at least one view and every view dimension >= 1")
        return value

    @model_validator(mode="after")
    def _enough_samples(self):
        if self.n_samples < 2 * self.n_classes:
            raise ValueError(f"n_samples={self.n_samples} must be >= 2 * n_classes={2 * self.n_classes}")
        if self.noise_sigma < 0 or self.cluster_separation < 0:
            raise ValueError("noise_sigma and cluster_separation must be nonnegative")
        return self


@dataclass(frozen=True, eq=False)
class SyntheticDataset:
    views: tuple[np.ndarray, ...]  # d_v x N, original order
    labels: np.ndarray
    view_factors: tuple[np.ndarray, ...]  # planted W0^v
    latent: np.ndarray  # planted H0, r0 x N
    centers: np.ndarray  # r0 x c
    n_classes: int

    def to_dataset(self, labeled_mask: np.ndarray) -> MultiViewDataset:
        return permute_labeled_first(self.views, self.labels, labeled_mask, self.n_classes)


def _class_centers(rng: np.random.Generator, latent_dim: int, n_classes: int, distance: float) -> np.ndarray:
    if n_classes <= latent_dim:
        basis, _ = np.linalg.qr(rng.normal(size=(latent_dim, latent_dim)))
        return distance * basis[:, :n_classes]
    centers = rng.normal(size=(latent_dim, n_classes))
    gaps = np.linalg.norm(centers[:, :, None] - centers[:, None, :], axis=0)
    closest = gaps[~np.eye(n_classes, dtype=bool)].min()
    return centers * (distance / closest)


def generate_synthetic(spec: SyntheticSpec) -> SyntheticDataset:
    """
    Draw a planted dataset.

    Class centers are at least cluster_separation * noise_sigma apart (orthogonal
    directions when c <= r0). H0 columns are their class center plus N(0, sigma^2)
    noise, W0^v entries are U[0, 1] and X^v = W0^v H0 + N(0, sigma^2).
    """
    rng = np.random.default_rng(spec.rng_seed)
    n, c, r0 = spec.n_samples, spec.n_classes, spec.latent_dim

    labels = rng.permutation(np.arange(n) % c)
    centers = _class_centers(rng, r0, c, spec.cluster_separation * spec.noise_sigma)
    latent = centers[:, labels] + rng.normal(0.0, spec.noise_sigma, size=(r0, n))

    factors, views = [], []
    for d in spec.view_dims:
        factor = rng.uniform(0.0, 1.0, size=(d, r0))
        factors.append(factor)
        views.append(factor @ latent + rng.normal(0.0, spec.noise_sigma, size=(d, n)))

    return SyntheticDataset(
        views=tuple(views),
        labels=labels,
        view_factors=tuple(factors),
        latent=latent,
        centers=centers,
        n_classes=c,
    )
