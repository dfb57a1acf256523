import os

os.environ.setdefault("LMSSC_LOG_FILE", "")

import numpy as np
import pytest

from latent_multiview_ssc.core import LmsscConfig, permute_labeled_first
from latent_multiview_ssc.services.synthetic import SyntheticSpec, generate_synthetic


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_spec():
    return SyntheticSpec(n_samples=40, n_classes=2, latent_dim=3, view_dims=[5, 6], rng_seed=7)


@pytest.fixture
def small_config():
    return LmsscConfig(neighbor_count=5, latent_dim=3, max_iters=10, beta=1.0, gamma=1.0)


@pytest.fixture
def small_dataset(small_spec):
    data = generate_synthetic(small_spec)
    mask = np.zeros(small_spec.n_samples, dtype=bool)
    for label in range(small_spec.n_classes):
        mask[np.flatnonzero(data.labels == label)[:6]] = True
    return data.to_dataset(mask)


@pytest.fixture
def planted_spec():
    return SyntheticSpec(
        n_samples=200, n_classes=4, latent_dim=5, view_dims=[20, 30, 40],
        cluster_separation=10.0, noise_sigma=0.1, rng_seed=0,
    )


def _line_clusters(jitter_seed: int = 3) -> tuple[list[np.ndarray], np.ndarray]:
    """Two classes of 10 points on a line, 100 apart; view 1 is an affine copy of view 0."""
    jitter = np.random.default_rng(jitter_seed).uniform(0.0, 0.1, size=20)
    positions = np.concatenate([np.arange(10.0), 100.0 + np.arange(10.0)]) + jitter
    labels = np.array([0] * 10 + [1] * 10)
    return [positions.reshape(1, -1), (2.0 * positions + 1.0).reshape(1, -1)], labels


@pytest.fixture
def two_clusters():
    views, labels = _line_clusters()
    mask = np.zeros(20, dtype=bool)
    mask[[0, 10]] = True
    return permute_labeled_first(views, labels, mask)


@pytest.fixture
def line_views():
    return _line_clusters()
