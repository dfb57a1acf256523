from dataclasses import replace

import numpy as np
import pytest

from latent_multiview_ssc.core import one_hot, permute_labeled_first
from latent_multiview_ssc.errors import InvariantError
from latent_multiview_ssc.solvers.baselines import ViewWeights, amgl_fit, mlan_fit
from latent_multiview_ssc.solvers.propagate import gfhf_baseline


def _labeled_ends(views, labels):
    mask = np.zeros(labels.shape[0], dtype=bool)
    mask[[0, 10]] = True
    return permute_labeled_first(views, labels, mask)


def test_amgl_separates_line_clusters(two_clusters):
    result = amgl_fit(two_clusters, k=3)
    np.testing.assert_array_equal(result.predictions, two_clusters.unlabeled_labels)
    result.weights.validate()
    result.labels.validate(two_clusters.labels)
    assert result.iterations >= 1


def test_amgl_single_view_reduces_to_gfhf(line_views):
    views, labels = line_views
    dataset = _labeled_ends(views[:1], labels)
    result = amgl_fit(dataset, k=3)
    Y_l = one_hot(dataset.labeled_labels, 2)
    np.testing.assert_array_equal(result.predictions, gfhf_baseline(dataset.views[0], Y_l, k=3))
    assert result.converged


def test_amgl_duplicated_views_get_equal_weights(line_views):
    views, labels = line_views
    result = amgl_fit(_labeled_ends([views[0], views[0]], labels), k=3)
    assert result.weights.w[0] == pytest.approx(result.weights.w[1])


def test_amgl_accepts_prebuilt_graphs(two_clusters, rng):
    n = two_clusters.n_samples
    dense = rng.uniform(size=(n, n))
    dense = 0.5 * (dense + dense.T)
    np.fill_diagonal(dense, 0.0)
    result = amgl_fit(two_clusters, graphs=[dense, dense])
    assert result.predictions.shape == (two_clusters.unlabeled_count,)
    np.testing.assert_allclose(result.weights.w[0], result.weights.w[1])


def test_mlan_separates_line_clusters(two_clusters):
    result = mlan_fit(two_clusters, k=3)
    np.testing.assert_array_equal(result.predictions, two_clusters.unlabeled_labels)
    np.testing.assert_allclose(result.weights.w.sum(), 1.0)
    result.labels.validate(two_clusters.labels)


def test_mlan_duplicated_view_matches_single_view(line_views):
    views, labels = line_views
    single = mlan_fit(_labeled_ends(views[:1], labels), k=3, max_iters=5)
    doubled = mlan_fit(_labeled_ends([views[0], views[0]], labels), k=3, max_iters=5)
    np.testing.assert_allclose(doubled.labels.scores, single.labels.scores, atol=1e-10)
    np.testing.assert_allclose(doubled.weights.w, [0.5, 0.5])


def test_view_weights_must_be_positive():
    with pytest.raises(InvariantError):
        ViewWeights(np.array([0.5, 0.0])).validate()


def test_mlan_down_weights_a_noise_view(small_dataset, rng):
    noise = rng.normal(size=small_dataset.views[0].shape)
    spread = max(np.linalg.norm(view - view.mean(axis=1, keepdims=True)) for view in small_dataset.views)
    noise *= spread / np.linalg.norm(noise - noise.mean(axis=1, keepdims=True))
    noisy = replace(small_dataset, views=small_dataset.views + (noise,))

    result = mlan_fit(noisy, k=5, max_iters=5)
    assert result.weights.w[2] < min(result.weights.w[0], result.weights.w[1])
