import itertools

import numpy as np
import pytest

from latent_multiview_ssc.errors import ConfigurationError, DegenerateDistancesError
from latent_multiview_ssc.solvers import graph as graph_ops


def _support_masks(m: int) -> np.ndarray:
    return np.array([mask for mask in itertools.product([False, True], repeat=m) if any(mask)])


def _projection_oracle(v: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """Closest simplex point among the candidates max(v - theta_S, 0) of every support S."""
    sizes = masks.sum(axis=1)
    theta = (masks @ v - 1.0) / sizes
    candidates = np.where(masks, v[None, :] - theta[:, None], 0.0)
    feasible = np.all(candidates >= -1e-12, axis=1)
    distances = np.sum((candidates - v) ** 2, axis=1)
    distances[~feasible] = np.inf
    return candidates[int(np.argmin(distances))]


def _union_find_components(weights: np.ndarray) -> int:
    n = weights.shape[0]
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in zip(*np.nonzero(weights + weights.T)):
        parent[find(i)] = find(j)
    return len({find(i) for i in range(n)})


def test_squared_distances_match_double_loop(rng):
    points = rng.normal(size=(4, 12))
    d = graph_ops.squared_distances(points).matrix
    for i in range(12):
        for j in range(12):
            expected = 0.0 if i == j else float(np.sum((points[:, i] - points[:, j]) ** 2))
            assert d[i, j] == pytest.approx(expected, abs=1e-10)
    assert np.all(np.diag(d) == 0.0)


def test_simplex_projection_matches_support_oracle(rng):
    masks = _support_masks(10)
    for _ in range(200):
        v = rng.normal(scale=rng.uniform(0.1, 5.0), size=10)
        np.testing.assert_allclose(graph_ops.project_row_to_simplex(v), _projection_oracle(v, masks), atol=1e-8)


def test_simplex_projection_beats_random_simplex_points(rng):
    for _ in range(5):
        v = rng.normal(scale=2.0, size=8)
        projected = graph_ops.project_row_to_simplex(v)
        others = rng.dirichlet(np.ones(8), size=1000)
        assert projected.min() >= 0.0
        assert projected.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.sum((projected - v) ** 2) <= np.sum((others - v) ** 2, axis=1).min() + 1e-12


@pytest.mark.parametrize(
    "v, expected",
    [
        ([0.5, 0.5], [0.5, 0.5]),
        ([2.0, 0.0], [1.0, 0.0]),
        ([-3.0, -3.0, -3.0], [1 / 3, 1 / 3, 1 / 3]),
        ([0.2, 0.1, 5.0], [0.0, 0.0, 1.0]),
    ],
)
def test_simplex_projection_examples(v, expected):
    np.testing.assert_allclose(graph_ops.project_row_to_simplex(np.array(v)), expected, atol=1e-12)


def test_alpha_from_k_matches_sorted_formula(rng):
    d = graph_ops.squared_distances(rng.normal(size=(3, 15))).matrix
    k, beta = 4, 2.0
    estimate = graph_ops.alpha_from_k(d, k, beta)

    expected = []
    for i in range(15):
        row = np.sort(np.delete(d[i], i))
        expected.append((k * row[k] - row[:k].sum()) / (4.0 * beta))
    np.testing.assert_allclose(estimate.per_point, expected)
    assert estimate.alpha == pytest.approx(np.mean(expected))
    assert estimate.warnings == []


@pytest.mark.parametrize("k", [0, 14])
def test_alpha_from_k_rejects_out_of_range_k(rng, k):
    d = graph_ops.squared_distances(rng.normal(size=(2, 15)))
    with pytest.raises(ConfigurationError):
        graph_ops.alpha_from_k(d, k, beta=1.0)


def test_per_point_alpha_gives_exactly_k_neighbors(rng):
    for _ in range(50):
        n = int(rng.integers(8, 30))
        k = int(rng.integers(1, n - 2))
        d = graph_ops.squared_distances(rng.normal(size=(3, n))).matrix
        estimate = graph_ops.alpha_from_k(d, k, beta=1.0)
        weights = graph_ops.similarity_from_distances(d, estimate.per_point, beta=1.0).weights

        ordered = np.sort(d + np.diag(np.full(n, np.inf)), axis=1)
        strict = (ordered[:, k] - ordered[:, k - 1]) > 1e-4
        counts = np.count_nonzero(weights > 0.0, axis=1)
        np.testing.assert_array_equal(counts[strict], k)


def test_update_similarity_rows_are_distributions(rng):
    d_h = graph_ops.squared_distances(rng.normal(size=(3, 20)), "latent")
    d_f = graph_ops.squared_distances(rng.uniform(size=(2, 20)), "labels")
    combined = graph_ops.combine_distances(d_h, d_f, 1.0, 0.5)
    estimate = graph_ops.alpha_from_k(combined, 5, 1.0)
    graph = graph_ops.update_similarity(d_h, d_f, 1.0, 0.5, estimate.alpha, 5)

    graph.validate()
    assert graph.neighbor_count_hint == 5


def test_duplicate_points_clamp_alpha_with_warning():
    d = graph_ops.squared_distances(np.zeros((2, 6)))
    estimate = graph_ops.alpha_from_k(d, 2, beta=1.0)
    assert estimate.alpha == graph_ops.ALPHA_FLOOR
    assert [w.kind for w in estimate.warnings] == ["alpha-clamp"]

    with pytest.raises(DegenerateDistancesError):
        graph_ops.alpha_from_k(d, 2, beta=1.0, strict=True)


def test_uniform_similarity():
    graph = graph_ops.uniform_similarity(5)
    graph.validate()
    np.testing.assert_allclose(graph.weights[0, 1:], 0.25)


def test_laplacian_properties(rng):
    weights = graph_ops.uniform_similarity(6).weights * rng.uniform(0.5, 1.5, size=(6, 6))
    lap = graph_ops.laplacian(weights)
    lap.validate()
    np.testing.assert_allclose(lap.matrix.sum(axis=1), 0.0, atol=1e-12)


def _block_graph(rng, n_blocks: int) -> np.ndarray:
    sizes = rng.integers(2, 8, size=n_blocks)
    n = int(sizes.sum())
    weights = np.zeros((n, n))
    offset = 0
    for size in sizes:
        block = rng.uniform(0.1, 1.0, size=(size, size)) * (rng.uniform(size=(size, size)) < 0.5)
        block[np.arange(size - 1), np.arange(1, size)] = rng.uniform(0.1, 1.0, size=size - 1)
        weights[offset:offset + size, offset:offset + size] = block
        offset += size
    np.fill_diagonal(weights, 0.0)
    perm = rng.permutation(n)
    return weights[np.ix_(perm, perm)]


def test_component_count_equals_zero_eigenvalue_multiplicity(rng):
    for _ in range(25):
        n_blocks = int(rng.integers(1, 6))
        weights = _block_graph(rng, n_blocks)
        components = graph_ops.connected_components(weights)
        assert components == n_blocks
        assert components == _union_find_components(weights)
        assert graph_ops.zero_eigenvalue_multiplicity(graph_ops.laplacian(weights)) == components

    for _ in range(25):
        n = int(rng.integers(5, 30))
        weights = rng.uniform(0.5, 1.0, size=(n, n)) * (rng.uniform(size=(n, n)) < 0.08)
        np.fill_diagonal(weights, 0.0)
        components = graph_ops.connected_components(weights)
        assert components == _union_find_components(weights)
        assert graph_ops.zero_eigenvalue_multiplicity(graph_ops.laplacian(weights)) == components


@pytest.mark.parametrize("scale", [0.01, 3.0, 250.0])
def test_similarity_is_unchanged_when_distances_and_alpha_scale_together(rng, scale):
    d = graph_ops.squared_distances(rng.normal(size=(3, 25))).matrix
    alpha = graph_ops.alpha_from_k(d, 4, beta=1.0).alpha
    base = graph_ops.similarity_from_distances(d, alpha, beta=1.0).weights
    scaled = graph_ops.similarity_from_distances(scale * d, scale * alpha, beta=1.0).weights
    np.testing.assert_allclose(scaled, base, atol=1e-10)


def test_similarity_rows_hold_no_rounding_residue(rng):
    for _ in range(20):
        n = int(rng.integers(10, 40))
        d = graph_ops.squared_distances(rng.normal(size=(4, n))).matrix
        estimate = graph_ops.alpha_from_k(d, int(rng.integers(1, n - 2)), beta=1.0)
        for alpha in (estimate.alpha, estimate.per_point):
            weights = graph_ops.similarity_from_distances(d, alpha, beta=1.0).weights
            positive = weights[weights > 0.0]
            assert positive.min() > graph_ops.SUPPORT_TOL
            np.testing.assert_allclose(weights.sum(axis=1), 1.0, atol=1e-12)
