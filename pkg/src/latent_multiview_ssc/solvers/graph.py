"""
Adaptive-neighbor similarity graph.

Row i of S minimises  sum_j (1/2) d_ij s_ij + alpha*beta s_ij^2  over the
probability simplex, where d_ij = beta*d^h_ij + gamma*d^f_ij combines latent
and label distances. Completing the square gives the Euclidean projection of
-d_i / (4*alpha*beta) onto the simplex, with the self-coordinate held at zero.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _csgraph_components
from scipy.spatial.distance import cdist

from ..core.types import Laplacian, SimilarityGraph, SolverWarning
from ..errors import ConfigurationError, DegenerateDistancesError
from ..logger import setup_logger

logger = setup_logger(__name__)

ALPHA_FLOOR = 1e-12
SUPPORT_TOL = 1e-12  # projected weights at or below this are rounding residue


@dataclass(frozen=True, eq=False)
class PairwiseDistances:
    matrix: np.ndarray
    source_tag: str  # "latent", "labels", "features" or "combined"

    @property
    def n_points(self) -> int:
        return int(self.matrix.shape[0])


@dataclass
class AlphaEstimate:
    alpha: float  # averaged, clamped to ALPHA_FLOOR
    per_point: np.ndarray  # each alpha_i at its upper bound, clamped
    raw_alpha: float
    warnings: list[SolverWarning] = field(default_factory=list)


def squared_distances(points: np.ndarray, source_tag: str = "latent") -> PairwiseDistances:
    """Squared Euclidean distances between the columns of `points` (m x N)."""
    points = np.asarray(points, dtype=float)
    cols = points.T
    matrix = cdist(cols, cols, metric="sqeuclidean")
    matrix = 0.5 * (matrix + matrix.T)
    np.fill_diagonal(matrix, 0.0)
    return PairwiseDistances(matrix=matrix, source_tag=source_tag)


def combine_distances(d_h: PairwiseDistances, d_f: PairwiseDistances | None, beta: float, gamma: float) -> PairwiseDistances:
    combined = beta * d_h.matrix
    if d_f is not None and gamma != 0.0:
        combined = combined + gamma * d_f.matrix
    return PairwiseDistances(matrix=combined, source_tag="combined")


def _sorted_off_diagonal(matrix: np.ndarray) -> np.ndarray:
    n = matrix.shape[0]
    off = matrix[~np.eye(n, dtype=bool)].reshape(n, n - 1)
    return np.sort(off, axis=1, kind="stable")


def alpha_from_k(d: PairwiseDistances | np.ndarray, k: int, beta: float, strict: bool = False) -> AlphaEstimate:
    """
    Regularisation weight that gives every point k neighbors.

    For point i the support of s_i has exactly k entries when
        (k d_ik - sum_{j<=k} d_ij) / (4 beta) < alpha_i <= (k d_i,k+1 - sum_{j<=k} d_ij) / (4 beta)
    with d_i sorted ascending over j != i. Each alpha_i is set to its upper
    bound and alpha is their mean.

    Args:
        d: combined distances beta*d^h + gamma*d^f (N x N)
        k: neighbor count, 1 <= k <= N-2
        beta: the latent-graph weight
        strict: raise DegenerateDistancesError instead of clamping when alpha <= 0
                comes from k-th/(k+1)-th ties on every row

    Returns:
        AlphaEstimate with the averaged alpha, per-point alphas and any clamp warnings
    """
    matrix = d.matrix if isinstance(d, PairwiseDistances) else np.asarray(d, dtype=float)
    n = matrix.shape[0]
    if not 1 <= k <= n - 2:
        raise ConfigurationError(f"neighbor count must satisfy 1 <= k <= N-2, got k={k}, N={n}")

    ordered = _sorted_off_diagonal(matrix)
    nearest = ordered[:, :k].sum(axis=1)
    next_dist = ordered[:, k]
    raw_per_point = (0.5 * k * next_dist - 0.5 * nearest) / (2.0 * beta)
    raw_alpha = float(raw_per_point.mean())

    warnings: list[SolverWarning] = []
    if raw_alpha <= 0.0:
        all_tied = bool(np.all(ordered[:, k] == ordered[:, k - 1]))
        if strict and all_tied:
            raise DegenerateDistancesError(
                f"alpha={raw_alpha:.3e} <= 0: the k-th and (k+1)-th distances tie on every row (duplicate points)"
            )
        warnings.append(SolverWarning(
            kind="alpha-clamp",
            message=f"alpha={raw_alpha:.3e} <= 0 clamped to {ALPHA_FLOOR}",
            details={"raw_alpha": raw_alpha, "k": k, "all_tied": all_tied},
        ))
        logger.warning(warnings[-1].message)

    per_point = np.maximum(raw_per_point, ALPHA_FLOOR)
    clamped_rows = np.flatnonzero(raw_per_point <= 0.0)
    if clamped_rows.size and raw_alpha > 0.0:
        warnings.append(SolverWarning(
            kind="alpha-clamp",
            message=f"{clamped_rows.size} per-point alphas <= 0 clamped to {ALPHA_FLOOR}",
            details={"rows": clamped_rows.tolist()},
        ))

    return AlphaEstimate(
        alpha=max(raw_alpha, ALPHA_FLOOR),
        per_point=per_point,
        raw_alpha=raw_alpha,
        warnings=warnings,
    )


def project_rows_to_simplex(values: np.ndarray) -> np.ndarray:
    """Euclidean projection of every row of `values` onto the probability simplex."""
    values = np.atleast_2d(np.asarray(values, dtype=float))
    m = values.shape[1]
    # proj(v + c*1) == proj(v); shifting by the row max keeps the threshold well scaled
    shifted = values - values.max(axis=1, keepdims=True)
    ordered = -np.sort(-shifted, axis=1)
    cumulative = np.cumsum(ordered, axis=1) - 1.0
    ranks = np.arange(1, m + 1)
    active = ordered - cumulative / ranks > 0
    rho = m - 1 - np.argmax(active[:, ::-1], axis=1)
    theta = cumulative[np.arange(values.shape[0]), rho] / (rho + 1)
    return np.maximum(shifted - theta[:, None], 0.0)


def project_row_to_simplex(v: np.ndarray) -> np.ndarray:
    return project_rows_to_simplex(np.asarray(v, dtype=float).reshape(1, -1))[0]


def similarity_from_distances(d: np.ndarray, alpha: float | np.ndarray, beta: float, neighbor_count_hint: int = 0) -> SimilarityGraph:
    """Project -d_i/(4 alpha_i beta) row by row, self-coordinate excluded and set to zero."""
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    alpha = np.broadcast_to(np.asarray(alpha, dtype=float), (n,))
    if np.any(alpha <= 0.0):
        raise DegenerateDistancesError("alpha must be positive for the similarity update")

    off_mask = ~np.eye(n, dtype=bool)
    off = d[off_mask].reshape(n, n - 1)
    projected = project_rows_to_simplex(-off / (4.0 * alpha[:, None] * beta))
    projected[projected <= SUPPORT_TOL] = 0.0
    projected /= projected.sum(axis=1, keepdims=True)

    weights = np.zeros((n, n))
    weights[off_mask] = projected.ravel()
    return SimilarityGraph(weights=weights, neighbor_count_hint=neighbor_count_hint)


def update_similarity(
    d_h: PairwiseDistances,
    d_f: PairwiseDistances | None,
    beta: float,
    gamma: float,
    alpha: float | np.ndarray,
    neighbor_count_hint: int = 0,
) -> SimilarityGraph:
    """S-update: closed-form row projections of the combined distances."""
    combined = combine_distances(d_h, d_f, beta, gamma)
    return similarity_from_distances(combined.matrix, alpha, beta, neighbor_count_hint)


def uniform_similarity(n: int, neighbor_count_hint: int = 0) -> SimilarityGraph:
    weights = np.full((n, n), 1.0 / (n - 1))
    np.fill_diagonal(weights, 0.0)
    return SimilarityGraph(weights=weights, neighbor_count_hint=neighbor_count_hint)


def symmetrized(weights: np.ndarray) -> np.ndarray:
    return 0.5 * (weights + weights.T)


def laplacian(graph: SimilarityGraph | np.ndarray) -> Laplacian:
    """L = diag(A 1) - A with A = (S + S^T)/2."""
    if isinstance(graph, SimilarityGraph):
        source, weights = graph, graph.weights
    else:
        source, weights = None, np.asarray(graph, dtype=float)
    adjacency = symmetrized(weights)
    matrix = np.diag(adjacency.sum(axis=1)) - adjacency
    return Laplacian(matrix=matrix, source=source)


def component_labels(weights: np.ndarray, weight_tol: float = 0.0) -> tuple[int, np.ndarray]:
    """Connected components of the symmetrized support graph (edges with weight > weight_tol)."""
    support = symmetrized(np.asarray(weights, dtype=float)) > weight_tol
    n_components, labels = _csgraph_components(csr_matrix(support), directed=False)
    return int(n_components), labels


def connected_components(graph: SimilarityGraph | np.ndarray, weight_tol: float = 0.0) -> int:
    weights = graph.weights if isinstance(graph, SimilarityGraph) else graph
    n_components, _ = component_labels(weights, weight_tol)
    return n_components


def zero_eigenvalue_multiplicity(lap: Laplacian | np.ndarray, tol: float = 1e-8) -> int:
    """Number of Laplacian eigenvalues below `tol`; equals the component count for a clean graph."""
    matrix = lap.matrix if isinstance(lap, Laplacian) else np.asarray(lap, dtype=float)
    return int(np.count_nonzero(np.linalg.eigvalsh(matrix) < tol))
