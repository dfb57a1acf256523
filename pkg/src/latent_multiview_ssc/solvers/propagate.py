"""
Harmonic label propagation on a graph Laplacian with the labeled rows clamped,
the argmax decision rule, and the single-view GFHF baseline built on a mutual
k-NN Gaussian graph.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from sklearn.neighbors import NearestNeighbors

from ..core.types import LabelIndicator, Laplacian, SolverWarning
from ..errors import ConfigurationError, DisconnectedUnlabeledError
from ..logger import setup_logger
from . import graph as graph_ops

logger = setup_logger(__name__)

LUU_EIG_FLOOR = 1e-12
LUU_RIDGE = 1e-8
LUU_RIDGE_LIMIT = 1e-6  # relative to mean(diag L_uu)


@dataclass(frozen=True, eq=False)
class HarmonicBlocks:
    L_ll: np.ndarray
    L_lu: np.ndarray
    L_ul: np.ndarray
    L_uu: np.ndarray

    @classmethod
    def split(cls, matrix: np.ndarray, labeled_count: int) -> "HarmonicBlocks":
        l = labeled_count
        return cls(
            L_ll=matrix[:l, :l],
            L_lu=matrix[:l, l:],
            L_ul=matrix[l:, :l],
            L_uu=matrix[l:, l:],
        )


def orphan_components(matrix: np.ndarray, labeled_count: int) -> list[list[int]]:
    """Node sets of the connected components that contain no labeled node."""
    weights = -matrix.copy()
    np.fill_diagonal(weights, 0.0)
    n_components, labels = graph_ops.component_labels(weights)
    orphans = []
    for component in range(n_components):
        nodes = np.flatnonzero(labels == component)
        if nodes.min() >= labeled_count:
            orphans.append(nodes.tolist())
    return orphans


def harmonic_solve(lap: Laplacian | np.ndarray, Y_l: np.ndarray, warnings: list[SolverWarning] | None = None) -> LabelIndicator:
    """
    F_u = -L_uu^{-1} L_ul Y_l with F_l = Y_l.

    L_uu is factored once and reused for all c right-hand sides. A singular
    L_uu with a connected component that holds no labeled node raises
    DisconnectedUnlabeledError carrying those node sets. A connected but
    ill-conditioned L_uu is solved with a 1e-8 ridge and a warning, unless the
    ridge is large against the diagonal scale, which also raises.
    """
    matrix = lap.matrix if isinstance(lap, Laplacian) else np.asarray(lap, dtype=float)
    Y_l = np.asarray(Y_l, dtype=float)
    l, n = Y_l.shape[0], matrix.shape[0]
    if not 1 <= l < n:
        raise ConfigurationError(f"harmonic solve needs 1 <= l < N, got l={l}, N={n}")

    blocks = HarmonicBlocks.split(matrix, l)
    rhs = -blocks.L_ul @ Y_l
    L_uu = 0.5 * (blocks.L_uu + blocks.L_uu.T)

    factor = None
    try:
        factor = scipy.linalg.cho_factor(L_uu)
        smallest = float(scipy.linalg.eigvalsh(L_uu, subset_by_index=[0, 0])[0])
        if smallest < LUU_EIG_FLOOR:
            factor = None
    except np.linalg.LinAlgError:
        factor = None

    if factor is None:
        orphans = orphan_components(matrix, l)
        if orphans:
            raise DisconnectedUnlabeledError(
                f"{len(orphans)} connected components hold no labeled point: {orphans}",
                nodes=orphans,
            )
        diag_scale = float(np.mean(np.diag(L_uu)))
        if LUU_RIDGE > LUU_RIDGE_LIMIT * diag_scale:
            raise DisconnectedUnlabeledError(
                f"L_uu is singular and a {LUU_RIDGE} ridge exceeds {LUU_RIDGE_LIMIT} of the diagonal scale "
                f"{diag_scale:.3e}",
                nodes=[list(range(l, n))],
            )
        message = f"L_uu near singular (smallest eigenvalue below {LUU_EIG_FLOOR}), solved with a {LUU_RIDGE} ridge"
        logger.warning(message)
        if warnings is not None:
            warnings.append(SolverWarning(kind="laplacian-ridge", message=message))
        factor = scipy.linalg.cho_factor(L_uu + LUU_RIDGE * np.eye(n - l))

    F_u = scipy.linalg.cho_solve(factor, rhs)
    return LabelIndicator(scores=np.vstack([Y_l, F_u]), labeled_count=l)


def decide(F: LabelIndicator | np.ndarray, labeled_count: int | None = None) -> np.ndarray:
    """Class of every unlabeled row: smallest index achieving the row maximum."""
    if isinstance(F, LabelIndicator):
        scores, l = F.scores, F.labeled_count
    else:
        scores, l = np.asarray(F), labeled_count or 0
    return np.argmax(scores[l:], axis=1)


def knn_gaussian_graph(view: np.ndarray, k: int, bandwidth: str | float = "median", mutual: bool = True) -> np.ndarray:
    """
    Symmetric Gaussian-weighted k-NN graph over the columns of `view` (d x N).

    Edges are kept when both endpoints list each other among their k nearest
    neighbors (either one when mutual=False). With bandwidth="median" sigma is the
    median length of the kept edges.
    """
    points = np.asarray(view, dtype=float).T
    n = points.shape[0]
    if not 1 <= k <= n - 1:
        raise ConfigurationError(f"k-NN graph needs 1 <= k <= N-1, got k={k}, N={n}")

    distances, indices = NearestNeighbors(n_neighbors=k).fit(points).kneighbors()
    rows = np.repeat(np.arange(n), k)
    directed = np.zeros((n, n), dtype=bool)
    directed[rows, indices.ravel()] = True
    lengths = np.zeros((n, n))
    lengths[rows, indices.ravel()] = distances.ravel()
    lengths = np.maximum(lengths, lengths.T)

    edges = directed & directed.T if mutual else directed | directed.T
    if bandwidth == "median":
        kept = lengths[edges]
        sigma = float(np.median(kept)) if kept.size else 1.0
    else:
        sigma = float(bandwidth)
    if sigma <= 0.0:
        sigma = 1.0

    weights = np.where(edges, np.exp(-lengths ** 2 / (2.0 * sigma ** 2)), 0.0)
    np.fill_diagonal(weights, 0.0)
    return weights


def gfhf_baseline(
    view: np.ndarray,
    Y_l: np.ndarray,
    k: int,
    bandwidth: str | float = "median",
    warnings: list[SolverWarning] | None = None,
) -> np.ndarray:
    """Gaussian fields and harmonic functions on one view; returns unlabeled predictions."""
    weights = knn_gaussian_graph(view, k, bandwidth)
    F = harmonic_solve(graph_ops.laplacian(weights), Y_l, warnings)
    return decide(F)
