"""
Multi-view graph baselines.

AMGL fixes one k-NN Gaussian graph per view and alternates the harmonic
solve on sum_v w^v L^v with the self-weighting rule
w^v = 1 / (2 sqrt(Tr(F^T L^v F))).

MLAN learns a single adaptive-neighbor graph on the raw features, weighting
per-view distances with w^v = 1 / (2 sqrt(sum_ij ||x_i^v - x_j^v||^2 s_ij)),
and adds the label distance gamma*d^f so the learned graph also classifies.
"""

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..config import settings
from ..core.dataset import one_hot, validate
from ..core.types import LabelIndicator, MultiViewDataset, SolverWarning
from ..errors import InvariantError
from ..logger import setup_logger
from . import graph as graph_ops
from .propagate import decide, harmonic_solve, knn_gaussian_graph

logger = setup_logger(__name__)

WEIGHT_GUARD = 1e-12


@dataclass(frozen=True, eq=False)
class ViewWeights:
    w: np.ndarray

    def validate(self) -> None:
        if not np.all(np.isfinite(self.w)) or np.any(self.w <= 0.0):
            raise InvariantError(f"view weights must be positive and finite, got {self.w}")


@dataclass
class BaselineResult:
    predictions: np.ndarray  # unlabeled block, storage order
    labels: LabelIndicator
    weights: ViewWeights
    graph: np.ndarray  # combined weights the final F was solved on
    iterations: int
    converged: bool
    warnings: list[SolverWarning] = field(default_factory=list)


def _relative_change(current: np.ndarray, previous: np.ndarray) -> float:
    return float(np.linalg.norm(current - previous) / max(1.0, np.linalg.norm(previous)))


def _initial_indicator(Y_l: np.ndarray, n: int) -> LabelIndicator:
    l, c = Y_l.shape
    return LabelIndicator(scores=np.vstack([Y_l, np.zeros((n - l, c))]), labeled_count=l)


def amgl_fit(
    X: MultiViewDataset,
    k: int | None = None,
    bandwidth: str | float = "median",
    max_iters: int | None = None,
    tol: float | None = None,
    graphs: Sequence[np.ndarray] | None = None,
) -> BaselineResult:
    """
    Auto-weighted multiple graph learning.

    Args:
        X: validated dataset, labeled samples first
        k, bandwidth: per-view k-NN Gaussian graph construction (ignored when `graphs` is given)
        max_iters, tol: stopping rule on the relative change of F
        graphs: prebuilt symmetric per-view weight matrices

    Returns:
        BaselineResult with unlabeled predictions and the final view weights
    """
    validate(X)
    k = settings.NEIGHBOR_COUNT if k is None else k
    max_iters = settings.MAX_ITERS if max_iters is None else max_iters
    tol = settings.F_REL_TOL if tol is None else tol

    if graphs is None:
        graphs = [knn_gaussian_graph(view, k, bandwidth) for view in X.views]
    laps = [graph_ops.laplacian(weights).matrix for weights in graphs]
    Y_l = one_hot(X.labeled_labels, X.class_count)

    w = np.full(len(laps), 1.0 / len(laps))
    F = _initial_indicator(Y_l, X.n_samples)
    warnings: list[SolverWarning] = []
    converged = False
    iteration = 0

    for iteration in range(1, max_iters + 1):
        combined = sum(weight * lap for weight, lap in zip(w, laps))
        F_prev = F
        F = harmonic_solve(combined, Y_l, warnings)
        traces = np.array([np.trace(F.scores.T @ lap @ F.scores) for lap in laps])
        w = 1.0 / (2.0 * np.maximum(np.sqrt(np.maximum(traces, 0.0)), WEIGHT_GUARD))
        change = _relative_change(F.scores, F_prev.scores)
        logger.debug(f"AMGL iteration {iteration}: weights={np.round(w, 6).tolist()} dF={change:.3e}")
        if change < tol:
            converged = True
            break

    return BaselineResult(
        predictions=decide(F),
        labels=F,
        weights=ViewWeights(w),
        graph=sum(weight * g for weight, g in zip(w, graphs)),
        iterations=iteration,
        converged=converged,
        warnings=warnings,
    )


def mlan_fit(
    X: MultiViewDataset,
    k: int | None = None,
    max_iters: int | None = None,
    tol: float | None = None,
    beta: float = 1.0,
    gamma: float | None = None,
    defer_label_distance: bool = True,
    alpha_mode: str = "mean",
) -> BaselineResult:
    """
    Multi-view learning with adaptive neighbours, classification variant.

    Each iteration updates S from sum_v w^v d^{x,v} + gamma d^f (alpha from the
    k-rule), then the view weights, then F by the harmonic solve. View weights
    are normalised to sum to one, which keeps the feature term on a fixed scale
    against gamma d^f and leaves the relative weighting unchanged.
    """
    validate(X)
    n = X.n_samples
    k = settings.NEIGHBOR_COUNT if k is None else k
    max_iters = settings.MAX_ITERS if max_iters is None else max_iters
    tol = settings.F_REL_TOL if tol is None else tol
    gamma = settings.GAMMA if gamma is None else gamma

    view_distances = [graph_ops.squared_distances(view, "features").matrix for view in X.views]
    Y_l = one_hot(X.labeled_labels, X.class_count)

    w = np.full(len(view_distances), 1.0 / len(view_distances))
    F = _initial_indicator(Y_l, n)
    S = graph_ops.uniform_similarity(n, k)
    warnings: list[SolverWarning] = []
    converged = False
    iteration = 0

    for iteration in range(1, max_iters + 1):
        gamma_t = 0.0 if (defer_label_distance and iteration == 1) else gamma
        d_x = graph_ops.PairwiseDistances(sum(weight * d for weight, d in zip(w, view_distances)), "features")
        d_f = graph_ops.squared_distances(F.scores.T, "labels")
        estimate = graph_ops.alpha_from_k(graph_ops.combine_distances(d_x, d_f, beta, gamma_t), k, beta)
        warnings.extend(estimate.warnings)
        alpha = estimate.per_point if alpha_mode == "per_point" else estimate.alpha
        S = graph_ops.update_similarity(d_x, d_f, beta, gamma_t, alpha, k)

        spreads = np.array([np.sum(d * S.weights) for d in view_distances])
        w = 1.0 / (2.0 * np.sqrt(np.maximum(spreads, WEIGHT_GUARD)))
        w = w / w.sum()

        F_prev = F
        F = harmonic_solve(graph_ops.laplacian(S), Y_l, warnings)
        change = _relative_change(F.scores, F_prev.scores)
        logger.debug(f"MLAN iteration {iteration}: weights={np.round(w, 6).tolist()} alpha={estimate.alpha:.4e} dF={change:.3e}")
        if change < tol:
            converged = True
            break

    return BaselineResult(
        predictions=decide(F),
        labels=F,
        weights=ViewWeights(w),
        graph=S.weights,
        iterations=iteration,
        converged=converged,
        warnings=warnings,
    )
