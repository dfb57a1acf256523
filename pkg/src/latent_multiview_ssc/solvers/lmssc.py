"""
Alternating minimisation of

    sum_v ||X^v - W^v H||_F^2 + beta (Tr(H L H^T) + alpha ||S||_F^2) + gamma Tr(F^T L F)

over W^v >= 0, H, row-stochastic S and F with F_l = Y_l. One iteration runs
W -> H -> S -> F; alpha is re-derived from the neighbor count before every
S-update.
"""

from dataclasses import dataclass, field

import numpy as np

from ..core.dataset import inverse_permute, one_hot, validate
from ..core.types import (
    LabelIndicator,
    LatentModel,
    LmsscConfig,
    MultiViewDataset,
    SimilarityGraph,
    SolverWarning,
)
from ..errors import ConfigurationError, LmsscError, SolverError
from ..logger import setup_logger
from . import graph as graph_ops
from .latent import assemble_sylvester, factorization_loss, update_shared_factor, update_view_factors
from .propagate import decide, harmonic_solve

logger = setup_logger(__name__)

STEPS = ("W", "H", "S", "F")


@dataclass
class IterationRecord:
    iteration: int
    alpha: float  # averaged alpha of this iteration
    gamma: float  # gamma in force (0 during a deferred first pass)
    objective_before: float  # previous state evaluated at this iteration's alpha and gamma
    objectives: list[float]  # one value after each of W, H, S, F
    f_change: float
    warnings: list[SolverWarning] = field(default_factory=list)


@dataclass
class SolverState:
    model: LatentModel
    graph: SimilarityGraph
    labels: LabelIndicator
    iteration: int
    iterations: list[IterationRecord]
    converged: bool
    config: LmsscConfig

    @property
    def objective_trace(self) -> list[float]:
        return [value for record in self.iterations for value in record.objectives]

    @property
    def alpha_trace(self) -> list[float]:
        return [record.alpha for record in self.iterations]

    @property
    def gamma_trace(self) -> list[float]:
        return [record.gamma for record in self.iterations]

    @property
    def warnings(self) -> list[SolverWarning]:
        return [warning for record in self.iterations for warning in record.warnings]


def _objective_value(
    views: tuple[np.ndarray, ...],
    factors: list[np.ndarray] | tuple[np.ndarray, ...],
    H: np.ndarray,
    S: np.ndarray,
    F: np.ndarray,
    beta: float,
    gamma: float,
    alpha: float | np.ndarray,
) -> float:
    lap = graph_ops.laplacian(S).matrix
    fit_term = sum(np.linalg.norm(view - W @ H) ** 2 for view, W in zip(views, factors))
    alpha = np.broadcast_to(np.asarray(alpha, dtype=float), (S.shape[0],))
    graph_term = np.trace(H @ lap @ H.T) + float(np.sum(alpha * np.sum(S ** 2, axis=1)))
    label_term = np.trace(F.T @ lap @ F)
    return float(fit_term + beta * graph_term + gamma * label_term)


def objective(state: SolverState, X: MultiViewDataset, beta: float, gamma: float, alpha: float | np.ndarray) -> float:
    """Value of the unified objective at `state` (Laplacian from the symmetrized S)."""
    return _objective_value(
        X.views, state.model.view_factors, state.model.shared,
        state.graph.weights, state.labels.scores, beta, gamma, alpha,
    )


def _check_state(model: LatentModel, graph: SimilarityGraph, F: LabelIndicator, labels: np.ndarray) -> None:
    model.validate()
    graph.validate()
    graph_ops.laplacian(graph).validate()
    F.validate(labels)


def fit(X: MultiViewDataset, cfg: LmsscConfig) -> SolverState:
    """
    Run the alternating loop until the relative change of F drops below
    cfg.f_rel_tol or cfg.max_iters iterations have run.

    Args:
        X: validated dataset, labeled samples first
        cfg: solver configuration

    Returns:
        Final SolverState with per-iteration records
    """
    validate(X)
    n, l, c = X.n_samples, X.labeled_count, X.class_count
    k = cfg.neighbor_count
    if not 1 <= k <= n - 2:
        raise ConfigurationError(f"neighbor count must satisfy 1 <= k <= N-2, got k={k}, N={n}")

    rng = np.random.default_rng(cfg.rng_seed)
    Y_l = one_hot(X.labeled_labels, c)

    H = rng.uniform(0.0, 1.0, size=(cfg.latent_dim, n))
    factors: list[np.ndarray] = [np.zeros((d, cfg.latent_dim)) for d in X.view_dims]
    graph = graph_ops.uniform_similarity(n, k)
    F = LabelIndicator(scores=np.vstack([Y_l, np.zeros((n - l, c))]), labeled_count=l)

    records: list[IterationRecord] = []
    converged = False

    for t in range(1, cfg.max_iters + 1):
        gamma_t = 0.0 if (cfg.defer_label_distance and t == 1) else cfg.gamma
        warnings: list[SolverWarning] = []
        snapshots = [(factors, H, graph.weights, F.scores)]
        step = "W"
        try:
            factors = update_view_factors(X, H)
            snapshots.append((factors, H, graph.weights, F.scores))

            step = "H"
            system = assemble_sylvester(X, factors, graph_ops.laplacian(graph).matrix, cfg.beta)
            H = update_shared_factor(system, warnings)
            snapshots.append((factors, H, graph.weights, F.scores))

            step = "S"
            d_h = graph_ops.squared_distances(H, "latent")
            d_f = graph_ops.squared_distances(F.scores.T, "labels")
            estimate = graph_ops.alpha_from_k(graph_ops.combine_distances(d_h, d_f, cfg.beta, gamma_t), k, cfg.beta)
            warnings.extend(estimate.warnings)
            alpha_t = estimate.per_point if cfg.alpha_mode == "per_point" else estimate.alpha
            graph = graph_ops.update_similarity(d_h, d_f, cfg.beta, gamma_t, alpha_t, k)
            snapshots.append((factors, H, graph.weights, F.scores))

            step = "F"
            F_prev = F
            F = harmonic_solve(graph_ops.laplacian(graph), Y_l, warnings)
            snapshots.append((factors, H, graph.weights, F.scores))
        except LmsscError as exc:
            raise SolverError(f"iteration {t}, {step}-update failed: {exc}", iteration=t, step=step) from exc

        for warning in warnings:
            warning.iteration = t

        values = [
            _objective_value(X.views, W_s, H_s, S_s, F_s, cfg.beta, gamma_t, alpha_t)
            for W_s, H_s, S_s, F_s in snapshots
        ]
        f_change = float(np.linalg.norm(F.scores - F_prev.scores) / max(1.0, np.linalg.norm(F_prev.scores)))
        records.append(IterationRecord(
            iteration=t,
            alpha=estimate.alpha,
            gamma=gamma_t,
            objective_before=values[0],
            objectives=values[1:],
            f_change=f_change,
            warnings=warnings,
        ))
        logger.info(f"iteration {t}: objective={values[-1]:.6e} alpha={estimate.alpha:.4e} dF={f_change:.3e}")

        if cfg.check_invariants:
            _check_state(LatentModel(tuple(factors), H), graph, F, X.labels)

        if f_change < cfg.f_rel_tol:
            converged = True
            break

    model = LatentModel(view_factors=tuple(factors), shared=H)
    logger.info(
        f"fit finished after {len(records)} iterations (converged={converged}), "
        f"factorization loss {factorization_loss(X, model):.4e}"
    )
    return SolverState(
        model=model,
        graph=graph,
        labels=F,
        iteration=len(records),
        iterations=records,
        converged=converged,
        config=cfg,
    )


def storage_predictions(F: LabelIndicator, dataset: MultiViewDataset) -> np.ndarray:
    """Given labels for the labeled block, argmax decisions for the rest (storage order)."""
    return np.concatenate([dataset.labeled_labels, decide(F)])


def predict(state: SolverState, dataset: MultiViewDataset) -> np.ndarray:
    """Class ids for every sample in original order."""
    return inverse_permute(storage_predictions(state.labels, dataset), dataset.permutation)
