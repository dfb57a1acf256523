"""
Numerical self-checks behind `lmssc check`.

Every check returns a CheckResult instead of raising, so one run reports all of
them. The dataset-driven checks fit LMSSC on one split and inspect the final
state; the rest draw random instances from the given seed.
"""

from dataclasses import dataclass

import numpy as np

from ..core.dataset import one_hot, permute_labeled_first
from ..core.types import LmsscConfig
from ..errors import LmsscError
from ..logger import setup_logger
from ..solvers import graph as graph_ops
from ..solvers.latent import assemble_sylvester, update_shared_factor, update_view_factors
from ..solvers.lmssc import SolverState, fit
from ..solvers.propagate import harmonic_solve
from .data_io import make_split

logger = setup_logger(__name__)

TOL = 1e-8


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def check_simplex_projection(rng: np.random.Generator, instances: int = 200, dim: int = 10) -> CheckResult:
    """Projection p of v must equal max(v - theta, 0) with theta fixed by the support."""
    worst = 0.0
    for _ in range(instances):
        v = rng.normal(scale=rng.uniform(0.1, 10.0), size=dim)
        p = graph_ops.project_row_to_simplex(v)
        support = p > 0
        theta = float(np.mean(v[support] - p[support]))
        worst = max(worst, float(np.abs(p - np.maximum(v - theta, 0.0)).max()), abs(p.sum() - 1.0))
        if p.min() < 0.0:
            return CheckResult("simplex-projection", False, f"negative coordinate {p.min():.3e}")
    return CheckResult("simplex-projection", worst <= TOL, f"max KKT deviation {worst:.3e} over {instances} instances")


def check_nnls_kkt(views: tuple[np.ndarray, ...], H: np.ndarray) -> CheckResult:
    """W >= 0, gradient >= 0 and complementary slackness for every row of every W^v."""
    gram = H @ H.T
    worst = 0.0
    for view, W in zip(views, update_view_factors(views, H)):
        gradient = W @ gram - view @ H.T
        scale = max(1.0, float(np.abs(view @ H.T).max()))
        worst = max(
            worst,
            float(max(0.0, -W.min())) / scale,
            float(max(0.0, -gradient.min())) / scale,
            float(np.abs(W * gradient).max()) / scale,
        )
    return CheckResult("nnls-kkt", worst <= TOL, f"max relative KKT residual {worst:.3e}")


def check_sylvester(state: SolverState, views: tuple[np.ndarray, ...]) -> CheckResult:
    system = assemble_sylvester(views, state.model.view_factors, graph_ops.laplacian(state.graph).matrix, state.config.beta)
    H = update_shared_factor(system)
    residual = system.residual(H)
    bound = TOL * max(1.0, float(np.linalg.norm(system.B)))
    return CheckResult("sylvester-residual", residual <= bound, f"residual {residual:.3e} (bound {bound:.3e})")


def check_harmonic(state: SolverState, labels: np.ndarray, n_classes: int) -> CheckResult:
    l = state.labels.labeled_count
    lap = graph_ops.laplacian(state.graph)
    try:
        F = harmonic_solve(lap, one_hot(labels[:l], n_classes))
        F.validate(labels)
    except LmsscError as exc:
        return CheckResult("harmonic-property", False, str(exc))
    residual = float(np.abs((lap.matrix @ F.scores)[l:]).max()) if F.scores.shape[0] > l else 0.0
    return CheckResult("harmonic-property", residual <= TOL, f"max |(LF)_u| {residual:.3e}")


def check_component_count(rng: np.random.Generator, instances: int = 50) -> CheckResult:
    """Component count equals the multiplicity of the zero Laplacian eigenvalue on random block graphs."""
    for i in range(instances):
        n_blocks = int(rng.integers(1, 5))
        sizes = rng.integers(2, 8, size=n_blocks)
        weights = np.zeros((sizes.sum(), sizes.sum()))
        offset = 0
        for size in sizes:
            block = rng.uniform(0.1, 1.0, size=(size, size)) * (rng.uniform(size=(size, size)) < 0.6)
            # chain inside the block keeps it connected
            block[np.arange(size - 1), np.arange(1, size)] = rng.uniform(0.1, 1.0, size=size - 1)
            weights[offset:offset + size, offset:offset + size] = block
            offset += size
        np.fill_diagonal(weights, 0.0)
        components = graph_ops.connected_components(weights)
        multiplicity = graph_ops.zero_eigenvalue_multiplicity(graph_ops.laplacian(weights))
        if components != multiplicity or components != n_blocks:
            return CheckResult(
                "component-count", False,
                f"instance {i}: {n_blocks} blocks, {components} components, {multiplicity} zero eigenvalues",
            )
    return CheckResult("component-count", True, f"{instances} block graphs agree")


def check_k_support(rng: np.random.Generator, instances: int = 50) -> CheckResult:
    """Per-point alpha at its upper bound gives every row exactly k neighbors."""
    for i in range(instances):
        n = int(rng.integers(8, 30))
        k = int(rng.integers(1, n - 2))
        d = graph_ops.squared_distances(rng.normal(size=(3, n)), "latent")
        estimate = graph_ops.alpha_from_k(d, k, beta=1.0)
        graph = graph_ops.similarity_from_distances(d.matrix, estimate.per_point, beta=1.0)
        # rows whose k-th and (k+1)-th distances nearly tie have no well-defined support
        ordered = np.sort(d.matrix + np.diag(np.full(n, np.inf)), axis=1)
        strict = (ordered[:, k] - ordered[:, k - 1]) > 1e-4
        counts = np.count_nonzero(graph.weights > 0.0, axis=1)[strict]
        if not np.all(counts == k):
            return CheckResult("k-support", False, f"instance {i}: k={k}, support sizes {sorted(set(counts.tolist()))}")
    return CheckResult("k-support", True, f"{instances} instances give exactly k neighbors")


def check_descent(state: SolverState) -> CheckResult:
    """Each W/H/S/F sub-step does not increase the objective at its iteration's alpha and gamma."""
    worst = 0.0
    for record in state.iterations:
        values = [record.objective_before] + record.objectives
        for before, after in zip(values, values[1:]):
            worst = max(worst, (after - before) / max(1.0, abs(before)))
    return CheckResult("sub-step-descent", worst <= TOL, f"largest relative increase {worst:.3e} over {state.iteration} iterations")


def check_graph_invariants(state: SolverState) -> CheckResult:
    try:
        state.graph.validate()
        graph_ops.laplacian(state.graph).validate()
        state.model.validate()
    except LmsscError as exc:
        return CheckResult("graph-invariants", False, str(exc))
    return CheckResult("graph-invariants", True, "S row-stochastic, L symmetric PSD, W nonnegative")


def run_checks(
    views: list[np.ndarray],
    labels: np.ndarray,
    n_classes: int,
    cfg: LmsscConfig,
    rate: float,
    seed: int,
) -> list[CheckResult]:
    """Fit once on a (rate, seed) split and run every check."""
    rng = np.random.default_rng(seed)
    results = [check_simplex_projection(rng), check_k_support(rng), check_component_count(rng)]

    try:
        dataset = permute_labeled_first(views, labels, make_split(labels, rate, seed), n_classes)
        state = fit(dataset, cfg.model_copy(update={"rng_seed": seed}))
    except LmsscError as exc:
        logger.error(f"fit failed, dataset checks skipped: {exc}")
        results.append(CheckResult("fit", False, f"{exc.kind}: {exc}"))
        return results

    results.extend([
        check_graph_invariants(state),
        check_descent(state),
        check_nnls_kkt(dataset.views, state.model.shared),
        check_sylvester(state, dataset.views),
        check_harmonic(state, dataset.labels, dataset.class_count),
    ])
    for result in results:
        log = logger.info if result.passed else logger.error
        log(f"check {result.name}: {'pass' if result.passed else 'FAIL'} ({result.detail})")
    return results
