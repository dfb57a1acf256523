"""
Benchmark runner: method x label rate x trial grids and parameter sweeps.

Splits depend only on (rate, trial): trial t of every method uses the mask
drawn from seed base_seed + t, so adding a method never changes the splits
another method sees.
"""

import itertools
import time
from dataclasses import asdict, dataclass
from typing import Any, Optional

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, Field, field_validator, model_validator
from sklearn.metrics import accuracy_score

from ..config import settings
from ..core.dataset import one_hot, permute_labeled_first
from ..core.types import LmsscConfig, MultiViewDataset
from ..errors import ConfigurationError
from ..logger import setup_logger
from ..solvers.baselines import amgl_fit, mlan_fit
from ..solvers.lmssc import fit
from ..solvers.propagate import decide, gfhf_baseline
from .data_io import DatasetManifest, load, make_split
from .failure_analyzer import CellContext, FailureAnalyzer
from .report import AggregateRow, ExperimentReport, TrialRecord
from .synthetic import SyntheticSpec, generate_synthetic
from .tracking import MlflowTracker

logger = setup_logger(__name__)

BASE_METHODS = ("lmssc", "amgl", "mlan", "gfhf")


def parse_method(name: str) -> tuple[str, Optional[int]]:
    """'gfhf:2' -> ('gfhf', 2); plain 'gfhf' runs on view 0."""
    base, _, view = name.partition(":")
    if base not in BASE_METHODS:
        raise ValueError(f"unknown method {name!r}, expected one of lmssc, amgl, mlan, gfhf[:view]")
    if base != "gfhf":
        if view:
            raise ValueError(f"method {base} takes no view suffix")
        return base, None
    if not view:
        return base, 0
    if not view.isdigit():
        raise ValueError(f"gfhf view must be a nonnegative integer, got {view!r}")
    return base, int(view)


class SweepGrid(BaseModel):
    betas: list[float] = [1.0]
    gammas: list[float] = [1.0]
    latent_dims: list[int] = [10]

    @field_validator("betas", "gammas")
    @classmethod
    def _positive_weights(cls, value: list[float], info):
        if not value or min(value) <= 0:
            raise ValueError(f"{info.field_name} must be a non-empty list of positive values")
        return value

    @field_validator("latent_dims")
    @classmethod
    def _positive_dims(cls, value: list[int]):
        if not value or min(value) < 1:
            raise ValueError("latent_dims must be a non-empty list of values >= 1")
        return value

    def points(self) -> list[dict[str, Any]]:
        return [
            {"beta": beta, "gamma": gamma, "latent_dim": r}
            for beta, gamma, r in itertools.product(self.betas, self.gammas, self.latent_dims)
        ]


class ExperimentConfig(BaseModel):
    manifest: Optional[str] = None
    synthetic: Optional[SyntheticSpec] = None
    methods: list[str] = ["lmssc"]
    label_rates: list[float] = Field(default_factory=lambda: list(settings.LABEL_RATES))
    trials: int = Field(default_factory=lambda: settings.TRIALS)
    base_seed: Optional[int] = None  # overrides the manifest's seed schedule
    lmssc: LmsscConfig = Field(default_factory=LmsscConfig)
    sweep: Optional[SweepGrid] = None
    bandwidth: str | float = "median"
    jobs: int = Field(default_factory=lambda: settings.JOBS)

    @field_validator("methods")
    @classmethod
    def _known_methods(cls, value: list[str]):
        for name in value:
            parse_method(name)
        if len(set(value)) != len(value):
            raise ValueError(f"duplicate methods in {value}")
        return value

    @field_validator("label_rates")
    @classmethod
    def _rates_in_range(cls, value: list[float]):
        if not value or any(not 0.0 < rate < 1.0 for rate in value):
            raise ValueError(f"label rates must be a non-empty list of values in (0, 1), got {value}")
        return value

    @field_validator("trials")
    @classmethod
    def _at_least_one_trial(cls, value: int):
        if value < 1:
            raise ValueError("trials must be >= 1")
        return value

    @field_validator("bandwidth")
    @classmethod
    def _bandwidth(cls, value: str | float):
        if isinstance(value, str) and value != "median":
            raise ValueError("bandwidth must be 'median' or a positive number")
        if not isinstance(value, str) and value <= 0:
            raise ValueError("bandwidth must be 'median' or a positive number")
        return value

    @model_validator(mode="after")
    def _one_source(self):
        if self.manifest is not None and self.synthetic is not None:
            raise ValueError("give either a manifest or a synthetic spec, not both")
        if self.jobs == 0:
            raise ValueError("jobs must be nonzero")
        return self


@dataclass
class LoadedData:
    name: str
    views: list[np.ndarray]  # d_v x N, original order
    labels: np.ndarray
    n_classes: int
    base_seed: int


def load_source(config: ExperimentConfig) -> LoadedData:
    if config.manifest is not None:
        manifest = DatasetManifest.from_file(config.manifest)
        views, labels = load(manifest)
        return LoadedData(manifest.name, views, labels, manifest.class_count, manifest.base_seed)
    spec = config.synthetic or SyntheticSpec()
    data = generate_synthetic(spec)
    return LoadedData("synthetic", list(data.views), data.labels, data.n_classes, settings.BASE_SEED)


def _run_method(method: str, dataset: MultiViewDataset, cfg: LmsscConfig, bandwidth: str | float) -> tuple[np.ndarray, int, list[str]]:
    base, view = parse_method(method)
    if base == "lmssc":
        state = fit(dataset, cfg)
        return decide(state.labels), state.iteration, [w.message for w in state.warnings]
    if base == "gfhf":
        if view >= dataset.n_views:
            raise ConfigurationError(f"gfhf view {view} does not exist, dataset has {dataset.n_views} views")
        warnings = []
        Y_l = one_hot(dataset.labeled_labels, dataset.class_count)
        predictions = gfhf_baseline(dataset.views[view], Y_l, cfg.neighbor_count, bandwidth, warnings)
        return predictions, 1, [w.message for w in warnings]
    if base == "amgl":
        result = amgl_fit(dataset, k=cfg.neighbor_count, bandwidth=bandwidth, max_iters=cfg.max_iters, tol=cfg.f_rel_tol)
    else:
        result = mlan_fit(
            dataset,
            k=cfg.neighbor_count,
            max_iters=cfg.max_iters,
            tol=cfg.f_rel_tol,
            beta=cfg.beta,
            gamma=cfg.gamma,
            defer_label_distance=cfg.defer_label_distance,
            alpha_mode=cfg.alpha_mode,
        )
    return result.predictions, result.iterations, [w.message for w in result.warnings]


def run_cell(
    method: str,
    rate: float,
    trial: int,
    seed: int,
    data: LoadedData,
    cfg: LmsscConfig,
    bandwidth: str | float = "median",
    params: Optional[dict[str, Any]] = None,
) -> TrialRecord:
    """Split, fit and score one (method, rate, trial) cell; errors become a failure record."""
    params = params or {}
    start = time.perf_counter()
    try:
        mask = make_split(data.labels, rate, seed)
        dataset = permute_labeled_first(data.views, data.labels, mask, data.n_classes)
        predictions, iterations, warnings = _run_method(method, dataset, cfg.model_copy(update={"rng_seed": seed}), bandwidth)
        accuracy = float(accuracy_score(dataset.unlabeled_labels, predictions))
    except Exception as exc:
        failure = FailureAnalyzer().analyze_cell_failure(exc, CellContext(method, rate, trial, seed, params))
        logger.error(f"{method} rate={rate} trial={trial} failed ({failure.failure_type}): {failure.message}")
        return TrialRecord(
            method=method,
            rate=rate,
            trial=trial,
            seed=seed,
            accuracy=None,
            iterations=None,
            wall_time=time.perf_counter() - start,
            params=params,
            failure=asdict(failure),
        )

    logger.info(f"{method} rate={rate} trial={trial} {params or ''} accuracy={accuracy:.4f} iterations={iterations}")
    return TrialRecord(
        method=method,
        rate=rate,
        trial=trial,
        seed=seed,
        accuracy=accuracy,
        iterations=iterations,
        wall_time=time.perf_counter() - start,
        warnings=warnings,
        params=params,
    )


def _base_seed(config: ExperimentConfig, data: LoadedData) -> int:
    return data.base_seed if config.base_seed is None else config.base_seed


def _run_grid(config: ExperimentConfig, data: LoadedData, points: list[tuple[LmsscConfig, dict[str, Any]]]) -> list[TrialRecord]:
    base_seed = _base_seed(config, data)
    cells = [
        (method, rate, trial, base_seed + trial, cfg, params)
        for cfg, params in points
        for method in config.methods
        for rate in config.label_rates
        for trial in range(config.trials)
    ]
    logger.info(f"Running {len(cells)} cells on {data.name} with jobs={config.jobs}")
    # Parallel returns results in submission order
    return Parallel(n_jobs=config.jobs)(
        delayed(run_cell)(method, rate, trial, seed, data, cfg, config.bandwidth, params)
        for method, rate, trial, seed, cfg, params in cells
    )


def _track(tracker: Optional[MlflowTracker], report: ExperimentReport, cfg: LmsscConfig):
    if tracker is None or not tracker.enabled:
        return
    for record in report.records:
        tracker.log_record(record, cfg)
    for row in report.aggregates:
        tracker.log_aggregate(row, cfg)


def run(config: ExperimentConfig, tracker: Optional[MlflowTracker] = None) -> ExperimentReport:
    """
    Evaluate every (method, rate, trial) cell of the config.

    Accuracy is the fraction of unlabeled points classified correctly. A failing
    cell is recorded with its CellFailure and the grid continues.
    """
    data = load_source(config)
    report = ExperimentReport(config=config.model_dump(mode="json"))
    report.extend(_run_grid(config, data, [(config.lmssc, {})]))
    _track(tracker, report, config.lmssc)

    if report.has_failures:
        logger.warning(f"{len(report.failures)} of {len(report.records)} cells failed")
    return report


@dataclass
class SweepResult:
    report: ExperimentReport
    best: Optional[AggregateRow]


def sweep(config: ExperimentConfig, tracker: Optional[MlflowTracker] = None) -> SweepResult:
    """Run the grid once per (beta, gamma, r) point; best is the aggregate with the highest mean."""
    if config.sweep is None:
        raise ConfigurationError("sweep needs a grid over beta, gamma and latent_dim")

    data = load_source(config)
    points = [(config.lmssc.model_copy(update=point), point) for point in config.sweep.points()]
    report = ExperimentReport(config=config.model_dump(mode="json"))
    report.extend(_run_grid(config, data, points))
    _track(tracker, report, config.lmssc)

    scored = [row for row in report.aggregates if row.mean is not None]
    best = max(scored, key=lambda row: row.mean) if scored else None
    if best is not None:
        logger.info(f"Best cell: {best.method} rate={best.rate} {best.params} {best.cell()}")
    return SweepResult(report=report, best=best)
