"""Optional MLflow logging of benchmark cells."""

from typing import Optional

from ..config import settings
from ..core.types import LmsscConfig
from ..logger import setup_logger
from .report import AggregateRow, TrialRecord

logger = setup_logger(__name__)


def _solver_params(cfg: LmsscConfig) -> dict:
    # sweep cells override these through record.params
    return {"k": cfg.neighbor_count, "beta": cfg.beta, "gamma": cfg.gamma, "latent_dim": cfg.latent_dim}


class MlflowTracker:
    """
    Logs one MLflow run per cell and one per aggregate row.

    Tracking is enabled when a tracking URI is configured (LMSSC_MLFLOW_TRACKING_URI);
    otherwise every call is a no-op.
    """

    def __init__(self, tracking_uri: Optional[str] = None, experiment: Optional[str] = None):
        self.tracking_uri = tracking_uri if tracking_uri is not None else settings.MLFLOW_TRACKING_URI
        self.experiment = experiment or settings.MLFLOW_EXPERIMENT
        self._mlflow = None
        if self.enabled:
            import mlflow

            mlflow.set_tracking_uri(self.tracking_uri)
            mlflow.set_experiment(self.experiment)
            self._mlflow = mlflow
            logger.info(f"MLflow tracking to {self.tracking_uri} (experiment {self.experiment})")

    @property
    def enabled(self) -> bool:
        return bool(self.tracking_uri)

    def log_record(self, record: TrialRecord, cfg: LmsscConfig):
        if self._mlflow is None:
            return
        with self._mlflow.start_run(run_name=f"{record.method}-rate{record.rate}-trial{record.trial}"):
            self._mlflow.log_params({
                "method": record.method,
                "rate": record.rate,
                "trial": record.trial,
                "seed": record.seed,
                **_solver_params(cfg),
                **record.params,
            })
            metrics = {"wall_time": record.wall_time}
            if record.accuracy is not None:
                metrics["accuracy"] = record.accuracy
            if record.iterations is not None:
                metrics["iterations"] = record.iterations
            self._mlflow.log_metrics(metrics)
            if record.failed:
                self._mlflow.set_tag("failure", record.failure["failure_type"])

    def log_aggregate(self, row: AggregateRow, cfg: LmsscConfig):
        if self._mlflow is None or row.mean is None:
            return
        with self._mlflow.start_run(run_name=f"{row.method}-rate{row.rate}-summary"):
            self._mlflow.log_params({"method": row.method, "rate": row.rate, **_solver_params(cfg), **row.params})
            self._mlflow.log_metrics({"mean_accuracy": row.mean, "std_accuracy": row.std, "trials": row.trials})
