from .data_io import DatasetManifest, load, make_split, save_views
from .experiment import ExperimentConfig, SweepGrid, SweepResult, run, sweep
from .report import AggregateRow, ExperimentReport, TrialRecord, emit
from .synthetic import SyntheticDataset, SyntheticSpec, generate_synthetic

__all__ = [
    "AggregateRow",
    "DatasetManifest",
    "ExperimentConfig",
    "ExperimentReport",
    "SweepGrid",
    "SweepResult",
    "SyntheticDataset",
    "SyntheticSpec",
    "TrialRecord",
    "emit",
    "generate_synthetic",
    "load",
    "make_split",
    "run",
    "save_views",
    "sweep",
]
