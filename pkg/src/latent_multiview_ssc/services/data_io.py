"""
Dataset files and labeled/unlabeled splits.

On disk a dataset is a JSON manifest, one comma-separated text file per view
(one sample per row, no header) and a label file with one integer per line.
Views are transposed on load into the d_v x N column-sample convention.
"""

import csv
import json
from pathlib import Path
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..errors import ConfigurationError, DataParseError, DimensionMismatchError, RateTooLowError
from ..logger import setup_logger

logger = setup_logger(__name__)

FLOAT_FORMAT = "%.17g"


class DatasetManifest(BaseModel):
    name: str
    view_files: list[str] = Field(alias="views")
    label_file: str = Field(alias="labels")
    expected_dims: list[tuple[int, int]] = Field(alias="dims")  # (d_v, N) per view
    class_count: int = Field(alias="classes")
    base_seed: int = 0

    model_config = ConfigDict(populate_by_name=True)

    @field_validator("view_files")
    @classmethod
    def _at_least_one_view(cls, value: list[str]):
        if not value:
            raise ValueError("manifest needs at least one view file")
        return value

    @field_validator("expected_dims")
    @classmethod
    def _positive_dims(cls, value: list[tuple[int, int]]):
        if any(d < 1 or n < 1 for d, n in value):
            raise ValueError(f"all dims must be positive, got {value}")
        return value

    @model_validator(mode="after")
    def _dims_per_view(self):
        if len(self.expected_dims) != len(self.view_files):
            raise ValueError(f"{len(self.view_files)} view files but {len(self.expected_dims)} dims entries")
        if len({n for _, n in self.expected_dims}) != 1:
            raise ValueError(f"views disagree on the sample count: {self.expected_dims}")
        if self.class_count < 2:
            raise ValueError("at least two classes are required")
        return self

    @property
    def n_samples(self) -> int:
        return self.expected_dims[0][1]

    @classmethod
    def from_file(cls, path: str | Path) -> "DatasetManifest":
        """Read a manifest and resolve relative file paths against its directory."""
        path = Path(path)
        with open(path, "r") as f:
            manifest = cls.model_validate(json.load(f))
        root = path.parent
        return manifest.model_copy(update={
            "view_files": [str(root / p) for p in manifest.view_files],
            "label_file": str(root / manifest.label_file),
        })

    def save_to_file(self, path: str | Path) -> None:
        with open(path, "w") as f:
            json.dump(self.model_dump(by_alias=True), f, indent=2)


def _read_matrix(path: str, expected_cols: int, view: int) -> np.ndarray:
    rows: list[list[float]] = []
    with open(path, "r", newline="") as f:
        for line_no, row in enumerate(csv.reader(f), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != expected_cols:
                if not rows:
                    raise DimensionMismatchError(
                        f"view {view} ({path}): first row has {len(row)} features, manifest says {expected_cols}"
                    )
                raise DataParseError(f"{path}:{line_no}: expected {expected_cols} values, got {len(row)}", path, line_no)
            try:
                rows.append([float(cell) for cell in row])
            except ValueError as exc:
                raise DataParseError(f"{path}:{line_no}: {exc}", path, line_no) from exc
    if not rows:
        raise DataParseError(f"{path}: no samples", path)
    return np.asarray(rows, dtype=float)


def _read_labels(path: str, class_count: int) -> np.ndarray:
    labels: list[int] = []
    with open(path, "r") as f:
        for line_no, line in enumerate(f, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                value = int(text)
            except ValueError as exc:
                raise DataParseError(f"{path}:{line_no}: not an integer label: {text!r}", path, line_no) from exc
            if not 0 <= value < class_count:
                raise DataParseError(f"{path}:{line_no}: label {value} outside 0..{class_count - 1}", path, line_no)
            labels.append(value)
    if not labels:
        raise DataParseError(f"{path}: empty label file", path)
    return np.asarray(labels, dtype=int)


def load(manifest: DatasetManifest | str | Path) -> tuple[list[np.ndarray], np.ndarray]:
    """
    Load every view and the labels of a manifest.

    Returns:
        (raw_views, raw_labels) with each view d_v x N in file sample order
    """
    if not isinstance(manifest, DatasetManifest):
        manifest = DatasetManifest.from_file(manifest)

    views = []
    for v, (path, (d, n)) in enumerate(zip(manifest.view_files, manifest.expected_dims)):
        matrix = _read_matrix(path, d, v)
        if matrix.shape[0] != n:
            raise DimensionMismatchError(f"view {v} ({path}) has {matrix.shape[0]} samples, manifest says {n}")
        views.append(matrix.T.copy())

    labels = _read_labels(manifest.label_file, manifest.class_count)
    if labels.shape[0] != manifest.n_samples:
        raise DimensionMismatchError(f"{manifest.label_file} has {labels.shape[0]} labels, expected {manifest.n_samples}")

    logger.info(f"Loaded {manifest.name}: N={manifest.n_samples}, dims={[d for d, _ in manifest.expected_dims]}, c={manifest.class_count}")
    return views, labels


def save_views(
    out_dir: str | Path,
    name: str,
    views: Sequence[np.ndarray],
    labels: np.ndarray,
    class_count: int,
    base_seed: int = 0,
) -> Path:
    """Write views (d_v x N), labels and a manifest under out_dir; returns the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    view_files = []
    for v, view in enumerate(views):
        filename = f"{name}_view{v}.csv"
        np.savetxt(out_dir / filename, np.asarray(view, dtype=float).T, fmt=FLOAT_FORMAT, delimiter=",")
        view_files.append(filename)
    label_file = f"{name}_labels.txt"
    np.savetxt(out_dir / label_file, np.asarray(labels, dtype=int), fmt="%d")

    manifest = DatasetManifest(
        name=name,
        views=view_files,
        labels=label_file,
        dims=[(int(view.shape[0]), int(view.shape[1])) for view in views],
        classes=class_count,
        base_seed=base_seed,
    )
    manifest_path = out_dir / f"{name}.json"
    manifest.save_to_file(manifest_path)
    logger.info(f"Wrote {len(view_files)} views and labels for {name} to {out_dir}")
    return manifest_path


def make_split(labels: np.ndarray, rate: float, rng_seed: int) -> np.ndarray:
    """
    Stratified labeled mask: round(rate * class_size) points per class, at least one.

    Raises RateTooLowError when rate * N cannot cover one label per class,
    since the minimum-one rule would then exceed the requested total.
    """
    labels = np.asarray(labels, dtype=int)
    if not 0.0 < rate < 1.0:
        raise ConfigurationError(f"label rate must lie in (0, 1), got {rate}")
    classes = np.unique(labels)
    n = labels.shape[0]
    if rate * n < classes.size:
        raise RateTooLowError(
            f"rate {rate} labels {rate * n:.1f} of {n} points, fewer than one per class for {classes.size} classes"
        )

    rng = np.random.default_rng(rng_seed)
    mask = np.zeros(n, dtype=bool)
    for label in classes:
        members = np.flatnonzero(labels == label)
        count = max(1, round(rate * members.size))
        mask[rng.choice(members, size=count, replace=False)] = True

    if mask.all():
        raise ConfigurationError(f"rate {rate} leaves no unlabeled points")
    return mask
