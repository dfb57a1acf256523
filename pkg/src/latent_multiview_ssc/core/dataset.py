from typing import Sequence

import numpy as np

from ..errors import DimensionMismatchError, LabelCoverageError, PermutationError
from .types import MultiViewDataset


def validate(dataset: MultiViewDataset) -> None:
    """Raise if the dataset breaks any MultiViewDataset invariant, return None otherwise."""
    if dataset.n_views < 1:
        raise DimensionMismatchError("dataset needs at least one view")
    for v, view in enumerate(dataset.views):
        if view.ndim != 2:
            raise DimensionMismatchError(f"view {v} must be a matrix, got ndim={view.ndim}")
    sizes = [int(view.shape[1]) for view in dataset.views]
    if len(set(sizes)) != 1:
        raise DimensionMismatchError(f"views disagree on the number of samples: {sizes}")
    n = sizes[0]

    labels = np.asarray(dataset.labels)
    if labels.shape != (n,):
        raise DimensionMismatchError(f"expected {n} labels, got shape {labels.shape}")

    perm = np.asarray(dataset.permutation)
    if perm.shape != (n,) or not np.array_equal(np.sort(perm), np.arange(n)):
        raise PermutationError("permutation is not a bijection on 0..N-1")

    l = dataset.labeled_count
    if not 1 <= l < n:
        raise LabelCoverageError(f"labeled count must satisfy 1 <= l < N, got l={l}, N={n}")

    c = dataset.class_count
    if c < 2:
        raise LabelCoverageError(f"at least two classes are required, got c={c}")
    if labels.min() < 0 or labels.max() >= c:
        raise LabelCoverageError(f"class ids must lie in 0..{c - 1}")
    missing = np.setdiff1d(np.arange(c), labels[:l])
    if missing.size:
        raise LabelCoverageError(f"classes {missing.tolist()} have no labeled sample")


def permute_labeled_first(
    raw_views: Sequence[np.ndarray],
    raw_labels: np.ndarray,
    labeled_mask: np.ndarray,
    n_classes: int | None = None,
) -> MultiViewDataset:
    """
    Reorder samples so the labeled ones come first.

    Args:
        raw_views: d_v x N matrices in original sample order
        raw_labels: length-N class ids in original order
        labeled_mask: length-N boolean mask of labeled samples
        n_classes: class count, inferred from the labels when omitted

    Returns:
        Validated dataset whose `permutation[i]` is the original index of storage column i
    """
    views = [np.asarray(view, dtype=float) for view in raw_views]
    if not views:
        raise DimensionMismatchError("dataset needs at least one view")
    for v, view in enumerate(views):
        if view.ndim != 2:
            raise DimensionMismatchError(f"view {v} must be a matrix, got ndim={view.ndim}")
    sizes = [int(view.shape[1]) for view in views]
    if len(set(sizes)) != 1:
        raise DimensionMismatchError(f"views disagree on the number of samples: {sizes}")
    n = sizes[0]

    mask = np.asarray(labeled_mask, dtype=bool)
    raw_labels = np.asarray(raw_labels, dtype=int)
    if mask.shape != (n,):
        raise DimensionMismatchError(f"expected a labeled mask of length {n}, got shape {mask.shape}")
    if raw_labels.shape != (n,):
        raise DimensionMismatchError(f"expected {n} labels, got shape {raw_labels.shape}")
    order = np.concatenate([np.flatnonzero(mask), np.flatnonzero(~mask)])

    dataset = MultiViewDataset(
        views=tuple(view[:, order] for view in views),
        labels=raw_labels[order],
        labeled_count=int(mask.sum()),
        permutation=order,
        n_classes=n_classes if n_classes is not None else int(raw_labels.max()) + 1,
    )
    validate(dataset)
    return dataset


def inverse_permute(values: np.ndarray, permutation: np.ndarray) -> np.ndarray:
    """Map per-sample values from storage order back to original order."""
    values = np.asarray(values)
    restored = np.empty_like(values)
    restored[np.asarray(permutation)] = values
    return restored


def one_hot(labels: np.ndarray, n_classes: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=int)
    encoded = np.zeros((labels.shape[0], n_classes))
    encoded[np.arange(labels.shape[0]), labels] = 1.0
    return encoded
