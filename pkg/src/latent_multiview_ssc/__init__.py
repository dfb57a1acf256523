"""Latent multi-view semi-supervised classification."""

from .core import LmsscConfig, MultiViewDataset
from .solvers import fit, predict

__version__ = "0.1.0"

__all__ = ["LmsscConfig", "MultiViewDataset", "fit", "predict"]
