"""
Failure analysis for benchmark cells.

A failing (method, rate, trial) cell is turned into a CellFailure record so
the grid can continue and the report says what went wrong and what to try.
"""

import traceback
from dataclasses import dataclass, field
from typing import Any

from ..errors import LmsscError, SolverError


@dataclass
class CellFailure:
    """Classified failure of one benchmark cell."""
    failure_type: str  # error kind, e.g. "disconnected-unlabeled"
    error_type: str  # exception class name
    message: str
    root_cause: str
    suggested_fix: str
    context: dict[str, Any] = field(default_factory=dict)


@dataclass
class CellContext:
    method: str
    rate: float
    trial: int
    seed: int
    params: dict[str, Any] = field(default_factory=dict)


class FailureAnalyzer:
    def __init__(self):
        self.recovery_strategies = self._build_recovery_strategies()

    def analyze_cell_failure(self, error: BaseException, cell: CellContext) -> CellFailure:
        """
        Classify an exception raised while running a cell.

        Args:
            error: the exception the cell raised
            cell: identification of the cell

        Returns:
            CellFailure with the error kind, root cause and suggested fix
        """
        root = self._root_error(error)
        failure_type = getattr(root, "kind", "unexpected")
        root_cause, suggested_fix = self.recovery_strategies.get(
            failure_type,
            ("unclassified exception", "inspect the traceback in the report context"),
        )

        context: dict[str, Any] = {
            "method": cell.method,
            "rate": cell.rate,
            "trial": cell.trial,
            "seed": cell.seed,
            **cell.params,
        }
        if isinstance(error, SolverError):
            context["iteration"] = error.iteration
            context["step"] = error.step
        for attribute in ("view", "row", "nodes", "path", "line"):
            if getattr(root, attribute, None) is not None:
                context[attribute] = getattr(root, attribute)
        if not isinstance(root, LmsscError):
            context["traceback"] = "".join(traceback.format_exception(type(error), error, error.__traceback__))

        return CellFailure(
            failure_type=failure_type,
            error_type=type(root).__name__,
            message=str(error),
            root_cause=root_cause,
            suggested_fix=suggested_fix,
            context=context,
        )

    @staticmethod
    def _root_error(error: BaseException) -> BaseException:
        # SolverError wraps the subproblem error that carries the kind
        while isinstance(error, SolverError) and error.__cause__ is not None:
            error = error.__cause__
        return error

    def _build_recovery_strategies(self) -> dict[str, tuple[str, str]]:
        return {
            "disconnected-unlabeled": (
                "the learned graph has a component with no labeled point",
                "raise the neighbor count k or the label rate",
            ),
            "degenerate-distances": (
                "duplicate points make the k-th and (k+1)-th distances tie everywhere",
                "deduplicate samples or change k",
            ),
            "singular-system": (
                "the Sylvester operator A + beta*lambda is singular",
                "check for all-zero views or increase beta",
            ),
            "max-iterations": (
                "the NNLS active set kept cycling on an ill-conditioned Gram matrix",
                "lower the latent dimension r",
            ),
            "label-coverage": (
                "the split left a class without labeled samples",
                "raise the label rate",
            ),
            "rate-too-low": (
                "the label rate cannot give every class one labeled point",
                "raise the label rate",
            ),
            "configuration": (
                "a parameter is outside its valid range for this dataset",
                "check k against N and the label rates",
            ),
            "dimension-mismatch": (
                "views or labels disagree on their shapes",
                "check the manifest dims against the files",
            ),
            "parse-error": (
                "a data file could not be parsed",
                "fix the reported line",
            ),
            "invariant": (
                "a domain invariant was violated during the run",
                "rerun with invariant checks on and inspect the first failing iteration",
            ),
        }
