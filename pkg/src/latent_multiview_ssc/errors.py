"""
Exception hierarchy shared by the solvers, the data layer and the benchmark runner.

Every error carries a short `kind` string so that per-cell failures can be
classified without string matching on messages.
"""


class LmsscError(Exception):
    kind = "lmssc-error"


class DimensionMismatchError(LmsscError, ValueError):
    kind = "dimension-mismatch"


class LabelCoverageError(LmsscError, ValueError):
    kind = "label-coverage"


class PermutationError(LmsscError, IndexError):
    kind = "index-error"


class ConfigurationError(LmsscError, ValueError):
    kind = "configuration"


class DegenerateDistancesError(LmsscError, ValueError):
    kind = "degenerate-distances"


class NnlsIterationError(LmsscError, RuntimeError):
    kind = "max-iterations"

    def __init__(self, message: str, view: int | None = None, row: int | None = None):
        super().__init__(message)
        self.view = view
        self.row = row


class SingularSystemError(LmsscError, ArithmeticError):
    kind = "singular-system"


class DisconnectedUnlabeledError(LmsscError, ArithmeticError):
    """A connected component of the graph holds no labeled point."""
    kind = "disconnected-unlabeled"

    def __init__(self, message: str, nodes: list[list[int]] | None = None):
        super().__init__(message)
        self.nodes = nodes or []


class SolverError(LmsscError, RuntimeError):
    """Subproblem failure re-raised with the iteration it happened in."""
    kind = "solver"

    def __init__(self, message: str, iteration: int, step: str):
        super().__init__(message)
        self.iteration = iteration
        self.step = step


class DataParseError(LmsscError, ValueError):
    kind = "parse-error"

    def __init__(self, message: str, path: str, line: int | None = None):
        super().__init__(message)
        self.path = path
        self.line = line


class RateTooLowError(LmsscError, ValueError):
    kind = "rate-too-low"


class InvariantError(LmsscError, AssertionError):
    """A domain object violates one of its documented invariants."""
    kind = "invariant"
