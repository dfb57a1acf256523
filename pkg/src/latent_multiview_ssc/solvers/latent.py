"""
Latent-factor subproblems.

W-step: every row of every W^v is an independent nonnegative least-squares
problem  min_{w >= 0} ||x - w H||^2  sharing the same H, so it is solved in
Gram form (G = H H^T, b = H x^T) with a Lawson-Hanson active set.

H-step: the stationarity condition  A H + beta H L = B  with
A = sum_v W^vT W^v and B = sum_v W^vT X^v is a Sylvester equation with
symmetric coefficients; diagonalising both sides decouples it entrywise.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from ..core.types import LatentModel, MultiViewDataset, SolverWarning
from ..errors import NnlsIterationError, SingularSystemError
from ..logger import setup_logger

logger = setup_logger(__name__)

SYLVESTER_EIG_FLOOR = 1e-12
SYLVESTER_REL_FLOOR = 1e-13  # relative to the largest eigenvalue of A


@dataclass(frozen=True, eq=False)
class SylvesterSystem:
    A: np.ndarray  # r x r, sum_v W^vT W^v
    scale: float  # beta
    L: np.ndarray  # N x N Laplacian
    B: np.ndarray  # r x N, sum_v W^vT X^v

    def residual(self, H: np.ndarray) -> float:
        return float(np.linalg.norm(self.A @ H + self.scale * H @ self.L - self.B))


def _views_of(X: MultiViewDataset | Sequence[np.ndarray]) -> tuple[np.ndarray, ...]:
    return X.views if isinstance(X, MultiViewDataset) else tuple(X)


def _solve_passive(gram: np.ndarray, rhs: np.ndarray, passive: np.ndarray) -> np.ndarray:
    z = np.zeros_like(rhs)
    idx = np.flatnonzero(passive)
    if idx.size == 0:
        return z
    sub = gram[np.ix_(idx, idx)]
    try:
        z[idx] = scipy.linalg.cho_solve(scipy.linalg.cho_factor(sub), rhs[idx])
    except np.linalg.LinAlgError:
        z[idx] = scipy.linalg.lstsq(sub, rhs[idx])[0]
    return z


def nnls_gram(gram: np.ndarray, rhs: np.ndarray, max_swaps: int | None = None) -> np.ndarray:
    """
    Lawson-Hanson active set for  min_{w >= 0} w^T G w - 2 b^T w.

    Args:
        gram: r x r symmetric PSD matrix G
        rhs: length-r vector b
        max_swaps: cap on active-set changes (default 10*r)

    Returns:
        Nonnegative minimiser w
    """
    r = rhs.shape[0]
    max_swaps = 10 * r if max_swaps is None else max_swaps
    tol = 10 * np.finfo(float).eps * max(np.abs(gram).sum(axis=0).max(), 1.0) * r

    w = np.zeros(r)
    passive = np.zeros(r, dtype=bool)
    dual = rhs - gram @ w
    swaps = 0

    while (~passive).any() and dual[~passive].max() > tol:
        candidates = np.where(passive, -np.inf, dual)
        passive[int(np.argmax(candidates))] = True
        swaps += 1
        z = _solve_passive(gram, rhs, passive)

        while passive.any() and z[passive].min() <= 0.0:
            swaps += 1
            if swaps > max_swaps:
                raise NnlsIterationError(f"active set did not settle within {max_swaps} swaps")
            blocking = passive & (z <= 0.0)
            step = np.min(w[blocking] / (w[blocking] - z[blocking]))
            w = w + step * (z - w)
            passive &= w > tol
            w[~passive] = 0.0
            z = _solve_passive(gram, rhs, passive)

        w = z
        dual = rhs - gram @ w
        if swaps > max_swaps:
            raise NnlsIterationError(f"active set did not settle within {max_swaps} swaps")

    return np.maximum(w, 0.0)


def nnls_row(x: np.ndarray, H: np.ndarray, max_swaps: int | None = None) -> np.ndarray:
    """min_{w >= 0} ||x - w H||^2 for a single row x (length N) and H (r x N)."""
    H = np.asarray(H, dtype=float)
    return nnls_gram(H @ H.T, H @ np.asarray(x, dtype=float), max_swaps)


def update_view_factors(X: MultiViewDataset | Sequence[np.ndarray], H: np.ndarray) -> list[np.ndarray]:
    """W-step: row-wise NNLS for every view against the shared H."""
    gram = H @ H.T
    factors = []
    for v, view in enumerate(_views_of(X)):
        rhs_rows = view @ H.T  # d_v x r, row i is H x_i^T
        factor = np.zeros((view.shape[0], H.shape[0]))
        for i, rhs in enumerate(rhs_rows):
            try:
                factor[i] = nnls_gram(gram, rhs)
            except NnlsIterationError as exc:
                raise NnlsIterationError(f"NNLS failed on view {v}, row {i}: {exc}", view=v, row=i) from exc
        factors.append(factor)
    return factors


def assemble_sylvester(X: MultiViewDataset | Sequence[np.ndarray], factors: Sequence[np.ndarray], lap: np.ndarray, beta: float) -> SylvesterSystem:
    A = sum(W.T @ W for W in factors)
    B = sum(W.T @ view for W, view in zip(factors, _views_of(X)))
    return SylvesterSystem(A=0.5 * (A + A.T), scale=beta, L=np.asarray(lap), B=B)


def update_shared_factor(system: SylvesterSystem, warnings: list[SolverWarning] | None = None) -> np.ndarray:
    """
    H-step: solve A H + beta H L = B.

    With L = U diag(lam) U^T and A = Q diag(sig) Q^T the transformed unknown
    Q^T H U has entries (Q^T B U)_ij / (sig_i + beta lam_j), which is the
    Bartels-Stewart solution specialised to symmetric coefficients.
    """
    sig, Q = scipy.linalg.eigh(system.A)
    # A is PSD; eigenvalues below the floor are rounding noise around its null space
    floor = max(SYLVESTER_REL_FLOOR * max(float(sig[-1]), 0.0), SYLVESTER_EIG_FLOOR)
    if sig[0] < floor:
        message = f"A is near singular (eigenvalues {sig[0]:.3e} .. {sig[-1]:.3e}); lifted to the floor {floor:.3e}"
        sig = np.maximum(sig, floor)
        logger.debug(message)
        if warnings is not None:
            warnings.append(SolverWarning(kind="sylvester-ridge", message=message))

    lam, U = scipy.linalg.eigh(system.L)
    lam = np.maximum(lam, 0.0)
    denom = sig[:, None] + system.scale * lam[None, :]
    if np.any(denom <= 0.0) or not np.all(np.isfinite(denom)):
        raise SingularSystemError("Sylvester operator is singular after the eigenvalue floor")

    H = Q @ ((Q.T @ system.B @ U) / denom) @ U.T
    if not np.all(np.isfinite(H)):
        raise SingularSystemError("Sylvester solve produced non-finite entries")
    return H


def factorization_loss(X: MultiViewDataset | Sequence[np.ndarray], model: LatentModel) -> float:
    return float(sum(
        np.linalg.norm(view - W @ model.shared) ** 2
        for view, W in zip(_views_of(X), model.view_factors)
    ))
