"""Regularized symmetric positive-definite solves via Cholesky factors.

Every conditional-embedding estimator needs the action of ``(K + lambda*I)^-1``.
We factor once per call and solve; explicit inverses appear only in test
oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve, cholesky


class NotPositiveDefiniteError(ValueError):
    """Cholesky factorization failed; carries the smallest pivot reached."""

    def __init__(self, smallest_pivot: float):
        self.smallest_pivot = smallest_pivot
        super().__init__(
            "matrix is not positive definite after regularization "
            f"(smallest pivot {smallest_pivot:.6e})"
        )


@dataclass(frozen=True)
class RegularizedCholesky:
    """Lower-triangular factor ``L`` with ``K + lambda*I = L @ L.T``."""

    factor: np.ndarray
    lam: float

    def solve(self, B: np.ndarray) -> np.ndarray:
        """Return ``(K + lambda*I)^-1 @ B``."""
        return cho_solve((self.factor, True), np.asarray(B, dtype=np.float64))

    def reconstruct(self) -> np.ndarray:
        """Rebuild ``K + lambda*I`` from the factor."""
        return self.factor @ self.factor.T

    @property
    def size(self) -> int:
        return self.factor.shape[0]


def reg_cholesky(K: np.ndarray, lam: float) -> RegularizedCholesky:
    """Factor ``K + lam*I`` for a symmetric matrix ``K``.

    ``lam`` must be nonnegative; the regularized matrix must be numerically
    positive definite or :class:`NotPositiveDefiniteError` is raised.
    """
    K = np.asarray(K, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"K must be square, got shape {K.shape}")
    if not np.allclose(K, K.T, rtol=1e-10, atol=1e-12):
        raise ValueError("K must be symmetric")
    if not (lam >= 0.0 and np.isfinite(lam)):
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    reg = K + lam * np.eye(K.shape[0])
    try:
        L = cholesky(reg, lower=True)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(_smallest_pivot(reg)) from None
    return RegularizedCholesky(factor=L, lam=lam)


def default_reg_lambda(K: np.ndarray) -> float:
    """Default ridge ``0.1 * N**-0.5`` scaled by the mean Gram diagonal."""
    K = np.asarray(K, dtype=np.float64)
    n = K.shape[0]
    return 0.1 * n ** -0.5 * float(np.mean(np.diag(K)))


def _smallest_pivot(A: np.ndarray) -> float:
    """Run a plain Cholesky recurrence and report the smallest pivot seen."""
    A = A.copy()
    n = A.shape[0]
    smallest = np.inf
    for j in range(n):
        pivot = A[j, j] - A[j, :j] @ A[j, :j]
        smallest = min(smallest, pivot)
        if pivot <= 0.0:
            return float(pivot)
        A[j, j] = np.sqrt(pivot)
        if j + 1 < n:
            A[j + 1 :, j] = (A[j + 1 :, j] - A[j + 1 :, :j] @ A[j, :j]) / A[j, j]
    return float(smallest)
