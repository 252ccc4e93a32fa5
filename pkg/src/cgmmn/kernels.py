"""Positive-definite kernels, Gram matrices, and the median bandwidth rule.

Three kernel families cover every estimator in the package: a Gaussian RBF
kernel for continuous data, a linear kernel (plain inner product), and a
Kronecker delta kernel for finite label domains. Kernels are immutable and
safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .validation import (
    as_label_vector,
    as_sample_matrix,
    check_same_dim,
    decode_one_hot,
)


@dataclass(frozen=True)
class RBFKernel:
    """Gaussian kernel ``k(a, b) = exp(-||a - b||^2 / (2 * bandwidth_sq))``.

    ``bandwidth_sq`` is in units of squared input distance and must be
    positive. Values lie in (0, 1] with k(a, a) = 1 exactly.
    """

    bandwidth_sq: float

    def __post_init__(self):
        if not (self.bandwidth_sq > 0.0 and np.isfinite(self.bandwidth_sq)):
            raise ValueError(f"bandwidth_sq must be positive, got {self.bandwidth_sq}")

    def __call__(self, a, b) -> float:
        a = np.atleast_1d(np.asarray(a, dtype=np.float64))
        b = np.atleast_1d(np.asarray(b, dtype=np.float64))
        check_same_dim(a, b, "a", "b")
        sq_dist = float(np.sum((a - b) ** 2))
        return float(np.exp(-sq_dist / (2.0 * self.bandwidth_sq)))

    def gram(self, X, Z=None) -> np.ndarray:
        X = as_sample_matrix(X, "X")
        if Z is None or Z is X:
            sq = cdist(X, X, "sqeuclidean")
        else:
            Z = as_sample_matrix(Z, "Z")
            check_same_dim(X, Z, "X", "Z")
            sq = cdist(X, Z, "sqeuclidean")
        return np.exp(-sq / (2.0 * self.bandwidth_sq))


@dataclass(frozen=True)
class LinearKernel:
    """Inner-product kernel ``k(a, b) = a . b``."""

    def __call__(self, a, b) -> float:
        a = np.atleast_1d(np.asarray(a, dtype=np.float64))
        b = np.atleast_1d(np.asarray(b, dtype=np.float64))
        check_same_dim(a, b, "a", "b")
        return float(a @ b)

    def gram(self, X, Z=None) -> np.ndarray:
        X = as_sample_matrix(X, "X")
        if Z is None or Z is X:
            return X @ X.T
        Z = as_sample_matrix(Z, "Z")
        check_same_dim(X, Z, "X", "Z")
        return X @ Z.T


@dataclass(frozen=True)
class DeltaKernel:
    """Kronecker delta kernel on finite labels: 1 if equal, else 0.

    Labels are integer codes; one-hot vectors are decoded on the way in.
    Not differentiable, so it can only condition, never be an output kernel
    during gradient-based training.
    """

    def __call__(self, a, b) -> float:
        return 1.0 if self._code(a, "a") == self._code(b, "b") else 0.0

    def gram(self, X, Z=None) -> np.ndarray:
        cx = as_label_vector(X, "X")
        cz = cx if Z is None or Z is X else as_label_vector(Z, "Z")
        if cx.size == 0 or cz.size == 0:
            raise ValueError("gram requires at least one sample on each side")
        return (cx[:, None] == cz[None, :]).astype(np.float64)

    @staticmethod
    def _code(value, name: str) -> int:
        arr = np.asarray(value)
        if arr.ndim == 1 and arr.size > 1:
            return int(decode_one_hot(arr.reshape(1, -1), name)[0])
        if arr.ndim <= 1 and arr.size == 1:
            return int(as_label_vector(arr.reshape(1), name)[0])
        raise ValueError(f"{name} is not a single label (integer code or one-hot vector)")


Kernel = RBFKernel | LinearKernel | DeltaKernel


def kernel_from_name(name: str, bandwidth_sq: float | None = None) -> Kernel:
    """Build a kernel from its CLI/config name."""
    if name == "rbf":
        if bandwidth_sq is None:
            raise ValueError("rbf kernel requires bandwidth_sq")
        return RBFKernel(bandwidth_sq=bandwidth_sq)
    if name == "linear":
        return LinearKernel()
    if name == "delta":
        return DeltaKernel()
    raise ValueError(f"unknown kernel {name!r} (expected rbf, linear, or delta)")


def median_bandwidth_sq(X) -> float:
    """Median of pairwise squared Euclidean distances, excluding self-pairs.

    With this bandwidth the median normalized distance ``||a - b||^2 / sigma^2``
    equals 1. Raises if fewer than two samples or the median is zero (all
    samples identical); the caller must then supply a bandwidth explicitly.
    """
    X = as_sample_matrix(X, "X")
    if X.shape[0] < 2:
        raise ValueError("median bandwidth needs at least two samples")
    med = float(np.median(pdist(X, "sqeuclidean")))
    if med <= 0.0:
        raise ValueError("median pairwise distance is zero; supply bandwidth_sq explicitly")
    return med
