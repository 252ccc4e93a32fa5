"""Kernel mean embeddings and the biased squared-MMD estimator.

A distribution is represented by the average of kernel feature maps over its
samples. The squared maximum mean discrepancy between two sample sets is the
squared RKHS distance between their empirical embeddings, expanded through
the kernel so no explicit feature map is ever needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import DeltaKernel, Kernel


@dataclass(frozen=True)
class MeanEmbedding:
    """Weighted combination of feature maps ``sum_i w_i * phi(anchors[i])``.

    ``__call__`` evaluates the embedding as a function via the reproducing
    property; ``expectation`` takes the inner product with a function given
    by its values at the anchors.
    """

    anchors: np.ndarray
    weights: np.ndarray
    kernel: Kernel

    def __call__(self, z) -> float:
        return float(self.weights @ self.kernel.gram(self.anchors, self._as_anchor(z))[:, 0])

    def expectation(self, g_values) -> float:
        g = np.asarray(g_values, dtype=np.float64)
        if g.shape[0] != self.weights.shape[0]:
            raise ValueError(
                f"g_values has {g.shape[0]} entries for {self.weights.shape[0]} anchors"
            )
        return float(self.weights @ g)

    def _as_anchor(self, z) -> np.ndarray:
        z = np.asarray(z)
        if isinstance(self.kernel, DeltaKernel):
            return z.reshape(1) if z.ndim == 0 else z.reshape(1, -1)
        return np.atleast_1d(z).reshape(1, -1)


def empirical_embedding(kernel: Kernel, X) -> MeanEmbedding:
    """Plain empirical embedding with uniform weights 1/N."""
    anchors = np.asarray(X)
    n = anchors.shape[0]
    if n == 0:
        raise ValueError("empirical embedding needs at least one sample")
    return MeanEmbedding(anchors=anchors, weights=np.full(n, 1.0 / n), kernel=kernel)


def mmd2_biased(kernel: Kernel, X, Y) -> float:
    """Biased (V-statistic) squared MMD between sample sets ``X`` and ``Y``.

    Returns ``mean(Kxx) + mean(Kyy) - 2*mean(Kxy)``, the squared RKHS norm of
    the difference between the two empirical mean embeddings. Zero (to
    rounding) when X and Y coincide; symmetric in its arguments.
    """
    kxx = kernel.gram(X)
    kyy = kernel.gram(Y)
    kxy = kernel.gram(X, Y)
    return float(kxx.mean() + kyy.mean() - 2.0 * kxy.mean())


def mmd2_as_trace(kernel: Kernel, X, Y) -> float:
    """Squared MMD written as traces against the all-ones weighting matrix.

    Algebraically identical to :func:`mmd2_biased` for equal-size sample
    sets; kept as a genuinely separate computation path so the identity can
    be tested. Requires ``|X| == |Y|``.
    """
    kxx = kernel.gram(X)
    kyy = kernel.gram(Y)
    if kxx.shape[0] != kyy.shape[0]:
        raise ValueError(
            f"trace form assumes equal sample counts, got {kxx.shape[0]} vs {kyy.shape[0]}"
        )
    kxy = kernel.gram(X, Y)
    n = kxx.shape[0]
    ones = np.ones((n, n))
    total = np.trace(kxx @ ones) + np.trace(kyy @ ones) - 2.0 * np.trace(kxy @ ones)
    return float(total) / n**2


@dataclass(frozen=True)
class PermutationTestResult:
    statistic: float
    p_value: float
    null_values: np.ndarray


def mmd_permutation_test(
    kernel: Kernel,
    X,
    Y,
    n_permutations: int = 200,
    rng: np.random.Generator | int | None = None,
) -> PermutationTestResult:
    """Permutation null for the biased squared MMD.

    Pools both sample sets, reshuffles the split ``n_permutations`` times and
    recomputes the statistic from the pooled Gram matrix. The p-value uses
    the standard add-one correction.
    """
    rng = np.random.default_rng(rng)
    X = np.asarray(X)
    Y = np.asarray(Y)
    n, m = X.shape[0], Y.shape[0]
    pooled = np.concatenate([X, Y], axis=0)
    gram = kernel.gram(pooled)
    observed = _mmd2_from_pooled(gram, np.arange(n), np.arange(n, n + m))
    null = np.empty(n_permutations)
    for t in range(n_permutations):
        perm = rng.permutation(n + m)
        null[t] = _mmd2_from_pooled(gram, perm[:n], perm[n:])
    p_value = (1.0 + float(np.sum(null >= observed))) / (1.0 + n_permutations)
    return PermutationTestResult(statistic=observed, p_value=p_value, null_values=null)


def _mmd2_from_pooled(gram: np.ndarray, ix: np.ndarray, iy: np.ndarray) -> float:
    kxx = gram[np.ix_(ix, ix)]
    kyy = gram[np.ix_(iy, iy)]
    kxy = gram[np.ix_(ix, iy)]
    return float(kxx.mean() + kyy.mean() - 2.0 * kxy.mean())
