"""Conditional mean embeddings and the conditional squared-MMD criterion.

The conditional embedding operator maps the feature of a conditioning value
x to the mean embedding of P(Y | x). Empirically it is a factored object:
the y anchors, the x anchors, and the action of a regularized inverse Gram
matrix. The squared conditional MMD between two paired sample sets is the
squared Hilbert-Schmidt norm of the difference between their empirical
operators, computed purely from Gram matrices as three trace terms.

When the conditioning domain is finite a Kronecker delta kernel makes the
input second-moment operator diagonal in the class probabilities, so the
regularized inverse is replaced by exact per-class uniform weights and the
ridge parameter drops out entirely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import MeanEmbedding
from .kernels import DeltaKernel, Kernel, LinearKernel, RBFKernel
from .linalg import RegularizedCholesky, default_reg_lambda, reg_cholesky
from .validation import as_label_vector, as_sample_matrix, as_vector, check_paired


class ConditionalEmbedding:
    """Empirical conditional mean embedding operator, fit on paired samples.

    Parameters
    ----------
    kernel_x : Kernel
        Kernel on the conditioning variable. A :class:`DeltaKernel` switches
        to the finite-domain estimate (per-class empirical frequencies, no
        ridge); any other kernel uses the regularized Gram inverse.
    kernel_y : Kernel
        Kernel on the output variable.
    reg_lambda : float, optional
        Ridge added to the input Gram matrix. ``None`` selects
        ``0.1 * N**-0.5`` scaled by the mean Gram diagonal. Ignored in
        finite mode.

    After ``fit``, ``weights(x)`` returns the coefficient vector ``beta`` so
    that the embedding of P(Y | x) is ``sum_i beta_i * phi(y_i)`` over the
    stored y anchors.
    """

    def __init__(self, kernel_x: Kernel, kernel_y: Kernel, reg_lambda: float | None = None):
        self.kernel_x = kernel_x
        self.kernel_y = kernel_y
        self.reg_lambda = reg_lambda

    @property
    def finite_mode(self) -> bool:
        return isinstance(self.kernel_x, DeltaKernel)

    def fit(self, X, y) -> "ConditionalEmbedding":
        check_paired(np.asarray(X), np.asarray(y))
        self.y_anchors_ = np.asarray(y)
        if self.finite_mode:
            codes = as_label_vector(X, "X")
            self.x_anchors_ = codes
            self.classes_, counts = np.unique(codes, return_counts=True)
            self.class_probs_ = counts / codes.shape[0]
            self.lambda_ = 0.0
        else:
            anchors = as_sample_matrix(X, "X")
            self.x_anchors_ = anchors
            K = self.kernel_x.gram(anchors)
            lam = default_reg_lambda(K) if self.reg_lambda is None else float(self.reg_lambda)
            if lam < 0.0:
                raise ValueError(f"reg_lambda must be nonnegative, got {lam}")
            self.chol_ = reg_cholesky(K, lam)
            self.lambda_ = lam
        return self

    def weights(self, x) -> np.ndarray:
        """Coefficients of the conditional embedding at ``x`` over y anchors."""
        self._check_fitted()
        if self.finite_mode:
            code = int(as_label_vector(np.atleast_1d(x), "x")[0])
            members = self.x_anchors_ == code
            count = int(members.sum())
            if count == 0:
                raise ValueError(f"label {code} has no observed samples; conditional undefined")
            return members.astype(np.float64) / count
        x = as_vector(x, "x")
        kvec = self.kernel_x.gram(self.x_anchors_, x.reshape(1, -1))[:, 0]
        return self.chol_.solve(kvec)

    def embedding(self, x) -> MeanEmbedding:
        """The conditional mean embedding of P(Y | x) as a weighted embedding."""
        return MeanEmbedding(anchors=self.y_anchors_, weights=self.weights(x), kernel=self.kernel_y)

    def expectation(self, x, g_values) -> float:
        """Estimate E[g(Y) | x] from g's values at the y anchors."""
        return self.embedding(x).expectation(g_values)

    def _check_fitted(self) -> None:
        if not hasattr(self, "y_anchors_"):
            raise ValueError("ConditionalEmbedding is not fitted; call fit(X, y) first")


@dataclass(frozen=True)
class CmmdEstimate:
    """Squared conditional MMD with its pre-clamp value and trace terms.

    ``value`` is ``max(raw, 0)``; ``raw`` can dip below zero only through
    rounding since the criterion is a squared operator norm. ``terms`` holds
    the (data, generated, cross) trace terms before combination.
    """

    value: float
    raw: float
    terms: tuple[float, float, float]
    reg_lambda: float
    finite_mode: bool

    @property
    def scale(self) -> float:
        t1, t2, t3 = self.terms
        return abs(t1) + abs(t2) + 2.0 * abs(t3)


@dataclass(frozen=True)
class ConditioningMatrices:
    """Input-side weighting matrices of the three CMMD trace terms.

    These depend only on the conditioning values, never on the outputs, so
    one instance can be shared between the loss and its output gradients
    within a minibatch.
    """

    data: np.ndarray
    gen: np.ndarray
    cross: np.ndarray
    reg_lambda: float
    finite_mode: bool


def conditioning_matrices(
    kernel_x: Kernel,
    x_data,
    x_gen,
    reg_lambda: float | None = None,
    finite_mode: bool | None = None,
) -> ConditioningMatrices:
    """Build the weighting matrices for the CMMD trace terms.

    In the regularized path these are ``Ktil^-1 K Ktil^-1`` per side and
    ``Ktil_gen^-1 K_cross Ktil_data^-1`` across sides, with
    ``Ktil = K + lambda*I``. In the finite path the same roles are played by
    products of per-class frequency matrices and the ridge drops out.
    """
    if finite_mode is None:
        finite_mode = isinstance(kernel_x, DeltaKernel)
    if finite_mode:
        if not isinstance(kernel_x, DeltaKernel):
            raise ValueError("finite_mode requires a delta kernel on the conditioning variable")
        return _finite_conditioning(x_data, x_gen)
    K_d = kernel_x.gram(x_data)
    lam = default_reg_lambda(K_d) if reg_lambda is None else float(reg_lambda)
    if lam < 0.0:
        raise ValueError(f"reg_lambda must be nonnegative, got {lam}")
    chol_d = reg_cholesky(K_d, lam)
    A_d = _sandwich(chol_d, K_d)
    if x_gen is x_data:
        # Shared conditioning values: all three weightings coincide.
        return ConditioningMatrices(data=A_d, gen=A_d, cross=A_d, reg_lambda=lam, finite_mode=False)
    K_s = kernel_x.gram(x_gen)
    chol_s = reg_cholesky(K_s, lam)
    K_cross = kernel_x.gram(x_gen, x_data)
    A_s = _sandwich(chol_s, K_s)
    B = chol_s.solve(chol_d.solve(K_cross.T).T)
    return ConditioningMatrices(data=A_d, gen=A_s, cross=B, reg_lambda=lam, finite_mode=False)


def cmmd2(
    kernel_x: Kernel,
    kernel_y: Kernel,
    x_data,
    y_data,
    x_gen,
    y_gen,
    reg_lambda: float | None = None,
    finite_mode: bool | None = None,
    matrices: ConditioningMatrices | None = None,
) -> CmmdEstimate:
    """Squared conditional MMD between two paired sample sets.

    The value is the squared Hilbert-Schmidt norm of the difference between
    the empirical conditional embedding operators of ``(x_data, y_data)``
    and ``(x_gen, y_gen)``, expanded into three Gram-matrix trace terms.
    Identical datasets give zero up to rounding; the result is clamped at
    zero with the raw value retained for diagnostics.
    """
    check_paired(np.asarray(x_data), np.asarray(y_data), "x_data", "y_data")
    check_paired(np.asarray(x_gen), np.asarray(y_gen), "x_gen", "y_gen")
    if matrices is None:
        matrices = conditioning_matrices(kernel_x, x_data, x_gen, reg_lambda, finite_mode)
    L_d = kernel_y.gram(y_data)
    L_s = kernel_y.gram(y_gen)
    L_cross = kernel_y.gram(y_data, y_gen)
    t1 = float(np.sum(matrices.data * L_d))
    t2 = float(np.sum(matrices.gen * L_s))
    t3 = float(np.sum(matrices.cross * L_cross.T))
    raw = t1 + t2 - 2.0 * t3
    return CmmdEstimate(
        value=max(raw, 0.0),
        raw=raw,
        terms=(t1, t2, t3),
        reg_lambda=matrices.reg_lambda,
        finite_mode=matrices.finite_mode,
    )


def cmmd2_sample_gradient(
    kernel_x: Kernel,
    kernel_y: Kernel,
    x_data,
    y_data,
    x_gen,
    y_gen,
    reg_lambda: float | None = None,
    finite_mode: bool | None = None,
    matrices: ConditioningMatrices | None = None,
) -> np.ndarray:
    """Gradient of the squared conditional MMD w.r.t. each generated output.

    Only the output-side Gram matrices depend on the generated samples; the
    conditioning matrices are fixed within a batch and may be passed in via
    ``matrices`` to avoid refactorizing. Requires a differentiable output
    kernel (RBF or linear). Returns an array of shape ``(n_gen, dim_y)``.
    """
    check_paired(np.asarray(x_data), np.asarray(y_data), "x_data", "y_data")
    check_paired(np.asarray(x_gen), np.asarray(y_gen), "x_gen", "y_gen")
    if isinstance(kernel_y, DeltaKernel):
        raise ValueError("delta output kernel is not differentiable; use rbf or linear")
    if matrices is None:
        matrices = conditioning_matrices(kernel_x, x_data, x_gen, reg_lambda, finite_mode)
    Y_d = as_sample_matrix(y_data, "y_data")
    Y_s = as_sample_matrix(y_gen, "y_gen")
    A_s, B = matrices.gen, matrices.cross
    if isinstance(kernel_y, LinearKernel):
        return 2.0 * (A_s @ Y_s) - 2.0 * (B @ Y_d)
    if isinstance(kernel_y, RBFKernel):
        L_s = kernel_y.gram(Y_s)
        L_cross_t = kernel_y.gram(Y_d, Y_s).T  # (n_gen, n_data)
        M_self = A_s * L_s
        M_cross = B * L_cross_t
        r_self = M_self.sum(axis=1, keepdims=True)
        r_cross = M_cross.sum(axis=1, keepdims=True)
        inv_bw = 1.0 / kernel_y.bandwidth_sq
        grad_self = -2.0 * inv_bw * (r_self * Y_s - M_self @ Y_s)
        grad_cross = 2.0 * inv_bw * (r_cross * Y_s - M_cross @ Y_d)
        return grad_self + grad_cross
    raise ValueError(f"unsupported output kernel {type(kernel_y).__name__}")


def _sandwich(chol: RegularizedCholesky, K: np.ndarray) -> np.ndarray:
    """``Ktil^-1 K Ktil^-1``, symmetrized against rounding."""
    inner = chol.solve(K)
    out = chol.solve(inner.T).T
    return 0.5 * (out + out.T)


def _finite_conditioning(x_data, x_gen) -> ConditioningMatrices:
    codes_d = as_label_vector(x_data, "x_data")
    codes_s = as_label_vector(x_gen, "x_gen")
    classes_d = set(np.unique(codes_d).tolist())
    classes_s = set(np.unique(codes_s).tolist())
    if classes_d != classes_s:
        missing = sorted(classes_d ^ classes_s)
        raise ValueError(
            f"classes {missing} are observed on only one side; conditional undefined"
        )
    classes = np.array(sorted(classes_d), dtype=np.int64)
    W_d = _class_weight_matrix(codes_d, classes)
    W_s = _class_weight_matrix(codes_s, classes)
    return ConditioningMatrices(
        data=W_d.T @ W_d, gen=W_s.T @ W_s, cross=W_s.T @ W_d, reg_lambda=0.0, finite_mode=True
    )


def _class_weight_matrix(codes: np.ndarray, classes: np.ndarray) -> np.ndarray:
    """Rows are per-class uniform weights 1/N_c over that class's samples."""
    membership = (classes[:, None] == codes[None, :]).astype(np.float64)
    counts = membership.sum(axis=1, keepdims=True)
    return membership / counts
