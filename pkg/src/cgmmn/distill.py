"""Distilling a Bayesian predictive distribution into a fast generator.

The teacher here is an exactly solvable conjugate Bayesian polynomial
regression: Gaussian prior over feature weights, Gaussian noise, closed-form
posterior and predictive moments. A student generator is trained on samples
drawn from the teacher's predictive distribution at (slightly perturbed)
training inputs, and both are compared by the RMSE of their predictive
means.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError

from .datasets import Domain, PairedDataset
from .estimator import CGMMN
from .linalg import NotPositiveDefiniteError, reg_cholesky
from .validation import as_sample_matrix, check_paired


class BayesianPolynomialRegression(BaseEstimator, RegressorMixin):
    """Conjugate Bayesian regression on per-dimension polynomial features.

    Features are a bias plus each input dimension raised to powers
    1..degree (no cross terms). With prior w ~ N(0, prior_var * I) and noise
    variance ``noise_var``, the posterior over weights is Gaussian in closed
    form and the predictive at x is N(phi(x) . mean, noise_var +
    phi(x) . cov . phi(x)), so the predictive variance never drops below the
    noise floor.
    """

    def __init__(self, degree: int = 1, prior_var: float = 1.0, noise_var: float = 1.0):
        self.degree = degree
        self.prior_var = prior_var
        self.noise_var = noise_var

    def fit(self, X, y) -> "BayesianPolynomialRegression":
        if self.degree < 1:
            raise ValueError(f"degree must be >= 1, got {self.degree}")
        if self.prior_var <= 0.0 or self.noise_var <= 0.0:
            raise ValueError("prior_var and noise_var must be positive")
        X = as_sample_matrix(X, "X")
        y = as_sample_matrix(y, "y")
        check_paired(X, y)
        if y.shape[1] != 1:
            raise ValueError("teacher regression expects a scalar target")
        phi = self._features(X)
        d = phi.shape[1]
        precision = np.eye(d) / self.prior_var + (phi.T @ phi) / self.noise_var
        try:
            chol = reg_cholesky(precision, 0.0)
        except NotPositiveDefiniteError as err:
            raise ValueError(f"singular design matrix: {err}") from None
        self.posterior_cov_ = chol.solve(np.eye(d))
        self.posterior_cov_ = 0.5 * (self.posterior_cov_ + self.posterior_cov_.T)
        self.posterior_mean_ = chol.solve(phi.T @ y[:, 0]) / self.noise_var
        return self

    def predict(self, X, return_std: bool = False):
        self._check_fitted()
        phi = self._features(as_sample_matrix(X, "X"))
        mean = phi @ self.posterior_mean_
        if not return_std:
            return mean
        var = self.noise_var + np.einsum("ij,jk,ik->i", phi, self.posterior_cov_, phi)
        return mean, np.sqrt(var)

    def sample_y(self, X, rng=None) -> np.ndarray:
        """One predictive draw per row of X (independent across rows)."""
        rng = np.random.default_rng(rng)
        mean, std = self.predict(X, return_std=True)
        return mean + std * rng.standard_normal(mean.shape)

    def _features(self, X: np.ndarray) -> np.ndarray:
        cols = [np.ones((X.shape[0], 1))]
        for p in range(1, self.degree + 1):
            cols.append(X**p)
        return np.hstack(cols)

    def _check_fitted(self) -> None:
        if not hasattr(self, "posterior_mean_"):
            raise NotFittedError("teacher is not fitted; call fit(X, y) first")


@dataclass(frozen=True)
class DistillationSet:
    """Teacher-sampled training pairs plus the perturbations that made them."""

    pairs: PairedDataset
    base_x: np.ndarray
    perturbations: np.ndarray
    perturb_scale: np.ndarray


def sample_teacher(
    teacher: BayesianPolynomialRegression,
    X,
    per_x: int,
    perturb_scale=None,
    rng=None,
) -> DistillationSet:
    """Draw ``per_x`` predictive samples near each input.

    Each input is repeated ``per_x`` times, perturbed by centered Gaussian
    noise of the given per-dimension scale (default 0.05 times the
    per-dimension standard deviation of X), and the teacher's predictive is
    sampled at the perturbed point. The perturbed inputs become the
    conditioning values of the returned pairs.
    """
    if per_x < 1:
        raise ValueError(f"per_x must be >= 1, got {per_x}")
    rng = np.random.default_rng(rng)
    X = as_sample_matrix(X, "X")
    if perturb_scale is None:
        scale = 0.05 * X.std(axis=0)
    else:
        scale = np.broadcast_to(np.asarray(perturb_scale, dtype=np.float64), (X.shape[1],)).copy()
    if np.any(scale < 0.0):
        raise ValueError("perturb_scale must be nonnegative")
    base = np.repeat(X, per_x, axis=0)
    perturbations = scale * rng.standard_normal(base.shape)
    x_tilde = base + perturbations
    y = teacher.sample_y(x_tilde, rng=rng).reshape(-1, 1)
    pairs = PairedDataset(
        x=x_tilde,
        y=y,
        x_domain=Domain("continuous", X.shape[1]),
        y_domain=Domain("continuous", 1),
        provenance=f"teacher-samples(per_x={per_x})",
    )
    return DistillationSet(pairs=pairs, base_x=base, perturbations=perturbations, perturb_scale=scale)


def distill(distill_set: DistillationSet, student: CGMMN) -> CGMMN:
    """Train the student generator on the teacher-sampled pairs."""
    return student.fit(distill_set.pairs.x, distill_set.pairs.y)


def evaluate_rmse(model, X_test, y_test, samples_per_x: int = 100, rng=None) -> float:
    """RMSE of a model's predictive mean against test targets.

    Works for the teacher (closed-form mean) and for a trained generator
    (mean of ``samples_per_x`` draws per input).
    """
    X_test = as_sample_matrix(X_test, "X_test")
    y_test = as_sample_matrix(y_test, "y_test")
    check_paired(X_test, y_test, "X_test", "y_test")
    mean = predictive_mean(model, X_test, samples_per_x, rng)
    return float(np.sqrt(np.mean((mean - y_test[:, 0]) ** 2)))


def predictive_mean(model, X, samples_per_x: int = 100, rng=None) -> np.ndarray:
    if isinstance(model, CGMMN):
        if samples_per_x < 1:
            raise ValueError(f"samples_per_x must be >= 1, got {samples_per_x}")
        return model.predict(X, n_samples=samples_per_x, rng=rng)[:, 0]
    return np.asarray(model.predict(X), dtype=np.float64)


def predictive_table(model, grid_x, samples_per_x: int = 200, rng=None) -> np.ndarray:
    """Rows of (x, predictive mean, predictive sd) over a 1-D input grid."""
    grid_x = as_sample_matrix(grid_x, "grid_x")
    if grid_x.shape[1] != 1:
        raise ValueError("predictive_table expects a 1-D input grid")
    if isinstance(model, CGMMN):
        rng = np.random.default_rng(rng)
        rows = []
        for x in grid_x:
            draws = model.sample(x, n_samples=samples_per_x, rng=rng)[:, 0]
            rows.append((float(x[0]), float(draws.mean()), float(draws.std())))
        return np.array(rows)
    mean, std = model.predict(grid_x, return_std=True)
    return np.column_stack([grid_x[:, 0], mean, std])
