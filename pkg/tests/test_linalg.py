import numpy as np
import pytest

from cgmmn.kernels import RBFKernel
from cgmmn.linalg import NotPositiveDefiniteError, default_reg_lambda, reg_cholesky

from oracles import gauss_jordan_inverse


def test_identity_plus_ridge_halves_vectors():
    chol = reg_cholesky(np.eye(2), 1.0)
    v = np.array([3.0, -4.0])
    np.testing.assert_allclose(chol.solve(v), v / 2.0, rtol=1e-14)


def test_diagonal_no_ridge():
    chol = reg_cholesky(2.0 * np.eye(2), 0.0)
    v = np.array([1.0, 5.0])
    np.testing.assert_allclose(chol.solve(v), 0.5 * v, rtol=1e-14)


def test_solve_matches_gauss_jordan_oracle():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((5, 5))
    K = A @ A.T
    lam = 0.1
    chol = reg_cholesky(K, lam)
    inv = gauss_jordan_inverse(K + lam * np.eye(5))
    B = rng.standard_normal((5, 3))
    np.testing.assert_allclose(chol.solve(B), inv @ B, rtol=1e-8, atol=1e-12)


def test_reconstruct_matches_input():
    rng = np.random.default_rng(1)
    for _ in range(10):
        n = rng.integers(2, 8)
        X = rng.standard_normal((n, 3))
        K = RBFKernel(1.0).gram(X)
        lam = 0.05
        chol = reg_cholesky(K, lam)
        target = K + lam * np.eye(n)
        err = np.linalg.norm(chol.reconstruct() - target) / np.linalg.norm(target)
        assert err <= 1e-10


def test_solve_then_multiply_recovers_rhs():
    rng = np.random.default_rng(2)
    for _ in range(10):
        n = rng.integers(2, 10)
        X = rng.standard_normal((n, 2))
        K = RBFKernel(0.8).gram(X)
        lam = 0.1
        chol = reg_cholesky(K, lam)
        B = rng.standard_normal((n, 4))
        residual = (K + lam * np.eye(n)) @ chol.solve(B) - B
        assert np.linalg.norm(residual) / np.linalg.norm(B) <= 1e-8


def test_non_pd_error_names_smallest_pivot():
    K = np.array([[1.0, 2.0], [2.0, 1.0]])  # eigenvalues 3 and -1
    with pytest.raises(NotPositiveDefiniteError, match="pivot") as err:
        reg_cholesky(K, 0.0)
    assert err.value.smallest_pivot == pytest.approx(-3.0)  # 1 - 2^2/1


def test_regularization_can_rescue():
    K = np.array([[1.0, 2.0], [2.0, 1.0]])
    chol = reg_cholesky(K, 1.5)  # eigenvalues become 4.5 and 0.5
    v = np.array([1.0, 1.0])
    np.testing.assert_allclose((K + 1.5 * np.eye(2)) @ chol.solve(v), v, rtol=1e-12)


def test_rejects_bad_inputs():
    with pytest.raises(ValueError, match="square"):
        reg_cholesky(np.ones((2, 3)), 0.0)
    with pytest.raises(ValueError, match="symmetric"):
        reg_cholesky(np.array([[1.0, 0.5], [0.0, 1.0]]), 0.0)
    with pytest.raises(ValueError, match="nonnegative"):
        reg_cholesky(np.eye(2), -0.1)


def test_default_reg_lambda_rule():
    # 0.1 * N^-1/2 * mean diagonal
    K = 4.0 * np.eye(9)
    assert default_reg_lambda(K) == pytest.approx(0.1 * (1.0 / 3.0) * 4.0)
    G = RBFKernel(1.0).gram(np.random.default_rng(3).standard_normal((16, 2)))
    assert default_reg_lambda(G) == pytest.approx(0.1 / 4.0)
