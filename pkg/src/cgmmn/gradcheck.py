"""Finite-difference self-checks for the analytic CMMD gradients.

Two suites: the per-sample gradient of the conditional MMD with respect to
generated outputs, and the end-to-end weight gradient obtained by chaining
that through network backpropagation. Both compare against central finite
differences of the raw objective and report the worst deviation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conditional import cmmd2, cmmd2_sample_gradient
from .kernels import DeltaKernel, Kernel, LinearKernel, RBFKernel
from .network import GeneratorNet, init_net, sample_hidden_batch


@dataclass(frozen=True)
class GradCheckResult:
    name: str
    max_abs_err: float
    max_rel_err: float
    tolerance: float
    passed: bool


def _compare(name: str, analytic: np.ndarray, fd: np.ndarray, rtol: float) -> GradCheckResult:
    abs_err = np.abs(analytic - fd)
    rel_err = abs_err / np.maximum(np.abs(fd), 1e-8)
    passed = bool(np.allclose(analytic, fd, rtol=rtol, atol=1e-8))
    return GradCheckResult(
        name=name,
        max_abs_err=float(abs_err.max()),
        max_rel_err=float(rel_err[abs_err > 1e-8].max()) if np.any(abs_err > 1e-8) else 0.0,
        tolerance=rtol,
        passed=passed,
    )


def _fd_over(objective, values: np.ndarray, step: float = 1e-5) -> np.ndarray:
    grad = np.zeros_like(values)
    flat = values.ravel()
    g = grad.ravel()
    for i in range(flat.size):
        saved = flat[i]
        flat[i] = saved + step
        up = objective()
        flat[i] = saved - step
        down = objective()
        flat[i] = saved
        g[i] = (up - down) / (2.0 * step)
    return grad


def check_sample_gradients(seed: int = 0, rtol: float = 1e-5) -> list[GradCheckResult]:
    """Per-sample output gradients vs central finite differences."""
    rng = np.random.default_rng(seed)
    cases: list[tuple[str, Kernel, Kernel, bool | None]] = [
        ("rbf-x/rbf-y", RBFKernel(0.9), RBFKernel(1.3), None),
        ("rbf-x/linear-y", RBFKernel(0.9), LinearKernel(), None),
        ("delta-x-regularized/rbf-y", DeltaKernel(), RBFKernel(1.3), False),
        ("delta-x-finite/rbf-y", DeltaKernel(), RBFKernel(1.3), True),
    ]
    results = []
    for name, k_x, k_y, finite in cases:
        n, m = 6, 5
        if isinstance(k_x, DeltaKernel):
            x_d = rng.integers(0, 3, size=n)
            x_s = np.concatenate([np.arange(3), rng.integers(0, 3, size=m - 3)])
            x_d = np.concatenate([np.arange(3), x_d[3:]])
        else:
            x_d = rng.standard_normal((n, 2))
            x_s = rng.standard_normal((m, 2))
        y_d = rng.standard_normal((n, 2))
        y_s = rng.standard_normal((m, 2))
        lam = 0.2
        analytic = cmmd2_sample_gradient(
            k_x, k_y, x_d, y_d, x_s, y_s, reg_lambda=lam, finite_mode=finite
        )
        fd = _fd_over(
            lambda: cmmd2(k_x, k_y, x_d, y_d, x_s, y_s, reg_lambda=lam, finite_mode=finite).raw,
            y_s,
        )
        results.append(_compare(name, analytic, fd, rtol))
    return results


def cmmd_weight_gradient(
    net: GeneratorNet,
    kernel_x: Kernel,
    kernel_y: Kernel,
    x_data: np.ndarray,
    y_data: np.ndarray,
    x_net: np.ndarray,
    h: np.ndarray,
    reg_lambda: float,
) -> list[np.ndarray]:
    """Analytic gradient of the CMMD objective w.r.t. all net parameters."""
    y_gen = net.forward(x_net, h)
    grad_y = cmmd2_sample_gradient(
        kernel_x, kernel_y, x_data, y_data, x_data, y_gen, reg_lambda=reg_lambda
    )
    return net.backward(x_net, h, grad_y)


def check_weight_gradients(seed: int = 0, rtol: float = 1e-4) -> list[GradCheckResult]:
    """End-to-end weight gradients vs finite differences of the pipeline."""
    rng = np.random.default_rng(seed)
    results = []
    for name, output_activation in (("relu-net/identity-out", "identity"),
                                    ("relu-net/sigmoid-out", "sigmoid")):
        net = init_net(2, 2, (8, 6), 2, output_activation=output_activation, seed=seed)
        n = 6
        x = rng.standard_normal((n, 2))
        y = rng.standard_normal((n, 2))
        h = sample_hidden_batch(n, 2, rng)
        k_x, k_y = RBFKernel(1.1), RBFKernel(0.8)
        lam = 0.2
        analytic = cmmd_weight_gradient(net, k_x, k_y, x, y, x, h, lam)

        def objective():
            y_gen = net.forward(x, h)
            return cmmd2(k_x, k_y, x, y, x, y_gen, reg_lambda=lam).raw

        for i, param in enumerate(net.parameters()):
            fd = _fd_over(objective, param)
            results.append(_compare(f"{name}[param {i}]", analytic[i], fd, rtol))
    return results
