"""AdaM optimizer over lists of parameter arrays."""

from __future__ import annotations

import numpy as np


class Adam:
    """Bias-corrected first/second moment gradient updates.

    Holds one pair of moment accumulators per parameter array, shapes
    mirroring the parameters. ``step`` returns the updated parameter list;
    the moments and step counter advance in place.
    """

    def __init__(
        self,
        shapes: list[tuple[int, ...]],
        learning_rate: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        if learning_rate <= 0.0:
            raise ValueError(f"learning_rate must be positive, got {learning_rate}")
        if not (0.0 <= beta1 < 1.0 and 0.0 <= beta2 < 1.0):
            raise ValueError("beta1 and beta2 must lie in [0, 1)")
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]
        self.t = 0

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> list[np.ndarray]:
        if len(params) != len(self.m) or len(grads) != len(self.m):
            raise ValueError("parameter/gradient lists do not match optimizer state")
        self.t += 1
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        out: list[np.ndarray] = []
        for i, (p, g) in enumerate(zip(params, grads)):
            if p.shape != self.m[i].shape or g.shape != self.m[i].shape:
                raise ValueError(f"shape mismatch at parameter {i}")
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g**2
            m_hat = self.m[i] / bc1
            v_hat = self.v[i] / bc2
            out.append(p - self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps))
        return out
