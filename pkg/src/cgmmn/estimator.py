"""The conditional generative moment-matching estimator.

``CGMMN`` trains a feedforward generator ``y = f(x, h | w)`` by minibatch
gradient descent on the squared conditional MMD between each data minibatch
and a batch generated at the same conditioning values. The conditioning-side
inverse factors depend only on x, so they are computed once per batch and
shared between the loss and its gradient. Gradients reach the weights by
chaining the analytic per-sample CMMD gradient through network backprop;
updates use AdaM.
"""

from __future__ import annotations

import time

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .conditional import cmmd2, cmmd2_sample_gradient, conditioning_matrices
from .kernels import DeltaKernel, Kernel, LinearKernel, RBFKernel, median_bandwidth_sq
from .linalg import default_reg_lambda
from .network import GeneratorNet, draw_hidden, init_net
from .optim import Adam
from .validation import as_label_vector, as_sample_matrix, as_vector, one_hot


class TrainingDivergedError(RuntimeError):
    """Loss became non-finite during training."""

    def __init__(self, epoch: int, batch: int, value: float):
        self.epoch = epoch
        self.batch = batch
        super().__init__(f"non-finite loss {value} at epoch {epoch}, batch {batch}")


class CGMMN(BaseEstimator):
    """Conditional generator trained by moment matching.

    Parameters
    ----------
    hidden_layers : tuple of int
        Hidden layer widths of the generator MLP.
    h_dim : int
        Dimension of the uniform stochastic input (concat mode). Small
        values suit prediction tasks, larger ones generation.
    activation, output_activation : str
        Hidden / output nonlinearity: "relu", "sigmoid", or "identity".
    input_mode : str
        "concat" appends the stochastic input to the condition; "additive"
        perturbs the condition with Gaussian noise of variance
        ``input_noise_var`` instead.
    kernel_x, kernel_y : Kernel, "auto", "rbf", "linear", or "delta"
        Kernels on the conditioning and output variables. "auto" (and
        "rbf") resolve an RBF bandwidth by the median pairwise squared
        distance of the first training batch, then freeze it; "auto" picks
        a delta kernel when X is a 1-D integer label vector. The output
        kernel must be differentiable (rbf or linear).
    reg_lambda : float, optional
        Ridge on the conditioning Gram matrix. ``None`` resolves
        ``0.1 * batch_size**-0.5`` scaled by the mean Gram diagonal on the
        first batch, then freezes it. Unused when conditioning on labels
        (the finite-domain estimate needs no ridge).
    batch_size, epochs : int
        Minibatch size (>= 2; the last partial batch of each epoch is
        dropped) and number of passes over the data.
    learning_rate, beta1, beta2, adam_eps : float
        AdaM settings.
    weight_decay : float
        Optional L2 coefficient added to weight-matrix gradients.
    condition_perturb_sd : float
        If positive, generated batches condition on Gaussian-perturbed
        copies of the minibatch x values (continuous conditions only).
    seed : int
        Drives initialization, shuffling, and stochastic inputs; fits are
        bit-reproducible given (seed, config, data).

    Attributes
    ----------
    net_ : GeneratorNet
        The trained generator.
    history_ : list of float
        Mean minibatch squared CMMD per epoch.
    kernel_x_, kernel_y_ : Kernel or None
        Kernels as resolved at fit time (None if epochs == 0).
    lambda_ : float or None
        Ridge as resolved at fit time.
    """

    def __init__(
        self,
        hidden_layers: tuple[int, ...] = (64, 64),
        h_dim: int = 20,
        activation: str = "relu",
        output_activation: str = "identity",
        input_mode: str = "concat",
        input_noise_var: float = 0.01,
        kernel_x: Kernel | str = "auto",
        kernel_y: Kernel | str = "auto",
        reg_lambda: float | None = None,
        batch_size: int = 200,
        epochs: int = 100,
        learning_rate: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        adam_eps: float = 1e-8,
        weight_decay: float = 0.0,
        condition_perturb_sd: float = 0.0,
        seed: int = 0,
    ):
        self.hidden_layers = hidden_layers
        self.h_dim = h_dim
        self.activation = activation
        self.output_activation = output_activation
        self.input_mode = input_mode
        self.input_noise_var = input_noise_var
        self.kernel_x = kernel_x
        self.kernel_y = kernel_y
        self.reg_lambda = reg_lambda
        self.batch_size = batch_size
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.adam_eps = adam_eps
        self.weight_decay = weight_decay
        self.condition_perturb_sd = condition_perturb_sd
        self.seed = seed

    # ------------------------------------------------------------------
    # fitting
    # ------------------------------------------------------------------

    def fit(self, X, y) -> "CGMMN":
        x_kernel_side, x_net_side = self._ingest_conditions(X)
        targets = as_sample_matrix(y, "y")
        if x_kernel_side.shape[0] != targets.shape[0]:
            raise ValueError(
                f"X and y are not paired: {x_kernel_side.shape[0]} vs {targets.shape[0]}"
            )
        n = targets.shape[0]
        if self.batch_size < 2:
            raise ValueError(f"batch_size must be >= 2, got {self.batch_size}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be nonnegative, got {self.epochs}")
        if self.epochs > 0 and n < self.batch_size:
            raise ValueError(f"need at least batch_size={self.batch_size} samples, got {n}")
        if self.condition_perturb_sd > 0.0 and self._x_finite:
            raise ValueError("condition_perturb_sd applies to continuous conditions only")

        net = init_net(
            x_dim=x_net_side.shape[1],
            h_dim=self._net_h_dim(x_net_side.shape[1]),
            hidden_layers=tuple(self.hidden_layers),
            out_dim=targets.shape[1],
            activation=self.activation,
            output_activation=self.output_activation,
            seed=self.seed,
            input_mode=self.input_mode,
        )
        net.num_condition_classes = self.num_classes_ if self._x_finite else 0
        net.input_noise_var = self.input_noise_var if self.input_mode == "additive" else 0.0
        self.net_ = net
        self.history_ = []
        self.kernel_x_ = None
        self.kernel_y_ = None
        self.lambda_ = None
        self._adam = Adam(
            [p.shape for p in net.parameters()],
            learning_rate=self.learning_rate,
            beta1=self.beta1,
            beta2=self.beta2,
            eps=self.adam_eps,
        )

        self.epoch_seconds_ = []
        rng = np.random.default_rng(self.seed)
        for epoch in range(self.epochs):
            tick = time.perf_counter()
            order = rng.permutation(n)
            losses = []
            for b_start in range(0, n - self.batch_size + 1, self.batch_size):
                idx = order[b_start : b_start + self.batch_size]
                loss = self._train_batch(
                    epoch,
                    b_start // self.batch_size,
                    x_kernel_side[idx],
                    x_net_side[idx],
                    targets[idx],
                    rng,
                )
                losses.append(loss)
            self.history_.append(float(np.mean(losses)))
            self.epoch_seconds_.append(time.perf_counter() - tick)
        return self

    def _train_batch(self, epoch, batch_no, xb_kernel, xb_net, yb, rng) -> float:
        if self.kernel_x_ is None:
            self._resolve_kernels(xb_kernel, yb)
        net = self.net_
        h = self._draw_hidden(xb_net.shape[0], rng)
        if self.condition_perturb_sd > 0.0:
            x_gen = xb_kernel + self.condition_perturb_sd * rng.standard_normal(xb_kernel.shape)
            x_gen_net = x_gen
        else:
            x_gen = xb_kernel
            x_gen_net = xb_net
        y_gen = net.forward(x_gen_net, h)
        matrices = conditioning_matrices(self.kernel_x_, xb_kernel, x_gen, self.lambda_)
        estimate = cmmd2(
            self.kernel_x_, self.kernel_y_, xb_kernel, yb, x_gen, y_gen, matrices=matrices
        )
        if not np.isfinite(estimate.raw):
            raise TrainingDivergedError(epoch, batch_no, estimate.raw)
        grad_y = cmmd2_sample_gradient(
            self.kernel_x_, self.kernel_y_, xb_kernel, yb, x_gen, y_gen, matrices=matrices
        )
        grads = net.backward(x_gen_net, h, grad_y)
        if self.weight_decay > 0.0:
            for i, layer in enumerate(net.layers):
                grads[2 * i] = grads[2 * i] + self.weight_decay * layer.weights
        net.set_parameters(self._adam.step(net.parameters(), grads))
        return estimate.value

    # ------------------------------------------------------------------
    # sampling and prediction
    # ------------------------------------------------------------------

    def sample(self, x, n_samples: int = 1, rng=None) -> np.ndarray:
        """Draw ``n_samples`` outputs conditioned on a single x.

        Each draw uses a fresh stochastic input; with ``h_dim == 0`` the
        generator is deterministic and all rows coincide. Returns an array
        of shape (n_samples, output_dim).
        """
        net = self._fitted_net()
        rng = np.random.default_rng(rng)
        x_net = self._condition_to_net(x)
        if n_samples == 0:
            return np.empty((0, net.output_dim))
        tiled = np.repeat(x_net.reshape(1, -1), n_samples, axis=0)
        h = self._draw_hidden(n_samples, rng)
        return np.atleast_2d(net.forward(tiled, h))

    def sample_batch(self, X, rng=None) -> np.ndarray:
        """One generated output per row of X."""
        net = self._fitted_net()
        rng = np.random.default_rng(rng)
        x_net = self._conditions_to_net(X)
        h = self._draw_hidden(x_net.shape[0], rng)
        return np.atleast_2d(net.forward(x_net, h))

    def predict(self, X, n_samples: int = 100, rng=None) -> np.ndarray:
        """Predictive mean: average of ``n_samples`` draws per condition."""
        net = self._fitted_net()
        rng = np.random.default_rng(rng)
        x_net = self._conditions_to_net(X)
        m = x_net.shape[0]
        tiled = np.repeat(x_net, n_samples, axis=0)
        h = self._draw_hidden(m * n_samples, rng)
        out = net.forward(tiled, h)
        return out.reshape(m, n_samples, net.output_dim).mean(axis=1)

    def predict_class(self, X, rng=None) -> np.ndarray:
        """Argmax prediction: draw one output per condition, take the index
        of its maximum element as the class."""
        return self.sample_batch(X, rng=rng).argmax(axis=1)

    def latent_traverse(self, x, dim: int, values) -> np.ndarray:
        """Outputs along one latent axis: h = value * e_dim, other axes 0."""
        net = self._fitted_net()
        values = np.asarray(values, dtype=np.float64)
        if values.size == 0:
            return np.empty((0, net.output_dim))
        if not (0 <= dim < net.h_dim):
            raise ValueError(f"latent dim {dim} out of range [0, {net.h_dim})")
        if values.min() < 0.0 or values.max() > 1.0:
            raise ValueError("traverse values must lie in [0, 1]")
        x_net = self._condition_to_net(x)
        tiled = np.repeat(x_net.reshape(1, -1), values.size, axis=0)
        h = np.zeros((values.size, net.h_dim))
        h[:, dim] = values
        return np.atleast_2d(net.forward(tiled, h))

    # ------------------------------------------------------------------
    # internals
    # ------------------------------------------------------------------

    @classmethod
    def from_net(cls, net: GeneratorNet) -> "CGMMN":
        """Wrap a previously trained (e.g. loaded) generator for sampling."""
        est = cls(input_mode=net.input_mode, h_dim=net.h_dim)
        est.net_ = net
        est._x_finite = net.num_condition_classes > 0
        if est._x_finite:
            est.num_classes_ = net.num_condition_classes
        est.history_ = []
        est.kernel_x_ = None
        est.kernel_y_ = None
        est.lambda_ = None
        return est

    def _ingest_conditions(self, X) -> tuple[np.ndarray, np.ndarray]:
        """Split the conditioning data into kernel-side and network-side
        representations (labels stay integer codes for the kernel but feed
        the network as one-hot rows)."""
        self._x_finite = self._wants_delta(X)
        if self._x_finite:
            codes = as_label_vector(X, "X")
            self.num_classes_ = int(codes.max()) + 1
            return codes, one_hot(codes, self.num_classes_)
        mat = as_sample_matrix(X, "X")
        return mat, mat

    def _wants_delta(self, X) -> bool:
        if isinstance(self.kernel_x, DeltaKernel):
            return True
        if self.kernel_x == "delta":
            return True
        if self.kernel_x == "auto":
            arr = np.asarray(X)
            return arr.ndim == 1 and arr.dtype.kind in "iu"
        return False

    def _resolve_kernels(self, xb_kernel, yb) -> None:
        self.kernel_x_ = self._resolve_kernel(self.kernel_x, xb_kernel, finite=self._x_finite)
        self.kernel_y_ = self._resolve_kernel(self.kernel_y, yb, finite=False)
        if isinstance(self.kernel_y_, DeltaKernel):
            raise ValueError("kernel_y must be differentiable (rbf or linear)")
        if self._x_finite:
            self.lambda_ = 0.0
        elif self.reg_lambda is not None:
            if self.reg_lambda < 0.0:
                raise ValueError(f"reg_lambda must be nonnegative, got {self.reg_lambda}")
            self.lambda_ = float(self.reg_lambda)
        else:
            self.lambda_ = default_reg_lambda(self.kernel_x_.gram(xb_kernel))

    @staticmethod
    def _resolve_kernel(spec, batch, finite: bool) -> Kernel:
        if isinstance(spec, (RBFKernel, LinearKernel, DeltaKernel)):
            return spec
        if spec == "delta":
            return DeltaKernel()
        if spec == "linear":
            return LinearKernel()
        if spec in ("auto", "rbf", "median"):
            if finite:
                return DeltaKernel()
            return RBFKernel(bandwidth_sq=median_bandwidth_sq(batch))
        raise ValueError(f"unknown kernel spec {spec!r}")

    def _net_h_dim(self, x_dim: int) -> int:
        if self.input_mode == "additive":
            return x_dim
        if self.h_dim < 0:
            raise ValueError(f"h_dim must be nonnegative, got {self.h_dim}")
        return self.h_dim

    def _draw_hidden(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return draw_hidden(self.net_, n, rng)

    def _condition_to_net(self, x) -> np.ndarray:
        if self._x_finite:
            code = int(as_label_vector(np.atleast_1d(x), "x")[0])
            if not (0 <= code < self.num_classes_):
                raise ValueError(f"label {code} out of range [0, {self.num_classes_})")
            return one_hot(np.array([code]), self.num_classes_)[0]
        return as_vector(x, "x")

    def _conditions_to_net(self, X) -> np.ndarray:
        if self._x_finite:
            codes = as_label_vector(X, "X")
            if codes.size and codes.max() >= self.num_classes_:
                raise ValueError(f"label {codes.max()} out of range [0, {self.num_classes_})")
            return one_hot(codes, self.num_classes_)
        return as_sample_matrix(X, "X")

    def _fitted_net(self) -> GeneratorNet:
        if not hasattr(self, "net_"):
            raise NotFittedError("CGMMN is not fitted; call fit(X, y) first")
        return self.net_
