"""Feedforward generator network ``y = f(x, h | w)`` with manual backprop.

The network maps a conditioning value x plus a stochastic input h to an
output sample. By default x and h are concatenated into one input vector;
an additive mode instead perturbs x with Gaussian noise of the same
dimension. Forward and backward are pure with respect to the stored
weights; only the training loop mutates them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

ACTIVATIONS = ("relu", "sigmoid", "identity")

MODEL_FORMAT = "cgmmn-model"
MODEL_FORMAT_VERSION = 1


def _apply(name: str, z: np.ndarray) -> np.ndarray:
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "sigmoid":
        return 1.0 / (1.0 + np.exp(-z))
    return z


def _derivative(name: str, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    # Subgradient convention: relu'(0) = 0.
    if name == "relu":
        return (z > 0.0).astype(np.float64)
    if name == "sigmoid":
        return a * (1.0 - a)
    return np.ones_like(z)


@dataclass
class Layer:
    weights: np.ndarray  # (out, in)
    bias: np.ndarray  # (out,)
    activation: str


@dataclass
class GeneratorNet:
    layers: list[Layer]
    x_dim: int
    h_dim: int
    input_mode: str = "concat"
    seed: int = 0
    # Conditions are one-hot labels when > 0 (x_dim == number of classes).
    num_condition_classes: int = 0
    # Variance of the Gaussian stochastic input in additive mode.
    input_noise_var: float = 0.0

    @property
    def output_dim(self) -> int:
        return self.layers[-1].weights.shape[0]

    @property
    def input_dim(self) -> int:
        return self.layers[0].weights.shape[1]

    def num_params(self) -> int:
        return sum(l.weights.size + l.bias.size for l in self.layers)

    def parameters(self) -> list[np.ndarray]:
        """Flat list [W0, b0, W1, b1, ...] referencing the live arrays."""
        out: list[np.ndarray] = []
        for layer in self.layers:
            out.append(layer.weights)
            out.append(layer.bias)
        return out

    def set_parameters(self, params: list[np.ndarray]) -> None:
        if len(params) != 2 * len(self.layers):
            raise ValueError("parameter list does not match layer structure")
        for i, layer in enumerate(self.layers):
            layer.weights = params[2 * i]
            layer.bias = params[2 * i + 1]

    def combine_inputs(self, x, h) -> np.ndarray:
        """Merge condition and stochastic input per ``input_mode``; batched."""
        x2d = np.atleast_2d(np.asarray(x, dtype=np.float64))
        h2d = np.atleast_2d(np.asarray(h, dtype=np.float64))
        if x2d.shape[1] != self.x_dim:
            raise ValueError(f"x has dimension {x2d.shape[1]}, expected {self.x_dim}")
        if self.input_mode == "concat":
            if h2d.shape[1] != self.h_dim:
                raise ValueError(f"h has dimension {h2d.shape[1]}, expected {self.h_dim}")
            if self.h_dim == 0:
                return x2d
            if x2d.shape[0] != h2d.shape[0]:
                raise ValueError("x and h batches differ in length")
            return np.hstack([x2d, h2d])
        if h2d.shape[1] != self.x_dim or x2d.shape[0] != h2d.shape[0]:
            raise ValueError("additive mode needs h with the same shape as x")
        return x2d + h2d

    def forward(self, x, h) -> np.ndarray:
        """Deterministic output for (x, h); accepts single vectors or batches."""
        single = np.asarray(x).ndim <= 1
        a = self.combine_inputs(x, h)
        for layer in self.layers:
            a = _apply(layer.activation, a @ layer.weights.T + layer.bias)
        return a[0] if single else a

    def backward(self, x, h, out_grad) -> list[np.ndarray]:
        """Gradients of ``sum_batch out_grad . y`` w.r.t. all weights/biases.

        ``out_grad`` has one row per batch sample (or a single vector);
        returns arrays aligned with :meth:`parameters`.
        """
        inputs = self.combine_inputs(x, h)
        g = np.atleast_2d(np.asarray(out_grad, dtype=np.float64))
        if g.shape != (inputs.shape[0], self.output_dim):
            raise ValueError(
                f"out_grad shape {g.shape} does not match batch "
                f"({inputs.shape[0]}, {self.output_dim})"
            )
        pre: list[np.ndarray] = []
        act: list[np.ndarray] = [inputs]
        a = inputs
        for layer in self.layers:
            z = a @ layer.weights.T + layer.bias
            a = _apply(layer.activation, z)
            pre.append(z)
            act.append(a)
        grads: list[np.ndarray] = [np.empty(0)] * (2 * len(self.layers))
        delta = g * _derivative(self.layers[-1].activation, pre[-1], act[-1])
        for l in range(len(self.layers) - 1, -1, -1):
            grads[2 * l] = delta.T @ act[l]
            grads[2 * l + 1] = delta.sum(axis=0)
            if l > 0:
                delta = (delta @ self.layers[l].weights) * _derivative(
                    self.layers[l - 1].activation, pre[l - 1], act[l - 1]
                )
        return grads


def init_net(
    x_dim: int,
    h_dim: int,
    hidden_layers: tuple[int, ...],
    out_dim: int,
    activation: str = "relu",
    output_activation: str = "identity",
    seed: int = 0,
    input_mode: str = "concat",
) -> GeneratorNet:
    """Seeded weight initialization: N(0, 2/fan_in) for relu layers,
    N(0, 1/fan_in) otherwise, zero biases."""
    if input_mode not in ("concat", "additive"):
        raise ValueError(f"unknown input_mode {input_mode!r}")
    for name in (activation, output_activation):
        if name not in ACTIVATIONS:
            raise ValueError(f"unknown activation {name!r}")
    if x_dim <= 0 or h_dim < 0 or out_dim <= 0:
        raise ValueError("x_dim and out_dim must be positive, h_dim nonnegative")
    widths = list(hidden_layers) + [out_dim]
    if any(w <= 0 for w in widths):
        raise ValueError(f"layer widths must be positive, got {hidden_layers}")
    in_dim = x_dim + h_dim if input_mode == "concat" else x_dim
    if in_dim <= 0:
        raise ValueError("network input width is zero")
    rng = np.random.default_rng(seed)
    layers: list[Layer] = []
    fan_in = in_dim
    acts = [activation] * len(hidden_layers) + [output_activation]
    for width, act in zip(widths, acts):
        std = np.sqrt(2.0 / fan_in) if act == "relu" else np.sqrt(1.0 / fan_in)
        layers.append(
            Layer(
                weights=rng.normal(0.0, std, size=(width, fan_in)),
                bias=np.zeros(width),
                activation=act,
            )
        )
        fan_in = width
    return GeneratorNet(layers=layers, x_dim=x_dim, h_dim=h_dim, input_mode=input_mode, seed=seed)


def sample_hidden(h_dim: int, rng: np.random.Generator) -> np.ndarray:
    """One stochastic input: i.i.d. uniform [0, 1] components."""
    if h_dim < 0:
        raise ValueError("h_dim must be nonnegative")
    return rng.uniform(0.0, 1.0, size=h_dim)


def sample_hidden_batch(n: int, h_dim: int, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(0.0, 1.0, size=(n, h_dim))


def draw_hidden(net: GeneratorNet, n: int, rng: np.random.Generator) -> np.ndarray:
    """Stochastic inputs matching the network's input mode."""
    if net.input_mode == "additive":
        return np.sqrt(net.input_noise_var) * rng.standard_normal((n, net.x_dim))
    return sample_hidden_batch(n, net.h_dim, rng)


def save_net(net: GeneratorNet, path) -> None:
    """Write the network to a versioned JSON document.

    Floats are serialized via shortest round-trip repr, so load/save is
    bit-exact in value.
    """
    doc = {
        "format": MODEL_FORMAT,
        "format_version": MODEL_FORMAT_VERSION,
        "x_dim": net.x_dim,
        "h_dim": net.h_dim,
        "input_mode": net.input_mode,
        "seed": net.seed,
        "num_condition_classes": net.num_condition_classes,
        "input_noise_var": net.input_noise_var,
        "layers": [
            {
                "activation": l.activation,
                "out_width": l.weights.shape[0],
                "in_width": l.weights.shape[1],
                "weights": l.weights.ravel().tolist(),  # row-major
                "bias": l.bias.tolist(),
            }
            for l in net.layers
        ],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f)
        f.write("\n")


def load_net(path) -> GeneratorNet:
    with open(path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"{path}: not a {MODEL_FORMAT} file")
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported format_version {doc.get('format_version')}")
    layers = [
        Layer(
            weights=np.array(spec["weights"], dtype=np.float64).reshape(
                spec["out_width"], spec["in_width"]
            ),
            bias=np.array(spec["bias"], dtype=np.float64),
            activation=spec["activation"],
        )
        for spec in doc["layers"]
    ]
    return GeneratorNet(
        layers=layers,
        x_dim=doc["x_dim"],
        h_dim=doc["h_dim"],
        input_mode=doc["input_mode"],
        seed=doc.get("seed", 0),
        num_condition_classes=doc.get("num_condition_classes", 0),
        input_noise_var=doc.get("input_noise_var", 0.0),
    )
