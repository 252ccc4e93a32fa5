"""Input validation helpers shared by every estimator and metric."""

from __future__ import annotations

import numpy as np


def as_sample_matrix(data, name: str = "X") -> np.ndarray:
    """Coerce ``data`` to a 2-D float64 array of row samples.

    Scalars become a single 1-D sample, 1-D arrays are treated as a column
    of scalar samples. Rejects NaN/Inf and empty inputs.
    """
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    elif arr.ndim != 2:
        raise ValueError(f"{name} must be at most 2-dimensional, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValueError(f"{name} must contain at least one sample")
    check_finite(arr, name)
    return arr


def as_vector(data, name: str = "x") -> np.ndarray:
    """Coerce a single sample to a 1-D float64 vector."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a single vector, got shape {arr.shape}")
    check_finite(arr, name)
    return arr


def as_label_vector(data, name: str = "labels") -> np.ndarray:
    """Coerce ``data`` to a 1-D int64 vector of class codes.

    Accepts integer codes or rows of one-hot vectors, which are decoded to
    their hot index. Negative codes are rejected.
    """
    arr = np.asarray(data)
    if arr.ndim == 2:
        arr = decode_one_hot(arr, name)
    elif arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D codes or 2-D one-hot rows, got shape {arr.shape}")
    if arr.dtype.kind == "f":
        rounded = np.rint(arr)
        if not np.all(np.isfinite(arr)) or np.any(np.abs(arr - rounded) > 1e-9):
            raise ValueError(f"{name} contains non-integer label values")
        arr = rounded
    codes = arr.astype(np.int64)
    if codes.size and codes.min() < 0:
        raise ValueError(f"{name} contains negative label codes")
    return codes


def decode_one_hot(arr: np.ndarray, name: str = "labels") -> np.ndarray:
    """Decode one-hot rows to integer codes, checking each row is valid."""
    arr = np.asarray(arr, dtype=np.float64)
    row_sums = arr.sum(axis=1)
    is_binary = np.all((arr == 0.0) | (arr == 1.0))
    if not is_binary or not np.all(row_sums == 1.0):
        raise ValueError(f"{name} rows are not valid one-hot vectors")
    return arr.argmax(axis=1).astype(np.int64)


def one_hot(codes: np.ndarray, num_classes: int) -> np.ndarray:
    """Encode integer codes as float64 one-hot rows."""
    codes = np.asarray(codes, dtype=np.int64)
    if codes.size and (codes.min() < 0 or codes.max() >= num_classes):
        raise ValueError(f"label codes out of range [0, {num_classes})")
    out = np.zeros((codes.shape[0], num_classes), dtype=np.float64)
    out[np.arange(codes.shape[0]), codes] = 1.0
    return out


def check_finite(arr: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf entries")


def check_paired(x, y, x_name: str = "X", y_name: str = "y") -> None:
    if len(x) != len(y):
        raise ValueError(
            f"{x_name} and {y_name} must be aligned pairs, got {len(x)} vs {len(y)} samples"
        )


def check_same_dim(a: np.ndarray, b: np.ndarray, a_name: str = "a", b_name: str = "b") -> None:
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(
            f"{a_name} and {b_name} have mismatched dimensions "
            f"({a.shape[-1]} vs {b.shape[-1]})"
        )
