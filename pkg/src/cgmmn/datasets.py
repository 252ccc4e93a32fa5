"""Paired datasets: synthetic generators and CSV/IDX file ingestion.

A paired dataset aligns conditioning values x with outputs y. Each side is
either continuous (stored as a float matrix, one row per sample) or finite
(stored as integer class codes; one-hot encoding happens at the kernel and
network boundary, never in storage). Datasets are immutable after
construction and validated to be finite.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass

import numpy as np

from .validation import as_label_vector, as_sample_matrix


class FileFormatError(ValueError):
    """A data file failed to parse; message pinpoints where."""


@dataclass(frozen=True)
class Domain:
    kind: str  # "continuous" | "finite"
    size: int  # dimension, or number of classes

    def __post_init__(self):
        if self.kind not in ("continuous", "finite"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.size <= 0:
            raise ValueError(f"domain size must be positive, got {self.size}")


@dataclass(frozen=True)
class PairedDataset:
    x: np.ndarray
    y: np.ndarray
    x_domain: Domain
    y_domain: Domain
    provenance: str = ""

    def __post_init__(self):
        x = _coerce_side(self.x, self.x_domain, "x")
        y = _coerce_side(self.y, self.y_domain, "y")
        if x.shape[0] != y.shape[0]:
            raise ValueError(f"x and y are not paired: {x.shape[0]} vs {y.shape[0]} samples")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.x.shape[0]


def _coerce_side(arr, domain: Domain, name: str) -> np.ndarray:
    if domain.kind == "finite":
        codes = as_label_vector(arr, name)
        if codes.size and codes.max() >= domain.size:
            raise ValueError(f"{name} label {codes.max()} out of range [0, {domain.size})")
        return codes
    mat = as_sample_matrix(arr, name)
    if mat.shape[1] != domain.size:
        raise ValueError(f"{name} has dimension {mat.shape[1]}, domain says {domain.size}")
    return mat


def gen_conditional_gaussian(
    n: int, slope: float = 2.0, noise_sd: float = 0.5, seed: int = 0
) -> PairedDataset:
    """1-D regression data: x ~ U[-1, 1], y ~ N(slope * x, noise_sd**2)."""
    if n <= 0:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, size=(n, 1))
    y = slope * x + noise_sd * rng.standard_normal((n, 1))
    return PairedDataset(
        x=x,
        y=y,
        x_domain=Domain("continuous", 1),
        y_domain=Domain("continuous", 1),
        provenance=f"conditional-gaussian(n={n}, slope={slope}, noise_sd={noise_sd}, seed={seed})",
    )


def gen_cubic_toy(seed: int = 0, n: int = 20) -> PairedDataset:
    """Noisy cubic: 20 inputs uniform on [-4, 4], y = x**3 + N(0, 9) noise."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(-4.0, 4.0, size=(n, 1))
    y = x**3 + 3.0 * rng.standard_normal((n, 1))
    return PairedDataset(
        x=x,
        y=y,
        x_domain=Domain("continuous", 1),
        y_domain=Domain("continuous", 1),
        provenance=f"cubic-toy(n={n}, seed={seed})",
    )


def gen_label_conditional_mixture(
    n: int, num_classes: int = 4, seed: int = 0, radius: float = 4.0, spread: float = 0.5
) -> PairedDataset:
    """Labels uniform over classes; y is 2-D Gaussian at a class center.

    Class centers sit evenly on a circle of the given radius so that any
    two centers are well separated relative to the within-class spread.
    """
    if n <= 0 or num_classes <= 0:
        raise ValueError("n and num_classes must be positive")
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, num_classes, size=n)
    centers = class_centers(num_classes, radius)
    y = centers[labels] + spread * rng.standard_normal((n, 2))
    return PairedDataset(
        x=labels,
        y=y,
        x_domain=Domain("finite", num_classes),
        y_domain=Domain("continuous", 2),
        provenance=f"label-mixture(n={n}, num_classes={num_classes}, seed={seed})",
    )


def class_centers(num_classes: int, radius: float = 4.0) -> np.ndarray:
    angles = 2.0 * np.pi * np.arange(num_classes) / num_classes
    return radius * np.column_stack([np.cos(angles), np.sin(angles)])


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def save_csv(ds: PairedDataset, path) -> None:
    """Write a paired dataset with a header row; finite sides use one
    ``label``/``label_y`` column of integer codes."""
    x_cols = _side_columns(ds.x_domain, "x", "label")
    y_cols = _side_columns(ds.y_domain, "y", "label_y")
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(x_cols + y_cols)
        for i in range(len(ds)):
            writer.writerow(_side_cells(ds.x, ds.x_domain, i) + _side_cells(ds.y, ds.y_domain, i))


def _side_columns(domain: Domain, prefix: str, label_name: str) -> list[str]:
    if domain.kind == "finite":
        return [label_name]
    return [f"{prefix}{j}" for j in range(domain.size)]


def _side_cells(arr: np.ndarray, domain: Domain, i: int) -> list[str]:
    if domain.kind == "finite":
        return [str(int(arr[i]))]
    return [repr(float(v)) for v in arr[i]]


def load_csv(
    path,
    x_cols: list[str],
    y_cols: list[str],
    label_mode: str = "none",
) -> PairedDataset:
    """Read a paired dataset from a CSV file with a header row.

    ``x_cols``/``y_cols`` name the columns for each side. ``label_mode``
    marks which side holds a single integer class column: "none", "x", or
    "y". Cell parse failures report the offending row and column.
    """
    if label_mode not in ("none", "x", "y"):
        raise ValueError(f"label_mode must be none, x, or y, got {label_mode!r}")
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise FileFormatError(f"{path}: empty file, expected a header row") from None
        header = [h.strip() for h in header]
        for col in list(x_cols) + list(y_cols):
            if col not in header:
                raise FileFormatError(f"{path}: column {col!r} not in header {header}")
        x_idx = [header.index(c) for c in x_cols]
        y_idx = [header.index(c) for c in y_cols]
        x_rows: list[list[float]] = []
        y_rows: list[list[float]] = []
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            x_rows.append(_parse_cells(path, row, x_idx, header, row_no))
            y_rows.append(_parse_cells(path, row, y_idx, header, row_no))
    if not x_rows:
        raise FileFormatError(f"{path}: no data rows")
    return _assemble_csv_dataset(path, np.array(x_rows), np.array(y_rows), label_mode)


def _parse_cells(path, row, idx, header, row_no) -> list[float]:
    out = []
    for j in idx:
        try:
            out.append(float(row[j]))
        except (ValueError, IndexError):
            cell = row[j] if j < len(row) else "<missing>"
            raise FileFormatError(
                f"{path}: row {row_no}, column {header[j]!r}: non-numeric cell {cell!r}"
            ) from None
    return out


def _assemble_csv_dataset(path, x: np.ndarray, y: np.ndarray, label_mode: str) -> PairedDataset:
    if label_mode == "x":
        codes = as_label_vector(x[:, 0], "x labels")
        x_domain = Domain("finite", int(codes.max()) + 1)
        x_data: np.ndarray = codes
    else:
        x_domain = Domain("continuous", x.shape[1])
        x_data = x
    if label_mode == "y":
        codes = as_label_vector(y[:, 0], "y labels")
        y_domain = Domain("finite", int(codes.max()) + 1)
        y_data: np.ndarray = codes
    else:
        y_domain = Domain("continuous", y.shape[1])
        y_data = y
    return PairedDataset(
        x=x_data, y=y_data, x_domain=x_domain, y_domain=y_domain, provenance=f"csv({path})"
    )


def load_sample_csv(path) -> np.ndarray:
    """Read every column of a headered CSV as one continuous sample matrix."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise FileFormatError(f"{path}: empty file, expected a header row") from None
        rows = []
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            rows.append(_parse_cells(path, row, list(range(len(header))), header, row_no))
    if not rows:
        raise FileFormatError(f"{path}: no data rows")
    return np.array(rows)


# ---------------------------------------------------------------------------
# IDX (big-endian image/label files)
# ---------------------------------------------------------------------------

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801


def load_idx_subset(
    images_path,
    labels_path,
    max_n: int | None = None,
    downscale: bool = False,
) -> PairedDataset:
    """Load the first ``max_n`` records of an IDX image/label file pair.

    Pixels are scaled to [0, 1]; ``downscale`` applies a 2x2 mean pool
    (dimensions must be even). Labels become the finite y side.
    """
    images = _read_idx_images(images_path, max_n)
    labels = _read_idx_labels(labels_path, max_n)
    if images.shape[0] != labels.shape[0]:
        raise FileFormatError(
            f"image/label record counts differ: {images.shape[0]} vs {labels.shape[0]}"
        )
    if downscale:
        n, r, c = images.shape
        if r % 2 or c % 2:
            raise ValueError(f"cannot 2x mean-pool odd image size {r}x{c}")
        images = images.reshape(n, r // 2, 2, c // 2, 2).mean(axis=(2, 4))
    n, r, c = images.shape
    num_classes = int(labels.max()) + 1 if labels.size else 1
    return PairedDataset(
        x=images.reshape(n, r * c),
        y=labels,
        x_domain=Domain("continuous", r * c),
        y_domain=Domain("finite", num_classes),
        provenance=f"idx({images_path}, {labels_path})",
    )


def _read_be32(f, path, what: str) -> int:
    data = f.read(4)
    if len(data) != 4:
        raise FileFormatError(f"{path}: truncated {what} at byte offset {f.tell() - len(data)}")
    return struct.unpack(">i", data)[0]


def _read_idx_images(path, max_n: int | None) -> np.ndarray:
    with open(path, "rb") as f:
        magic = _read_be32(f, path, "magic number")
        if magic != IDX_IMAGE_MAGIC:
            raise FileFormatError(
                f"{path}: bad image magic 0x{magic:08x} at byte offset 0, "
                f"expected 0x{IDX_IMAGE_MAGIC:08x}"
            )
        count = _read_be32(f, path, "record count")
        rows = _read_be32(f, path, "row count")
        cols = _read_be32(f, path, "column count")
        take = count if max_n is None else min(count, max_n)
        raw = f.read(take * rows * cols)
        if len(raw) != take * rows * cols:
            raise FileFormatError(f"{path}: truncated pixel data at byte offset {16 + len(raw)}")
    pixels = np.frombuffer(raw, dtype=np.uint8).reshape(take, rows, cols)
    return pixels.astype(np.float64) / 255.0


def _read_idx_labels(path, max_n: int | None) -> np.ndarray:
    with open(path, "rb") as f:
        magic = _read_be32(f, path, "magic number")
        if magic != IDX_LABEL_MAGIC:
            raise FileFormatError(
                f"{path}: bad label magic 0x{magic:08x} at byte offset 0, "
                f"expected 0x{IDX_LABEL_MAGIC:08x}"
            )
        count = _read_be32(f, path, "record count")
        take = count if max_n is None else min(count, max_n)
        raw = f.read(take)
        if len(raw) != take:
            raise FileFormatError(f"{path}: truncated label data at byte offset {8 + len(raw)}")
    return np.frombuffer(raw, dtype=np.uint8).astype(np.int64)


def save_idx_images(images: np.ndarray, path) -> None:
    """Write uint8 images (n, rows, cols) in IDX format; test/tooling helper."""
    images = np.asarray(images, dtype=np.uint8)
    n, r, c = images.shape
    with open(path, "wb") as f:
        f.write(struct.pack(">iiii", IDX_IMAGE_MAGIC, n, r, c))
        f.write(images.tobytes())


def save_idx_labels(labels: np.ndarray, path) -> None:
    labels = np.asarray(labels, dtype=np.uint8)
    with open(path, "wb") as f:
        f.write(struct.pack(">ii", IDX_LABEL_MAGIC, labels.shape[0]))
        f.write(labels.tobytes())
