"""Command-line front end: data generation, estimation, training, sampling.

Every command honors ``--seed`` and produces deterministic data outputs for
identical seed and configuration. Reports are JSON documents carrying a
schema version. Output paths are resolved against ``--out-dir`` or the
``CGMMN_OUT_DIR`` environment variable when relative.

Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure,
4 I/O or file-format error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from .conditional import cmmd2
from .datasets import (
    FileFormatError,
    PairedDataset,
    gen_conditional_gaussian,
    gen_cubic_toy,
    gen_label_conditional_mixture,
    load_csv,
    load_idx_subset,
    load_sample_csv,
    save_csv,
)
from .distill import (
    BayesianPolynomialRegression,
    distill,
    evaluate_rmse,
    predictive_table,
    sample_teacher,
)
from .embeddings import mmd2_biased, mmd_permutation_test
from .estimator import CGMMN, TrainingDivergedError
from .gradcheck import check_sample_gradients, check_weight_gradients
from .kernels import DeltaKernel, LinearKernel, RBFKernel, median_bandwidth_sq
from .linalg import NotPositiveDefiniteError
from .network import load_net, save_net
from .validation import one_hot

REPORT_SCHEMA_VERSION = 1
CONFIG_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


class ConfigError(ValueError):
    """A run configuration document is invalid."""


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _out_path(args, name) -> Path:
    path = Path(name)
    if path.is_absolute():
        return path
    base = args.out_dir or os.environ.get("CGMMN_OUT_DIR", ".")
    return Path(base) / path


def _write_report(args, doc: dict, out_name: str | None) -> None:
    doc = {"schema_version": REPORT_SCHEMA_VERSION, **doc}
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out_name:
        path = _out_path(args, out_name)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _kernel_doc(kernel) -> dict | None:
    if kernel is None:
        return None
    if isinstance(kernel, RBFKernel):
        return {"kind": "rbf", "bandwidth_sq": kernel.bandwidth_sq}
    if isinstance(kernel, LinearKernel):
        return {"kind": "linear"}
    return {"kind": "delta"}


def _resolve_kernel_flag(name: str, bandwidth_sq, samples) -> RBFKernel | LinearKernel | DeltaKernel:
    if name == "linear":
        return LinearKernel()
    if name == "delta":
        return DeltaKernel()
    if name in ("rbf", "auto"):
        if bandwidth_sq is None:
            return RBFKernel(median_bandwidth_sq(samples))
        return RBFKernel(float(bandwidth_sq))
    raise ConfigError(f"unknown kernel {name!r}")


def _parse_values(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise ConfigError(f"cannot parse numeric list {text!r}") from None


def _write_sample_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, float) else str(v) for v in row])


# ---------------------------------------------------------------------------
# run configuration (train command)
# ---------------------------------------------------------------------------


def _check_keys(doc: dict, allowed: set[str], where: str) -> None:
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)} in {where}")


def load_run_config(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: invalid JSON ({err})") from None
    _check_keys(doc, {"version", "seed", "dataset", "model", "train", "outputs"}, "config")
    if doc.get("version") != CONFIG_VERSION:
        raise ConfigError(f"config version must be {CONFIG_VERSION}, got {doc.get('version')}")
    if "dataset" not in doc:
        raise ConfigError("config requires a 'dataset' section")
    _check_keys(
        doc.get("model", {}),
        {"hidden_layers", "h_dim", "activation", "output_activation", "input_mode",
         "input_noise_var"},
        "model",
    )
    _check_keys(
        doc.get("train", {}),
        {"batch_size", "epochs", "reg_lambda", "kernel_x", "bandwidth_sq_x", "kernel_y",
         "bandwidth_sq_y", "learning_rate", "beta1", "beta2", "adam_eps", "weight_decay",
         "condition_perturb_sd"},
        "train",
    )
    _check_keys(doc.get("outputs", {}), {"model", "run"}, "outputs")
    return doc


def dataset_from_spec(spec: dict, default_seed: int) -> PairedDataset:
    kinds = {
        "conditional-gaussian": {"n", "slope", "noise_sd", "seed"},
        "cubic-toy": {"seed", "n"},
        "label-mixture": {"n", "num_classes", "seed"},
        "csv": {"path", "x_cols", "y_cols", "label_mode"},
        "idx": {"images", "labels", "max_n", "downscale"},
    }
    kind = spec.get("kind")
    if kind not in kinds:
        raise ConfigError(f"unknown dataset kind {kind!r} (expected one of {sorted(kinds)})")
    _check_keys({k: v for k, v in spec.items() if k != "kind"}, kinds[kind], f"dataset[{kind}]")
    seed = int(spec.get("seed", default_seed))
    if kind == "conditional-gaussian":
        return gen_conditional_gaussian(
            int(spec.get("n", 2000)), float(spec.get("slope", 2.0)),
            float(spec.get("noise_sd", 0.5)), seed,
        )
    if kind == "cubic-toy":
        return gen_cubic_toy(seed, n=int(spec.get("n", 20)))
    if kind == "label-mixture":
        return gen_label_conditional_mixture(
            int(spec.get("n", 1200)), int(spec.get("num_classes", 4)), seed
        )
    if kind == "csv":
        return load_csv(
            spec["path"], list(spec["x_cols"]), list(spec["y_cols"]),
            spec.get("label_mode", "none"),
        )
    return load_idx_subset(
        spec["images"], spec["labels"], spec.get("max_n"), bool(spec.get("downscale", False))
    )


def estimator_from_config(doc: dict, seed: int) -> CGMMN:
    model = doc.get("model", {})
    train = doc.get("train", {})

    def kernel_spec(which: str):
        name = train.get(f"kernel_{which}", "auto")
        bw = train.get(f"bandwidth_sq_{which}")
        if name == "auto" and bw is None:
            return "auto"
        if name in ("auto", "rbf"):
            return RBFKernel(float(bw)) if bw is not None else "auto"
        if name == "linear":
            return LinearKernel()
        if name == "delta":
            return DeltaKernel()
        raise ConfigError(f"unknown kernel_{which} {name!r}")

    return CGMMN(
        hidden_layers=tuple(model.get("hidden_layers", (64, 64))),
        h_dim=int(model.get("h_dim", 20)),
        activation=model.get("activation", "relu"),
        output_activation=model.get("output_activation", "identity"),
        input_mode=model.get("input_mode", "concat"),
        input_noise_var=float(model.get("input_noise_var", 0.01)),
        kernel_x=kernel_spec("x"),
        kernel_y=kernel_spec("y"),
        reg_lambda=train.get("reg_lambda"),
        batch_size=int(train.get("batch_size", 200)),
        epochs=int(train.get("epochs", 100)),
        learning_rate=float(train.get("learning_rate", 1e-3)),
        beta1=float(train.get("beta1", 0.9)),
        beta2=float(train.get("beta2", 0.999)),
        adam_eps=float(train.get("adam_eps", 1e-8)),
        weight_decay=float(train.get("weight_decay", 0.0)),
        condition_perturb_sd=float(train.get("condition_perturb_sd", 0.0)),
        seed=seed,
    )


def training_arrays(ds: PairedDataset) -> tuple[np.ndarray, np.ndarray]:
    """Conditioning and target arrays for the estimator; finite targets are
    one-hot encoded (the generator output must be continuous)."""
    y = one_hot(ds.y, ds.y_domain.size) if ds.y_domain.kind == "finite" else ds.y
    return ds.x, y


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_gen_data(args) -> int:
    spec = {"kind": args.kind, "seed": args.seed}
    if args.kind == "conditional-gaussian":
        spec.update(n=args.n, slope=args.slope, noise_sd=args.noise_sd)
    elif args.kind == "label-mixture":
        spec.update(n=args.n, num_classes=args.num_classes)
    elif args.kind == "cubic-toy":
        spec.update(n=args.n if args.n is not None else 20)
    ds = dataset_from_spec(spec, args.seed)
    path = _out_path(args, args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_csv(ds, path)
    return EXIT_OK


def cmd_mmd(args) -> int:
    X = load_sample_csv(args.x_file)
    Y = load_sample_csv(args.y_file)
    kernel = _resolve_kernel_flag(args.kernel, args.bandwidth_sq, np.vstack([X, Y]))
    doc = {
        "command": "mmd",
        "kernel": _kernel_doc(kernel),
        "n_x": int(X.shape[0]),
        "n_y": int(Y.shape[0]),
        "mmd2": mmd2_biased(kernel, X, Y),
    }
    if args.permutations > 0:
        result = mmd_permutation_test(kernel, X, Y, args.permutations, rng=args.seed)
        doc["permutations"] = args.permutations
        doc["p_value"] = result.p_value
        doc["null_95th_percentile"] = float(np.percentile(result.null_values, 95))
    _write_report(args, doc, args.out)
    return EXIT_OK


def cmd_cmmd(args) -> int:
    label_mode = "x" if args.label_x else "none"
    x_cols = args.x_cols.split(",")
    y_cols = args.y_cols.split(",")
    data = load_csv(args.data, x_cols, y_cols, label_mode)
    generated = load_csv(args.generated, x_cols, y_cols, label_mode)
    if args.label_x:
        kernel_x = DeltaKernel()
    else:
        kernel_x = _resolve_kernel_flag(args.kernel_x, args.bandwidth_sq_x, data.x)
    kernel_y = _resolve_kernel_flag(args.kernel_y, args.bandwidth_sq_y, data.y)
    finite_mode = {"auto": None, "on": True, "off": False}[args.finite_mode]
    reg_lambda = None if args.reg_lambda == "auto" else float(args.reg_lambda)
    est = cmmd2(
        kernel_x, kernel_y, data.x, data.y, generated.x, generated.y,
        reg_lambda=reg_lambda, finite_mode=finite_mode,
    )
    _write_report(
        args,
        {
            "command": "cmmd",
            "kernel_x": _kernel_doc(kernel_x),
            "kernel_y": _kernel_doc(kernel_y),
            "reg_lambda": est.reg_lambda,
            "finite_mode": est.finite_mode,
            "n_data": len(data),
            "n_generated": len(generated),
            "cmmd2": est.value,
            "raw": est.raw,
            "terms": list(est.terms),
        },
        args.out,
    )
    return EXIT_OK


def cmd_train(args) -> int:
    doc = load_run_config(args.config)
    seed = args.seed if args.seed is not None else int(doc.get("seed", 0))
    ds = dataset_from_spec(doc["dataset"], seed)
    est = estimator_from_config(doc, seed)
    X, y = training_arrays(ds)
    started = time.time()
    est.fit(X, y)
    elapsed = time.time() - started
    outputs = doc.get("outputs", {})
    model_name = outputs.get("model", "model.json")
    run_name = outputs.get("run", "run.json")
    model_path = _out_path(args, model_name)
    model_path.parent.mkdir(parents=True, exist_ok=True)
    save_net(est.net_, model_path)
    _write_report(
        args,
        {
            "command": "train",
            "config": doc,
            "seed": seed,
            "dataset_provenance": ds.provenance,
            "n_samples": len(ds),
            "resolved": {
                "kernel_x": _kernel_doc(est.kernel_x_),
                "kernel_y": _kernel_doc(est.kernel_y_),
                "reg_lambda": est.lambda_,
            },
            "history": est.history_,
            "epoch_seconds": est.epoch_seconds_,
            "total_seconds": elapsed,
            "model_path": str(model_path),
        },
        run_name,
    )
    return EXIT_OK


def _load_conditions(args, est: CGMMN) -> tuple[np.ndarray, list[str]]:
    finite = est.net_.num_condition_classes > 0
    if args.label is not None:
        if not finite:
            raise ConfigError("--label requires a model conditioned on labels")
        return np.array([int(args.label)]), ["label"]
    if args.x is not None:
        if finite:
            raise ConfigError("model is label-conditioned; use --label")
        values = _parse_values(args.x)
        return np.array([values]), [f"x{i}" for i in range(len(values))]
    if args.x_file is not None:
        if finite:
            ds_x = load_sample_csv(args.x_file)[:, 0]
            return ds_x.astype(np.int64), ["label"]
        ds_x = load_sample_csv(args.x_file)
        return ds_x, [f"x{i}" for i in range(ds_x.shape[1])]
    raise ConfigError("one of --x, --label, or --x-file is required")


def cmd_sample(args) -> int:
    est = CGMMN.from_net(load_net(args.model))
    conditions, cond_header = _load_conditions(args, est)
    rng = np.random.default_rng(args.seed)
    out_dim = est.net_.output_dim
    header = cond_header + [f"y{i}" for i in range(out_dim)]
    rows = []
    for cond in conditions:
        draws = est.sample(cond, args.count, rng=rng)
        cond_cells = (
            [int(cond)] if cond_header == ["label"] else [float(v) for v in np.atleast_1d(cond)]
        )
        for draw in draws:
            rows.append(cond_cells + [float(v) for v in draw])
    _write_sample_csv(_out_path(args, args.out), header, rows)
    return EXIT_OK


def cmd_classify(args) -> int:
    est = CGMMN.from_net(load_net(args.model))
    if args.images:
        ds = load_idx_subset(args.images, args.labels, args.max_n, args.downscale)
        X, labels = ds.x, ds.y
    else:
        ds = load_csv(args.data, args.x_cols.split(","), [args.label_col], label_mode="y")
        X, labels = ds.x, ds.y
    predictions = est.predict_class(X, rng=args.seed)
    errors = int(np.sum(predictions != labels))
    _write_report(
        args,
        {
            "command": "classify",
            "n": int(labels.shape[0]),
            "errors": errors,
            "error_rate": errors / labels.shape[0],
        },
        args.out,
    )
    return EXIT_OK


def cmd_traverse(args) -> int:
    est = CGMMN.from_net(load_net(args.model))
    finite = est.net_.num_condition_classes > 0
    if finite:
        if args.label is None:
            raise ConfigError("model is label-conditioned; use --label")
        cond = int(args.label)
    else:
        if args.x is None:
            raise ConfigError("--x is required for continuous conditions")
        cond = np.array(_parse_values(args.x))
    values = _parse_values(args.values)
    outputs = est.latent_traverse(cond, args.dim, values)
    header = ["h_value"] + [f"y{i}" for i in range(est.net_.output_dim)]
    rows = [[float(v)] + [float(o) for o in out] for v, out in zip(values, outputs)]
    _write_sample_csv(_out_path(args, args.out), header, rows)
    return EXIT_OK


def cmd_distill(args) -> int:
    seed = args.seed
    if args.train_csv:
        train_ds = load_csv(args.train_csv, args.x_cols.split(","), [args.y_col])
        test_ds = (
            load_csv(args.test_csv, args.x_cols.split(","), [args.y_col])
            if args.test_csv
            else train_ds
        )
    else:
        train_ds = gen_cubic_toy(seed)
        test_ds = gen_cubic_toy(seed + 1)
    teacher = BayesianPolynomialRegression(
        degree=args.degree, prior_var=args.prior_var, noise_var=args.noise_var
    ).fit(train_ds.x, train_ds.y)
    perturb = None if args.perturb_scale == "auto" else float(args.perturb_scale)
    dset = sample_teacher(teacher, train_ds.x, args.per_x, perturb, rng=seed)
    student = CGMMN(
        hidden_layers=tuple(int(w) for w in args.hidden.split(",")),
        h_dim=args.h_dim,
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
        reg_lambda=args.reg_lambda,
        kernel_y=RBFKernel(args.bandwidth_sq_y) if args.bandwidth_sq_y else "auto",
        seed=seed,
    )
    distill(dset, student)
    lo, hi = float(train_ds.x.min()), float(train_ds.x.max())
    grid = np.linspace(lo, hi, args.grid_points).reshape(-1, 1)
    t_table = predictive_table(teacher, grid)
    s_table = predictive_table(student, grid, samples_per_x=args.grid_samples, rng=seed + 1)
    teacher_rmse = evaluate_rmse(teacher, test_ds.x, test_ds.y)
    student_rmse = evaluate_rmse(
        student, test_ds.x, test_ds.y, samples_per_x=args.grid_samples, rng=seed + 2
    )
    rel = float(
        np.sqrt(np.mean((s_table[:, 1] - t_table[:, 1]) ** 2))
        / np.sqrt(np.mean(t_table[:, 1] ** 2))
    )
    sd_corr = float(np.corrcoef(s_table[:, 2], t_table[:, 2])[0, 1])
    grid_path = _out_path(args, args.grid_out)
    _write_sample_csv(
        grid_path,
        ["x", "teacher_mean", "teacher_sd", "student_mean", "student_sd"],
        [
            [float(g), float(tm), float(ts), float(sm), float(ss)]
            for g, tm, ts, sm, ss in zip(
                grid[:, 0], t_table[:, 1], t_table[:, 2], s_table[:, 1], s_table[:, 2]
            )
        ],
    )
    _write_report(
        args,
        {
            "command": "distill",
            "teacher": {
                "degree": args.degree,
                "prior_var": args.prior_var,
                "noise_var": args.noise_var,
            },
            "n_distill_pairs": len(dset.pairs),
            "teacher_rmse": teacher_rmse,
            "student_rmse": student_rmse,
            "rmse_ratio": student_rmse / teacher_rmse,
            "grid_relative_rmse": rel,
            "sd_correlation": sd_corr,
            "grid_path": str(grid_path),
        },
        args.out,
    )
    return EXIT_OK


def cmd_gradcheck(args) -> int:
    sample_results = check_sample_gradients(seed=args.seed)
    weight_results = check_weight_gradients(seed=args.seed)
    all_passed = all(r.passed for r in sample_results + weight_results)
    doc = {
        "command": "gradcheck",
        "passed": all_passed,
        "sample_gradients": [
            {"case": r.name, "max_abs_err": r.max_abs_err, "max_rel_err": r.max_rel_err,
             "tolerance": r.tolerance, "passed": r.passed}
            for r in sample_results
        ],
        "weight_gradients": {
            "max_abs_err": max(r.max_abs_err for r in weight_results),
            "max_rel_err": max(r.max_rel_err for r in weight_results),
            "cases": len(weight_results),
            "passed": all(r.passed for r in weight_results),
        },
    }
    _write_report(args, doc, args.out)
    return EXIT_OK if all_passed else EXIT_NUMERIC


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cgmmn",
        description="Conditional generative moment-matching networks.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    common.add_argument("--out-dir", default=None,
                        help="directory for relative output paths (default: $CGMMN_OUT_DIR or .)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", parents=[common], help="write a synthetic dataset as CSV")
    p.add_argument("--kind", required=True,
                   choices=["conditional-gaussian", "cubic-toy", "label-mixture"])
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--slope", type=float, default=2.0)
    p.add_argument("--noise-sd", type=float, default=0.5)
    p.add_argument("--num-classes", type=int, default=4)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("mmd", parents=[common],
                       help="biased squared MMD between two CSV sample sets")
    p.add_argument("--x-file", required=True)
    p.add_argument("--y-file", required=True)
    p.add_argument("--kernel", default="rbf", choices=["rbf", "linear"])
    p.add_argument("--bandwidth-sq", type=float, default=None,
                   help="rbf bandwidth; default: median pairwise squared distance")
    p.add_argument("--permutations", type=int, default=0, help="permutation-test resamples")
    p.add_argument("--out", default=None, help="report path (default: stdout)")
    p.set_defaults(func=cmd_mmd)

    p = sub.add_parser("cmmd", parents=[common],
                       help="squared conditional MMD between two paired CSVs")
    p.add_argument("--data", required=True)
    p.add_argument("--generated", required=True)
    p.add_argument("--x-cols", required=True, help="comma-separated conditioning columns")
    p.add_argument("--y-cols", required=True, help="comma-separated output columns")
    p.add_argument("--label-x", action="store_true",
                   help="conditioning column holds integer labels (delta kernel)")
    p.add_argument("--kernel-x", default="rbf", choices=["rbf", "linear"])
    p.add_argument("--bandwidth-sq-x", type=float, default=None)
    p.add_argument("--kernel-y", default="rbf", choices=["rbf", "linear"])
    p.add_argument("--bandwidth-sq-y", type=float, default=None)
    p.add_argument("--reg-lambda", default="auto")
    p.add_argument("--finite-mode", default="auto", choices=["auto", "on", "off"])
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_cmmd)

    p = sub.add_parser("train", parents=[common], help="train a generator from a config file")
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.set_defaults(func=cmd_train, seed=None)

    p = sub.add_parser("sample", parents=[common],
                       help="generate outputs conditioned on given inputs")
    p.add_argument("--model", required=True)
    p.add_argument("--x", default=None, help="inline condition, comma-separated")
    p.add_argument("--label", default=None, help="class label condition")
    p.add_argument("--x-file", default=None, help="CSV of conditions, one per row")
    p.add_argument("--count", type=int, default=1, help="samples per condition")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("classify", parents=[common],
                       help="argmax-protocol error rate on labeled data")
    p.add_argument("--model", required=True)
    p.add_argument("--data", default=None, help="labeled CSV")
    p.add_argument("--x-cols", default=None)
    p.add_argument("--label-col", default="label")
    p.add_argument("--images", default=None, help="IDX image file")
    p.add_argument("--labels", default=None, help="IDX label file")
    p.add_argument("--max-n", type=int, default=None)
    p.add_argument("--downscale", action="store_true", help="2x mean-pool images")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("traverse", parents=[common],
                       help="latent-axis traversal outputs for plotting")
    p.add_argument("--model", required=True)
    p.add_argument("--x", default=None)
    p.add_argument("--label", default=None)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--values", required=True, help="comma-separated values in [0, 1]")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_traverse)

    p = sub.add_parser("distill", parents=[common],
                       help="fit a Bayesian teacher, distill a student, compare RMSE")
    p.add_argument("--train-csv", default=None, help="teacher training data (default: cubic toy)")
    p.add_argument("--test-csv", default=None)
    p.add_argument("--x-cols", default="x0")
    p.add_argument("--y-col", default="y0")
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--prior-var", type=float, default=100.0)
    p.add_argument("--noise-var", type=float, default=9.0)
    p.add_argument("--per-x", type=int, default=150)
    p.add_argument("--perturb-scale", default="auto")
    p.add_argument("--hidden", default="100,50")
    p.add_argument("--h-dim", type=int, default=20)
    p.add_argument("--epochs", type=int, default=150)
    p.add_argument("--batch-size", type=int, default=300)
    p.add_argument("--learning-rate", type=float, default=1e-2)
    p.add_argument("--reg-lambda", type=float, default=0.5)
    p.add_argument("--bandwidth-sq-y", type=float, default=None)
    p.add_argument("--grid-points", type=int, default=41)
    p.add_argument("--grid-samples", type=int, default=200)
    p.add_argument("--grid-out", default="distill-grid.csv")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_distill)

    p = sub.add_parser("gradcheck", parents=[common],
                       help="finite-difference gradient verification suites")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gradcheck)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileFormatError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_IO
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_IO
    except (NotPositiveDefiniteError, TrainingDivergedError, FloatingPointError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
