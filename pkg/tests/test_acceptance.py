"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s``. Criteria that train
generators are seed-pinned; their runtime budgets are asserted alongside
the accuracy targets.
"""

import json
import time

import numpy as np
import pytest
from sklearn.datasets import load_digits

from cgmmn.cli import main as cli_main
from cgmmn.conditional import ConditionalEmbedding, cmmd2, cmmd2_sample_gradient
from cgmmn.datasets import (
    class_centers,
    gen_conditional_gaussian,
    gen_cubic_toy,
    gen_label_conditional_mixture,
    save_idx_images,
    save_idx_labels,
    load_idx_subset,
)
from cgmmn.distill import (
    BayesianPolynomialRegression,
    distill,
    evaluate_rmse,
    predictive_table,
    sample_teacher,
)
from cgmmn.embeddings import mmd2_as_trace, mmd2_biased
from cgmmn.estimator import CGMMN
from cgmmn.kernels import DeltaKernel, LinearKernel, RBFKernel
from cgmmn.network import init_net, sample_hidden_batch
from cgmmn.validation import one_hot

from oracles import central_difference, explicit_cmmd2, one_hot_features


def _report(name: str, detail: str) -> None:
    print(f"\nACCEPTANCE {name}: {detail} -- PASS")


def test_criterion_1_estimator_identity_suite():
    """Trace-form MMD estimator is algebraically identical to the direct form."""
    started = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 17))
        d = int(rng.integers(1, 4))
        X = rng.standard_normal((n, d))
        Y = rng.standard_normal((n, d))
        kernel = [RBFKernel(float(rng.uniform(0.3, 3.0))), LinearKernel()][int(rng.integers(2))]
        delta = abs(mmd2_as_trace(kernel, X, Y) - mmd2_biased(kernel, X, Y))
        worst = max(worst, delta)
    elapsed = time.perf_counter() - started
    assert worst <= 1e-12
    assert elapsed < 5.0
    _report("1 estimator identity", f"100 instances, max |delta| = {worst:.2e}, {elapsed:.1f}s")


def test_criterion_2_cmmd_oracle_equivalence():
    """Trace-form CMMD equals the explicit-feature Frobenius norm."""
    started = time.perf_counter()
    rng = np.random.default_rng(202)
    num_classes = 3
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 7))
        m = int(rng.integers(1, 7))
        lam = float(rng.uniform(0.05, 0.6))
        if rng.integers(2):
            x_d = rng.integers(0, num_classes, n)
            x_s = rng.integers(0, num_classes, m)
            fx_d, fx_s = one_hot_features(x_d, num_classes), one_hot_features(x_s, num_classes)
            k_x = DeltaKernel()
        else:
            x_d, x_s = rng.standard_normal((n, 2)), rng.standard_normal((m, 2))
            fx_d, fx_s = x_d, x_s
            k_x = LinearKernel()
        if rng.integers(2):
            y_d = rng.integers(0, num_classes, n)
            y_s = rng.integers(0, num_classes, m)
            fy_d, fy_s = one_hot_features(y_d, num_classes), one_hot_features(y_s, num_classes)
            k_y = DeltaKernel()
        else:
            y_d, y_s = rng.standard_normal((n, 2)), rng.standard_normal((m, 2))
            fy_d, fy_s = y_d, y_s
            k_y = LinearKernel()
        est = cmmd2(k_x, k_y, x_d, y_d, x_s, y_s, reg_lambda=lam, finite_mode=False)
        oracle = explicit_cmmd2(fx_d, fy_d, fx_s, fy_s, lam)
        worst = max(worst, abs(est.raw - oracle))
    elapsed = time.perf_counter() - started
    assert worst <= 1e-10
    assert elapsed < 10.0
    _report("2 CMMD oracle equivalence", f"100 instances, max |delta| = {worst:.2e}, {elapsed:.1f}s")


def test_criterion_3_gradient_correctness():
    """Analytic gradients match central finite differences."""
    started = time.perf_counter()
    rng = np.random.default_rng(303)

    # Per-sample output gradients over kernel combinations.
    worst_sample = 0.0
    for k_x, k_y, finite in [
        (RBFKernel(0.9), RBFKernel(1.3), None),
        (RBFKernel(0.9), LinearKernel(), None),
        (DeltaKernel(), RBFKernel(1.3), False),
        (DeltaKernel(), RBFKernel(1.3), True),
    ]:
        n, m = 6, 5
        if isinstance(k_x, DeltaKernel):
            x_d = np.concatenate([np.arange(3), rng.integers(0, 3, n - 3)])
            x_s = np.concatenate([np.arange(3), rng.integers(0, 3, m - 3)])
        else:
            x_d, x_s = rng.standard_normal((n, 2)), rng.standard_normal((m, 2))
        y_d, y_s = rng.standard_normal((n, 2)), rng.standard_normal((m, 2))
        analytic = cmmd2_sample_gradient(
            k_x, k_y, x_d, y_d, x_s, y_s, reg_lambda=0.2, finite_mode=finite
        )
        fd = central_difference(
            lambda flat: cmmd2(
                k_x, k_y, x_d, y_d, x_s, flat.reshape(y_s.shape),
                reg_lambda=0.2, finite_mode=finite,
            ).raw,
            y_s.ravel(),
        ).reshape(y_s.shape)
        np.testing.assert_allclose(analytic, fd, rtol=1e-5, atol=1e-8)
        worst_sample = max(worst_sample, float(np.abs(analytic - fd).max()))

    # End-to-end weight gradients through network backprop (108-param net).
    net = init_net(2, 2, (8, 6), 2, seed=303)
    assert net.num_params() <= 500
    n = 6
    x = rng.standard_normal((n, 2))
    y = rng.standard_normal((n, 2))
    h = sample_hidden_batch(n, 2, rng)
    k_x, k_y, lam = RBFKernel(1.1), RBFKernel(0.8), 0.2
    y_gen = net.forward(x, h)
    grad_y = cmmd2_sample_gradient(k_x, k_y, x, y, x, y_gen, reg_lambda=lam)
    analytic_w = net.backward(x, h, grad_y)
    worst_weight = 0.0
    for i, param in enumerate(net.parameters()):
        def objective(values, index=i):
            saved = param.copy()
            param[...] = values
            out = cmmd2(k_x, k_y, x, y, x, net.forward(x, h), reg_lambda=lam).raw
            param[...] = saved
            return out

        fd = central_difference(objective, param)
        np.testing.assert_allclose(analytic_w[i], fd, rtol=1e-4, atol=1e-8)
        worst_weight = max(worst_weight, float(np.abs(analytic_w[i] - fd).max()))
    elapsed = time.perf_counter() - started
    assert elapsed < 60.0
    _report(
        "3 gradient correctness",
        f"sample grads max err {worst_sample:.2e}, weight grads max err "
        f"{worst_weight:.2e}, {elapsed:.1f}s",
    )


def test_criterion_4_zero_at_equality():
    """Both discrepancies vanish on identical inputs."""
    rng = np.random.default_rng(404)
    worst_cmmd = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 12))
        if rng.integers(2):
            x = np.concatenate([np.arange(2), rng.integers(0, 2, n)])
            k_x = DeltaKernel()
        else:
            x = rng.standard_normal((n, 2))
            k_x = RBFKernel(float(rng.uniform(0.5, 2.0)))
        y = rng.standard_normal((len(x), 2))
        est = cmmd2(k_x, RBFKernel(1.0), x, y, x, y, reg_lambda=0.1)
        worst_cmmd = max(worst_cmmd, est.value)
    worst_mmd = 0.0
    for _ in range(50):
        X = rng.standard_normal((int(rng.integers(2, 20)), 3))
        worst_mmd = max(worst_mmd, abs(mmd2_biased(RBFKernel(1.0), X, X)))
    assert worst_cmmd <= 1e-10
    assert worst_mmd <= 1e-12
    _report(
        "4 zero at equality",
        f"50 paired sets: max cmmd2 {worst_cmmd:.2e}; 50 sample sets: max mmd2 {worst_mmd:.2e}",
    )


def test_criterion_5_finite_conditional_expectation():
    """Finite-domain conditional expectations equal per-class empirical means."""
    rng = np.random.default_rng(505)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(4, 30))
        num_classes = int(rng.integers(2, 5))
        labels = np.concatenate([np.arange(num_classes), rng.integers(0, num_classes, n)])
        values = rng.standard_normal((len(labels), 1))
        op = ConditionalEmbedding(DeltaKernel(), LinearKernel()).fit(labels, values)
        for c in range(num_classes):
            estimate = op.expectation(c, values[:, 0])
            exact = values[labels == c, 0].mean()
            worst = max(worst, abs(estimate - exact))
    assert worst <= 1e-12
    _report("5 finite conditional expectation", f"max deviation {worst:.2e}")


def test_criterion_6_learning_recovery():
    """Trained generator reproduces conditional means and spreads of
    y | x ~ Normal(2x, 0.25)."""
    started = time.perf_counter()
    ds = gen_conditional_gaussian(2000, slope=2.0, noise_sd=0.5, seed=7)
    est = CGMMN(
        hidden_layers=(64, 64), h_dim=20, epochs=300, batch_size=400,
        learning_rate=1e-2, reg_lambda=0.5, kernel_y=RBFKernel(0.5), seed=1,
    )
    est.fit(ds.x, ds.y)
    # Loss must have dropped well below its starting level.
    assert np.mean(est.history_[-5:]) < 0.2 * est.history_[0]
    rng = np.random.default_rng(99)
    details = []
    for x in (-0.5, 0.0, 0.5):
        draws = est.sample([x], 500, rng=rng)
        mean, sd = float(draws.mean()), float(draws.std())
        assert abs(mean - 2.0 * x) <= 0.1
        assert abs(sd - 0.5) <= 0.15
        details.append(f"x={x:+.1f}: mean {mean:+.3f}, sd {sd:.3f}")
    elapsed = time.perf_counter() - started
    assert elapsed < 600.0
    _report("6 learning recovery", "; ".join(details) + f"; {elapsed:.0f}s")


def test_criterion_7_label_conditioned_generation():
    """Nearly all class-conditioned samples fall nearest their own center."""
    started = time.perf_counter()
    ds = gen_label_conditional_mixture(1200, num_classes=4, seed=11)
    est = CGMMN(
        hidden_layers=(64, 64), h_dim=10, epochs=100, batch_size=200,
        learning_rate=1e-2, seed=2,
    )
    est.fit(ds.x, ds.y)
    centers = class_centers(4)
    rng = np.random.default_rng(123)
    rates = []
    for c in range(4):
        draws = est.sample(c, 400, rng=rng)
        dists = np.linalg.norm(draws[:, None, :] - centers[None, :, :], axis=2)
        rates.append(float(np.mean(dists.argmin(axis=1) == c)))
    elapsed = time.perf_counter() - started
    assert min(rates) >= 0.90
    assert elapsed < 600.0
    _report(
        "7 label-conditioned generation",
        f"per-class nearest-center rates {[f'{r:.2f}' for r in rates]}, {elapsed:.0f}s",
    )


def test_criterion_8_dark_knowledge_distillation():
    """Student tracks the Bayesian teacher's predictive distribution on the
    noisy cubic task without degrading prediction."""
    started = time.perf_counter()
    train = gen_cubic_toy(seed=21)
    test = gen_cubic_toy(seed=22)
    teacher = BayesianPolynomialRegression(degree=3, prior_var=100.0, noise_var=9.0)
    teacher.fit(train.x, train.y)
    dset = sample_teacher(teacher, train.x, per_x=150, perturb_scale=0.8, rng=5)
    assert len(dset.pairs) == 3000
    student = CGMMN(
        hidden_layers=(100, 50), h_dim=20, epochs=150, batch_size=300,
        learning_rate=1e-2, reg_lambda=1.0, kernel_y=RBFKernel(25.0), seed=4,
    )
    distill(dset, student)
    grid = np.linspace(-4.0, 4.0, 41).reshape(-1, 1)
    t_table = predictive_table(teacher, grid)
    s_table = predictive_table(student, grid, samples_per_x=200, rng=77)
    rel = float(
        np.sqrt(np.mean((s_table[:, 1] - t_table[:, 1]) ** 2))
        / np.sqrt(np.mean(t_table[:, 1] ** 2))
    )
    teacher_rmse = evaluate_rmse(teacher, test.x, test.y)
    student_rmse = evaluate_rmse(student, test.x, test.y, samples_per_x=200, rng=78)
    ratio = student_rmse / teacher_rmse
    sd_corr = float(np.corrcoef(s_table[:, 2], t_table[:, 2])[0, 1])
    elapsed = time.perf_counter() - started
    assert rel <= 0.15
    assert ratio <= 1.10
    assert sd_corr > 0.5
    assert elapsed < 600.0
    _report(
        "8 dark-knowledge distillation",
        f"grid rel RMSE {rel:.3f}, RMSE ratio {ratio:.3f}, sd corr {sd_corr:+.2f}, {elapsed:.0f}s",
    )


def test_criterion_9_cli_determinism(tmp_path, monkeypatch):
    """Identical seed and config produce byte-identical data outputs."""
    monkeypatch.setenv("CGMMN_OUT_DIR", str(tmp_path))
    monkeypatch.chdir(tmp_path)
    config = {
        "version": 1,
        "seed": 5,
        "dataset": {"kind": "conditional-gaussian", "n": 60, "noise_sd": 0.3, "seed": 2},
        "model": {"hidden_layers": [8], "h_dim": 2},
        "train": {"batch_size": 20, "epochs": 2, "learning_rate": 0.01},
        "outputs": {"model": "model.json", "run": "artifact.json"},
    }
    checked = []
    for first, second in [
        (
            ["gen-data", "--kind", "label-mixture", "--n", "50", "--seed", "4", "--out", "g1.csv"],
            ["gen-data", "--kind", "label-mixture", "--n", "50", "--seed", "4", "--out", "g2.csv"],
        ),
    ]:
        assert cli_main(first) == 0 and cli_main(second) == 0
        assert (tmp_path / "g1.csv").read_bytes() == (tmp_path / "g2.csv").read_bytes()
        checked.append("gen-data")
    for tag, outputs in (("m1", "a1"), ("m2", "a2")):
        doc = dict(config, outputs={"model": f"{tag}.json", "run": f"{outputs}.json"})
        (tmp_path / f"cfg-{tag}.json").write_text(json.dumps(doc))
        assert cli_main(["train", "--config", str(tmp_path / f"cfg-{tag}.json")]) == 0
    assert (tmp_path / "m1.json").read_bytes() == (tmp_path / "m2.json").read_bytes()
    checked.append("train/model")
    for out in ("s1.csv", "s2.csv"):
        assert cli_main(
            ["sample", "--model", "m1.json", "--x", "0.25", "--count", "10",
             "--seed", "11", "--out", out]
        ) == 0
    assert (tmp_path / "s1.csv").read_bytes() == (tmp_path / "s2.csv").read_bytes()
    checked.append("sample")
    for out in ("r1.json", "r2.json"):
        assert cli_main(
            ["mmd", "--x-file", "g1.csv", "--y-file", "g1.csv", "--permutations", "50",
             "--seed", "3", "--out", out]
        ) == 0
    assert (tmp_path / "r1.json").read_bytes() == (tmp_path / "r2.json").read_bytes()
    checked.append("mmd report")
    _report("9 CLI determinism", f"byte-identical outputs for {', '.join(checked)}")


def test_criterion_10_classification_smoke(tmp_path):
    """Argmax-protocol classification on a small image subset via the IDX
    path reaches error below 15%."""
    started = time.perf_counter()
    digits = load_digits()
    images = np.round(digits.images / 16.0 * 255.0).astype(np.uint8)
    save_idx_images(images, tmp_path / "digits-images.idx")
    save_idx_labels(digits.target.astype(np.uint8), tmp_path / "digits-labels.idx")
    ds = load_idx_subset(tmp_path / "digits-images.idx", tmp_path / "digits-labels.idx", max_n=2000)
    n_train = 1500
    est = CGMMN(
        hidden_layers=(128, 64), h_dim=5, epochs=100, batch_size=250,
        learning_rate=1e-2, seed=6,
    )
    est.fit(ds.x[:n_train], one_hot(ds.y[:n_train], 10))
    predictions = est.predict_class(ds.x[n_train:], rng=100)
    error_rate = float(np.mean(predictions != ds.y[n_train:]))
    elapsed = time.perf_counter() - started
    assert error_rate < 0.15
    assert elapsed < 1200.0
    _report(
        "10 classification smoke",
        f"held-out error rate {error_rate:.3f} on {len(predictions)} images, {elapsed:.0f}s",
    )
