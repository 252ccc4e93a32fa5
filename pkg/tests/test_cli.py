import json

import numpy as np
import pytest

from cgmmn.cli import main
from cgmmn.datasets import (
    gen_label_conditional_mixture,
    save_csv,
    save_idx_images,
    save_idx_labels,
)


def run_cli(*argv) -> int:
    return main([str(a) for a in argv])


@pytest.fixture
def outdir(tmp_path, monkeypatch):
    monkeypatch.setenv("CGMMN_OUT_DIR", str(tmp_path))
    monkeypatch.chdir(tmp_path)
    return tmp_path


def _write_train_config(outdir, name="run.json", **overrides):
    doc = {
        "version": 1,
        "seed": 5,
        "dataset": {"kind": "conditional-gaussian", "n": 60, "noise_sd": 0.3, "seed": 2},
        "model": {"hidden_layers": [8], "h_dim": 2},
        "train": {"batch_size": 20, "epochs": 2, "learning_rate": 0.01},
        "outputs": {"model": "model.json", "run": "artifact.json"},
    }
    doc.update(overrides)
    path = outdir / name
    path.write_text(json.dumps(doc))
    return path


class TestGenData:
    def test_writes_csv(self, outdir):
        assert run_cli("gen-data", "--kind", "cubic-toy", "--seed", 1, "--out", "toy.csv") == 0
        lines = (outdir / "toy.csv").read_text().strip().splitlines()
        assert lines[0] == "x0,y0"
        assert len(lines) == 21

    def test_byte_identical_under_seed(self, outdir):
        run_cli("gen-data", "--kind", "conditional-gaussian", "--n", 30, "--seed", 9,
                "--out", "a.csv")
        run_cli("gen-data", "--kind", "conditional-gaussian", "--n", 30, "--seed", 9,
                "--out", "b.csv")
        assert (outdir / "a.csv").read_bytes() == (outdir / "b.csv").read_bytes()

    def test_usage_error_exit_code(self, outdir):
        with pytest.raises(SystemExit) as exc:
            run_cli("gen-data", "--kind", "nonsense", "--out", "x.csv")
        assert exc.value.code == 2


class TestMmd:
    def test_self_comparison_near_zero(self, outdir):
        run_cli("gen-data", "--kind", "conditional-gaussian", "--n", 40, "--seed", 0,
                "--out", "d.csv")
        assert run_cli("mmd", "--x-file", "d.csv", "--y-file", "d.csv",
                       "--out", "report.json") == 0
        doc = json.loads((outdir / "report.json").read_text())
        assert doc["schema_version"] == 1
        assert doc["mmd2"] <= 1e-10

    def test_permutation_p_value_present(self, outdir):
        run_cli("gen-data", "--kind", "conditional-gaussian", "--n", 30, "--seed", 0,
                "--out", "d.csv")
        run_cli("gen-data", "--kind", "conditional-gaussian", "--n", 30, "--seed", 4,
                "--out", "e.csv")
        run_cli("mmd", "--x-file", "d.csv", "--y-file", "e.csv", "--permutations", 50,
                "--seed", 3, "--out", "r.json")
        doc = json.loads((outdir / "r.json").read_text())
        assert 0.0 < doc["p_value"] <= 1.0

    def test_missing_file_exit_io(self, outdir):
        assert run_cli("mmd", "--x-file", "absent.csv", "--y-file", "absent.csv") == 4


class TestCmmd:
    def test_identical_files_near_zero(self, outdir):
        run_cli("gen-data", "--kind", "conditional-gaussian", "--n", 25, "--seed", 1,
                "--out", "d.csv")
        assert run_cli("cmmd", "--data", "d.csv", "--generated", "d.csv",
                       "--x-cols", "x0", "--y-cols", "y0", "--reg-lambda", "0.3",
                       "--out", "c.json") == 0
        doc = json.loads((outdir / "c.json").read_text())
        assert doc["cmmd2"] <= 1e-10
        assert len(doc["terms"]) == 3

    def test_label_conditioning_finite_mode(self, outdir):
        ds = gen_label_conditional_mixture(30, num_classes=3, seed=2)
        save_csv(ds, outdir / "mix.csv")
        run_cli("cmmd", "--data", "mix.csv", "--generated", "mix.csv",
                "--x-cols", "label", "--y-cols", "y0,y1", "--label-x", "--out", "c.json")
        doc = json.loads((outdir / "c.json").read_text())
        assert doc["finite_mode"] is True
        assert doc["kernel_x"]["kind"] == "delta"
        assert doc["cmmd2"] <= 1e-10


class TestTrainSampleTraverse:
    def test_train_writes_model_and_artifact(self, outdir):
        config = _write_train_config(outdir)
        assert run_cli("train", "--config", config) == 0
        artifact = json.loads((outdir / "artifact.json").read_text())
        assert artifact["schema_version"] == 1
        assert len(artifact["history"]) == 2
        assert len(artifact["epoch_seconds"]) == 2
        assert artifact["resolved"]["reg_lambda"] > 0.0
        assert (outdir / "model.json").exists()

    def test_zero_epochs_model_equals_initialization(self, outdir):
        c1 = _write_train_config(
            outdir, name="r1.json",
            train={"batch_size": 20, "epochs": 0},
            outputs={"model": "m1.json", "run": "a1.json"},
        )
        c2 = _write_train_config(
            outdir, name="r2.json",
            train={"batch_size": 20, "epochs": 0},
            outputs={"model": "m2.json", "run": "a2.json"},
        )
        run_cli("train", "--config", c1)
        run_cli("train", "--config", c2)
        assert (outdir / "m1.json").read_bytes() == (outdir / "m2.json").read_bytes()

    def test_train_determinism_byte_identical_model(self, outdir):
        c1 = _write_train_config(outdir, name="r1.json",
                                 outputs={"model": "m1.json", "run": "a1.json"})
        c2 = _write_train_config(outdir, name="r2.json",
                                 outputs={"model": "m2.json", "run": "a2.json"})
        run_cli("train", "--config", c1)
        run_cli("train", "--config", c2)
        assert (outdir / "m1.json").read_bytes() == (outdir / "m2.json").read_bytes()

    def test_unknown_config_key_rejected(self, outdir):
        config = _write_train_config(outdir, extra_section={"x": 1})
        assert run_cli("train", "--config", config) == 2

    def test_wrong_version_rejected(self, outdir):
        config = _write_train_config(outdir, version=7)
        assert run_cli("train", "--config", config) == 2

    def test_sample_deterministic_outputs(self, outdir):
        config = _write_train_config(outdir)
        run_cli("train", "--config", config)
        run_cli("sample", "--model", "model.json", "--x", "0.5", "--count", 5,
                "--seed", 7, "--out", "s1.csv")
        run_cli("sample", "--model", "model.json", "--x", "0.5", "--count", 5,
                "--seed", 7, "--out", "s2.csv")
        assert (outdir / "s1.csv").read_bytes() == (outdir / "s2.csv").read_bytes()
        lines = (outdir / "s1.csv").read_text().strip().splitlines()
        assert lines[0] == "x0,y0"
        assert len(lines) == 6

    def test_sample_per_class_conditioning(self, outdir):
        ds = gen_label_conditional_mixture(40, num_classes=3, seed=3)
        save_csv(ds, outdir / "mix.csv")
        config = _write_train_config(
            outdir,
            dataset={"kind": "csv", "path": str(outdir / "mix.csv"),
                     "x_cols": ["label"], "y_cols": ["y0", "y1"], "label_mode": "x"},
            train={"batch_size": 10, "epochs": 1},
        )
        run_cli("train", "--config", config)
        assert run_cli("sample", "--model", "model.json", "--label", 1, "--count", 3,
                       "--seed", 1, "--out", "s.csv") == 0
        lines = (outdir / "s.csv").read_text().strip().splitlines()
        assert lines[0] == "label,y0,y1"
        assert all(line.startswith("1,") for line in lines[1:])

    def test_traverse_csv(self, outdir):
        config = _write_train_config(outdir)
        run_cli("train", "--config", config)
        assert run_cli("traverse", "--model", "model.json", "--x", "0.2", "--dim", 1,
                       "--values", "0,0.5,1.0", "--out", "t.csv") == 0
        lines = (outdir / "t.csv").read_text().strip().splitlines()
        assert lines[0] == "h_value,y0"
        assert len(lines) == 4


class TestClassify:
    def test_idx_pipeline(self, outdir):
        rng = np.random.default_rng(0)
        images = rng.integers(0, 256, size=(30, 4, 4), dtype=np.uint8)
        labels = rng.integers(0, 3, size=30, dtype=np.uint8)
        save_idx_images(images, outdir / "imgs.idx")
        save_idx_labels(labels, outdir / "lbls.idx")
        config = _write_train_config(
            outdir,
            dataset={"kind": "idx", "images": str(outdir / "imgs.idx"),
                     "labels": str(outdir / "lbls.idx")},
            model={"hidden_layers": [8], "h_dim": 2, "output_activation": "sigmoid"},
            train={"batch_size": 10, "epochs": 1},
        )
        assert run_cli("train", "--config", config) == 0
        assert run_cli("classify", "--model", "model.json", "--images", "imgs.idx",
                       "--labels", "lbls.idx", "--seed", 1, "--out", "cls.json") == 0
        doc = json.loads((outdir / "cls.json").read_text())
        assert doc["n"] == 30
        assert 0.0 <= doc["error_rate"] <= 1.0
        assert doc["errors"] == round(doc["error_rate"] * 30)


class TestDistillCommand:
    def test_report_and_grid_files(self, outdir):
        # Tiny run: checks wiring and report structure, not quality.
        assert run_cli(
            "distill", "--seed", 3, "--per-x", 10, "--epochs", 5, "--batch-size", 50,
            "--hidden", "16", "--h-dim", 4, "--grid-points", 9, "--grid-samples", 20,
            "--out", "d.json",
        ) == 0
        doc = json.loads((outdir / "d.json").read_text())
        assert doc["n_distill_pairs"] == 200
        assert doc["rmse_ratio"] == pytest.approx(doc["student_rmse"] / doc["teacher_rmse"])
        grid_lines = (outdir / "distill-grid.csv").read_text().strip().splitlines()
        assert grid_lines[0] == "x,teacher_mean,teacher_sd,student_mean,student_sd"
        assert len(grid_lines) == 10


class TestGradcheckCommand:
    def test_passes_and_reports(self, outdir):
        assert run_cli("gradcheck", "--seed", 2, "--out", "g.json") == 0
        doc = json.loads((outdir / "g.json").read_text())
        assert doc["passed"] is True
        assert all(case["passed"] for case in doc["sample_gradients"])
        assert doc["weight_gradients"]["passed"] is True
