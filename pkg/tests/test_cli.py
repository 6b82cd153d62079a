import csv
import io
import json

import numpy as np
import pytest

from conftest import require_dataset
from ocrep import network
from ocrep.cli import main


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def read_csv_text(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


class TestTrain:
    def test_iris_smoke(self, capsys, tmp_path, data_dir):
        require_dataset(data_dir, "iris")
        out = tmp_path / "model.json"
        code, stdout, _ = run(capsys, [
            "train", "--data", "iris", "--data-dir", data_dir,
            "--strategy", "ocrep", "--hidden", "20", "--seed", "0",
            "--model-out", str(out),
        ])
        assert code == 0
        assert "gamma=" in stdout and "test_err=" in stdout
        model = network.model_from_json(out.read_text())
        assert model.output_weights.shape == (20, 3)
        assert model.strategy_tag == "ocrep"

    def test_model_file_is_reproducible(self, capsys, tmp_path, data_dir):
        require_dataset(data_dir, "iris")
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for p in paths:
            code, _, _ = run(capsys, [
                "train", "--data", "iris", "--data-dir", data_dir,
                "--strategy", "fixed", "--gamma", "0.01",
                "--hidden", "15", "--seed", "3", "--model-out", str(p),
            ])
            assert code == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_single_output_strategy_on_classification(self, capsys, tmp_path,
                                                      data_dir):
        require_dataset(data_dir, "iris")
        code, _, stderr = run(capsys, [
            "train", "--data", "iris", "--data-dir", data_dir,
            "--strategy", "kibria", "--hidden", "10",
            "--model-out", str(tmp_path / "m.json"),
        ])
        assert code == 2
        assert "single-output" in stderr

    def test_unknown_dataset(self, capsys, tmp_path):
        code, _, stderr = run(capsys, [
            "train", "--data", "nope", "--strategy", "ocrep", "--hidden", "5",
            "--model-out", str(tmp_path / "m.json"),
        ])
        assert code == 2
        assert "error:" in stderr

    def test_errors_json(self, capsys, tmp_path):
        code, _, stderr = run(capsys, [
            "train", "--data", "nope", "--strategy", "ocrep", "--hidden", "5",
            "--model-out", str(tmp_path / "m.json"), "--errors-json",
        ])
        assert code == 2
        payload = json.loads(stderr)
        assert payload["error"] == "InputError"
        assert "message" in payload

    def test_csv_path_requires_task(self, capsys, tmp_path):
        data = tmp_path / "d.csv"
        data.write_text("1,2,0.5\n3,4,0.7\n" * 10)
        code, _, stderr = run(capsys, [
            "train", "--data", str(data), "--strategy", "ocrep",
            "--hidden", "5", "--model-out", str(tmp_path / "m.json"),
        ])
        assert code == 2
        assert "--task" in stderr


class TestPredict:
    def test_round_trip(self, capsys, tmp_path, data_dir):
        require_dataset(data_dir, "iris")
        model_path = tmp_path / "model.json"
        code, _, _ = run(capsys, [
            "train", "--data", "iris", "--data-dir", data_dir,
            "--strategy", "ocrep", "--hidden", "20", "--seed", "1",
            "--model-out", str(model_path),
        ])
        assert code == 0
        feats = tmp_path / "rows.csv"
        feats.write_text("5.1,3.5,1.4,0.2\n6.2,2.9,4.3,1.3\n")
        out_path = tmp_path / "pred.csv"
        code, _, _ = run(capsys, [
            "predict", "--model", str(model_path), "--input", str(feats),
            "--out", str(out_path),
        ])
        assert code == 0
        header, rows = read_csv_text(out_path.read_text())
        assert header == ["row", "output_0", "output_1", "output_2",
                          "label_index"]
        assert len(rows) == 2
        assert all(r[-1] in ("0", "1", "2") for r in rows)

    def test_wrong_width_rejected(self, capsys, tmp_path, data_dir):
        require_dataset(data_dir, "iris")
        model_path = tmp_path / "model.json"
        run(capsys, [
            "train", "--data", "iris", "--data-dir", data_dir,
            "--strategy", "ocrep", "--hidden", "10",
            "--model-out", str(model_path),
        ])
        feats = tmp_path / "rows.csv"
        feats.write_text("1,2,3\n")
        code, _, stderr = run(capsys, [
            "predict", "--model", str(model_path), "--input", str(feats),
        ])
        assert code == 2
        assert "expected 4 features" in stderr


class TestSweepGamma:
    def test_single_gamma_grid(self, capsys, tmp_path):
        data = tmp_path / "d.csv"
        rng = np.random.default_rng(0)
        lines = [f"{a:.4f},{b:.4f},{a + b:.4f}"
                 for a, b in rng.uniform(-1, 1, size=(40, 2))]
        data.write_text("\n".join(lines) + "\n")
        code, stdout, _ = run(capsys, [
            "sweep-gamma", "--data", str(data), "--task", "regression",
            "--hidden", "8", "--grid", "0.5", "--reps", "3",
        ])
        assert code == 0
        header, rows = read_csv_text(stdout)
        assert header == ["kind", "gamma", "err_mean", "err_std", "mu_reg_mean"]
        assert [r[0] for r in rows] == ["grid", "ocrep", "cv"]

    def test_default_grid_row_count(self, capsys, data_dir):
        require_dataset(data_dir, "iris")
        code, stdout, _ = run(capsys, [
            "sweep-gamma", "--data", "iris", "--data-dir", data_dir,
            "--hidden", "20", "--grid", "default", "--reps", "2",
        ])
        assert code == 0
        _, rows = read_csv_text(stdout)
        assert len(rows) == 51 + 2
        assert [r[0] for r in rows[-2:]] == ["ocrep", "cv"]

    def test_json_format(self, capsys, tmp_path):
        data = tmp_path / "d.csv"
        rng = np.random.default_rng(1)
        lines = [f"{a:.4f},{b:.4f},{a * b:.4f}"
                 for a, b in rng.uniform(-1, 1, size=(40, 2))]
        data.write_text("\n".join(lines) + "\n")
        code, stdout, _ = run(capsys, [
            "sweep-gamma", "--data", str(data), "--task", "regression",
            "--hidden", "6", "--grid", "0.1,1.0", "--reps", "2",
            "--format", "json",
        ])
        assert code == 0
        payload = json.loads(stdout)
        assert len(payload) == 4
        assert payload[0]["kind"] == "grid"


class TestBenchmark:
    def test_iris_cells(self, capsys, data_dir):
        require_dataset(data_dir, "iris")
        code, stdout, _ = run(capsys, [
            "benchmark", "--datasets", "iris", "--strategies",
            "ocrep,unregularized", "--hidden", "10,20", "--reps", "2",
            "--data-dir", data_dir,
        ])
        assert code == 0
        header, rows = read_csv_text(stdout)
        assert header[:4] == ["dataset", "strategy", "hidden_units", "metric"]
        assert len(rows) == 4
        assert {r[1] for r in rows} == {"ocrep", "unregularized"}
        assert all(r[3] == "misclassification" for r in rows)

    def test_missing_dataset_warns_and_continues(self, capsys, data_dir):
        require_dataset(data_dir, "iris")
        code, stdout, stderr = run(capsys, [
            "benchmark", "--datasets", "housing,iris", "--strategies",
            "ocrep", "--hidden", "10", "--reps", "2", "--data-dir", data_dir,
        ])
        assert code == 0
        _, rows = read_csv_text(stdout)
        if any("housing" in line for line in stderr.splitlines()):
            assert all(r[0] == "iris" for r in rows)
        else:
            assert {r[0] for r in rows} == {"housing", "iris"}

    def test_unknown_strategy(self, capsys):
        code, _, stderr = run(capsys, [
            "benchmark", "--datasets", "iris", "--strategies", "magic",
        ])
        assert code == 2
        assert "unknown strategy" in stderr


class TestConditionReport:
    def test_iris_ratios(self, capsys, data_dir):
        require_dataset(data_dir, "iris")
        code, stdout, _ = run(capsys, [
            "condition-report", "--datasets", "iris", "--reps", "2",
            "--grid", "1e-6,1e-2,1.0", "--data-dir", data_dir,
        ])
        assert code == 0
        header, rows = read_csv_text(stdout)
        assert header == ["dataset", "hidden_units", "ratio_unreg", "ratio_cv"]
        assert len(rows) == 1
        assert rows[0][0] == "iris" and rows[0][1] == "100"
        assert 0 < float(rows[0][2]) < 1
        assert 0 < float(rows[0][3]) <= 1 + 1e-12


class TestPrintSchema:
    def test_lists_all_outputs(self, capsys):
        code, stdout, _ = run(capsys, ["print-schema"])
        assert code == 0
        for name in ("sweep-gamma", "benchmark", "condition-report", "predict"):
            assert name in stdout
