import csv
import io

import numpy as np
import pytest

from svdsvm_ids.cli import main

SMALL = ["--train-sample-size", "500", "--test-sample-size", "200", "--svd-rank", "8"]


def _files_args(synthetic_files):
    train, test = synthetic_files
    return ["--train", train, "--test", test]


def test_experiment_deterministic(synthetic_files, tmp_path):
    outs = []
    for run in ("a", "b"):
        out = tmp_path / run
        rc = main(["experiment", *_files_args(synthetic_files), *SMALL, "--seed", "5",
                   "--out", str(out)])
        assert rc == 0
        outs.append((out / "report.csv").read_bytes())
    assert outs[0] == outs[1]
    rows = list(csv.reader(io.StringIO(outs[0].decode())))
    assert len(rows) - 1 == 4 * (5 + 2)
    assert [r[0] for r in rows[1::7]] == ["svm-full", "svm-svd", "knn-full", "knn-svd"]


def test_method_order_canonical(synthetic_files, tmp_path):
    rc = main(["experiment", *_files_args(synthetic_files), *SMALL,
               "--methods", "knn-full,svm-full", "--out", str(tmp_path)])
    assert rc == 0
    rows = list(csv.reader(io.StringIO((tmp_path / "report.csv").read_text())))
    assert [r[0] for r in rows[1::7]] == ["svm-full", "knn-full"]


def test_config_file_precedence(synthetic_files, tmp_path):
    train, test = synthetic_files
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"train = {train}\ntest = {test}\ntrain-sample-size = 300\n"
                   f"test_sample_size = 100\nmethods = knn-full\nknn_k = 3\n# comment\n")
    rc = main(["prepare", "--config", str(cfg), "--test-sample-size", "150", "--out", str(tmp_path)])
    assert rc == 0
    with np.load(tmp_path / "prepared.npz") as data:
        assert data["x_train"].shape[0] == 300
        assert data["x_test"].shape[0] == 150
        assert data["x_train"].shape[1] == len(data["columns"])


def test_unknown_config_key(synthetic_files, tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert main(["experiment", "--config", str(cfg)]) == 1
    assert "unknown config keys" in capsys.readouterr().err


def test_failure_exit_code(tmp_path, capsys):
    rc = main(["experiment", "--train", str(tmp_path / "absent.txt"),
               "--test", str(tmp_path / "absent.txt"), "--out", str(tmp_path)])
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_sample_too_large(synthetic_files, tmp_path, capsys):
    rc = main(["experiment", *_files_args(synthetic_files), "--train-sample-size", "999999",
               "--test-sample-size", "10", "--out", str(tmp_path)])
    assert rc == 1


def test_train_evaluate_inspect(synthetic_files, tmp_path, capsys):
    model = tmp_path / "m.model"
    rc = main(["train", *_files_args(synthetic_files), *SMALL, "--method", "svm-svd",
               "--model", str(model)])
    assert rc == 0
    rc = main(["evaluate", "--model", str(model), "--test", synthetic_files[1],
               "--test-sample-size", "200", "--out", str(tmp_path / "eval")])
    assert rc == 0
    rows = list(csv.reader(io.StringIO((tmp_path / "eval" / "report.csv").read_text())))
    assert len(rows) == 1 + 7 and rows[1][0] == "svm-svd"
    capsys.readouterr()
    assert main(["inspect-model", str(model)]) == 0
    out = capsys.readouterr().out
    assert "rank 8" in out and "svm" in out


def test_save_models(synthetic_files, tmp_path):
    rc = main(["experiment", *_files_args(synthetic_files), *SMALL, "--methods", "knn-svd",
               "--save-models", "--out", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "knn-svd.model").is_file()


@pytest.mark.parametrize("value", ["auto", "3.5"])
def test_sigma_sq_flag(synthetic_files, tmp_path, value):
    rc = main(["experiment", *_files_args(synthetic_files), *SMALL, "--methods", "svm-svd",
               "--sigma-sq", value, "--out", str(tmp_path)])
    assert rc == 0
