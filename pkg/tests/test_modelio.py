import numpy as np
import pytest

from svdsvm_ids.errors import ChecksumMismatch, IoFailure, VersionMismatch
from svdsvm_ids.experiment import ExperimentConfig, prepare, train_method
from svdsvm_ids.modelio import MAGIC, load_model, parse_model, render_model, save_model


@pytest.fixture(scope="module")
def prepared(synthetic_files):
    train, test = synthetic_files
    cfg = ExperimentConfig(train_path=train, test_path=test, train_sample_size=400,
                           test_sample_size=200, seed=3, svd_rank=8)
    return cfg, prepare(cfg)


@pytest.mark.parametrize("method", ["svm-full", "svm-svd", "knn-full", "knn-svd"])
def test_round_trip_identical_predictions(prepared, tmp_path, method):
    cfg, data = prepared
    model = train_method(method, data.encoder, data.x_train, data.y_train, cfg)
    path = tmp_path / f"{method}.model"
    save_model(model, path)
    loaded = load_model(path)
    assert loaded.predict_matrix(data.x_test) == model.predict_matrix(data.x_test)
    assert loaded.encoder == model.encoder
    assert loaded.config == model.config
    if model.svd is not None:
        assert np.array_equal(loaded.svd.v_k, model.svd.v_k)
    if method.startswith("svm"):
        for a, b in zip(model.classifier.models, loaded.classifier.models):
            assert np.array_equal(a.coefficients, b.coefficients)
            assert a.bias == b.bias
    assert render_model(loaded) == path.read_text(encoding="utf-8")


@pytest.fixture(scope="module")
def small_model_bytes(prepared):
    cfg, data = prepared
    model = train_method("knn-svd", data.encoder, data.x_train[:50], data.y_train[:50], cfg)
    return render_model(model).encode("utf-8")


def test_magic_line(small_model_bytes):
    assert small_model_bytes.split(b"\n", 1)[0] == f"{MAGIC} v1".encode()


def test_flipped_byte_detected(small_model_bytes):
    data = bytearray(small_model_bytes)
    pos = len(data) // 2
    data[pos] = ord("7") if data[pos] != ord("7") else ord("3")
    with pytest.raises(ChecksumMismatch):
        parse_model(bytes(data))


def test_version_checked_before_checksum(small_model_bytes):
    data = small_model_bytes.replace(b" v1\n", b" v99\n", 1)
    with pytest.raises(VersionMismatch):
        parse_model(data)
    with pytest.raises(VersionMismatch):
        parse_model(b"something else\n")


def test_unwritable_path(prepared, tmp_path):
    cfg, data = prepared
    model = train_method("knn-full", data.encoder, data.x_train[:20], data.y_train[:20], cfg)
    with pytest.raises(IoFailure):
        save_model(model, tmp_path / "missing" / "dir" / "x.model")
    with pytest.raises(IoFailure):
        load_model(tmp_path / "nope.model")
