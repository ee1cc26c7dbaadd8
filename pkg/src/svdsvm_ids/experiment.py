"""Experiment harness: SVM / KNN on all encoded features or an SVD subspace."""
from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .errors import IdsError, IoFailure, RankOutOfRange
from .features import FeatureEncoder, encode, fit_encoder
from .ingest import CLASS_ORDER, DatasetSplit, load_split, stratified_sample
from .kernels import KernelSpec, Linear, Polynomial, Rbf, Sigmoid
from .knn import KnnModel
from .linalg import fit_svd, project
from .metrics import EvaluationReport, evaluate
from .modelio import save_model
from .pipeline import ModelFile
from .report import comparison_deltas, reports_to_csv, reports_to_table
from .svm import TrainConfig, train_ovr

logger = logging.getLogger(__name__)

METHODS = ("svm-full", "svm-svd", "knn-full", "knn-svd")

PRESETS = {
    "standard": {"train_sample_size": 23000, "test_sample_size": 5500},
    "desk": {"train_sample_size": 4000, "test_sample_size": 1000},
}


class ExperimentError(IdsError):
    def __init__(self, method: str, cause: Exception):
        self.method = method
        self.cause = cause
        super().__init__(f"{method}: {type(cause).__name__}: {cause}")


@dataclass(frozen=True)
class ExperimentConfig:
    train_path: str = ""
    test_path: str = ""
    train_sample_size: int = 23000
    test_sample_size: int = 5500
    seed: int = 0
    svd_rank: int = 32
    kernel: str = "rbf"
    sigma_sq: float | None = None  # None: auto, half the classifier input dimension
    degree: int = 3
    kappa1: float = 1.0
    kappa2: float = 0.0
    penalty_c: float = 1.0
    kkt_tolerance: float = 1e-3
    max_passes: int | None = None
    knn_k: int = 5
    methods: tuple[str, ...] = METHODS
    out_dir: str = "results"
    n_jobs: int = 1

    def __post_init__(self):
        if self.train_sample_size <= 0 or self.test_sample_size <= 0:
            raise ValueError("sample sizes must be positive")
        if self.svd_rank < 1:
            raise RankOutOfRange("svd_rank must be at least 1")
        unknown = set(self.methods) - set(METHODS)
        if unknown or not self.methods:
            raise ValueError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")
        if self.kernel not in ("linear", "polynomial", "rbf", "sigmoid"):
            raise ValueError(f"unknown kernel {self.kernel!r}")

    def kernel_for(self, n_features: int) -> KernelSpec:
        if self.kernel == "linear":
            return Linear()
        if self.kernel == "polynomial":
            return Polynomial(self.degree)
        if self.kernel == "sigmoid":
            return Sigmoid(self.kappa1, self.kappa2)
        if self.sigma_sq is None:
            return Rbf.default_for(n_features)
        return Rbf(self.sigma_sq)

    def train_config(self) -> TrainConfig:
        return TrainConfig(penalty_c=self.penalty_c, kkt_tolerance=self.kkt_tolerance,
                           max_passes=self.max_passes, seed=self.seed)

    def as_text_dict(self) -> dict[str, str]:
        out = {}
        for key, value in asdict(self).items():
            if isinstance(value, (list, tuple)):
                value = ",".join(value)
            out[key] = "auto" if value is None and key == "sigma_sq" else str(value)
        return out

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


@dataclass
class PreparedData:
    train: DatasetSplit
    test: DatasetSplit
    encoder: FeatureEncoder
    x_train: np.ndarray
    y_train: tuple
    x_test: np.ndarray
    y_test: tuple
    unseen_test_tokens: int = 0


def sample_splits(cfg: ExperimentConfig) -> tuple[DatasetSplit, DatasetSplit]:
    """Load both files and draw the stratified samples.

    The training sample uses ``seed`` and the test sample ``seed + 1``.
    """
    train_full = load_split(cfg.train_path, "train")
    test_full = load_split(cfg.test_path, "test")
    train = stratified_sample(train_full, cfg.train_sample_size, cfg.seed)
    test = stratified_sample(test_full, cfg.test_sample_size, cfg.seed + 1)
    return train, test


def prepare(cfg: ExperimentConfig) -> PreparedData:
    train, test = sample_splits(cfg)
    encoder = fit_encoder(train)
    x_train, y_train = encode(train, encoder)
    x_test, y_test = encode(test, encoder)
    return PreparedData(train, test, encoder, x_train.values, y_train,
                        x_test.values, y_test, x_test.unseen_tokens)


def train_method(method: str, encoder: FeatureEncoder, x: np.ndarray, labels,
                 cfg: ExperimentConfig) -> ModelFile:
    """Fit the optional SVD basis and the classifier for one method on encoded rows."""
    classifier_kind, variant = method.split("-")
    svd = None
    if variant == "svd":
        svd = fit_svd(x, cfg.svd_rank)
        x = project(x, svd)
    if classifier_kind == "svm":
        kernel = cfg.kernel_for(x.shape[1])
        clf = train_ovr(x, labels, kernel, cfg.train_config(),
                        class_order=CLASS_ORDER, n_jobs=cfg.n_jobs)
        not_converged = [str(c) for c, m in zip(clf.class_order, clf.models) if not m.converged]
        if not_converged:
            logger.warning("%s: SMO hit the iteration cap for %s", method, ", ".join(not_converged))
    else:
        clf = KnnModel(x, tuple(labels), cfg.knn_k)
    config = cfg.as_text_dict()
    config["method"] = method
    return ModelFile(encoder, clf, svd, config)


def run_method(method: str, data: PreparedData, cfg: ExperimentConfig) -> tuple[ModelFile, EvaluationReport]:
    try:
        start = time.perf_counter()
        model = train_method(method, data.encoder, data.x_train, data.y_train, cfg)
        predictions = model.predict_matrix(data.x_test)
        report = evaluate(data.y_test, predictions)
    except (IdsError, ValueError, ArithmeticError) as exc:
        raise ExperimentError(method, exc) from exc
    logger.info("%s: accuracy %.4f macro-F %.4f (%.1fs)", method, report.accuracy,
                report.macro.f_measure, time.perf_counter() - start)
    return model, report


def write_reports(reports: dict[str, EvaluationReport], out_dir) -> tuple[Path, Path]:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        csv_path = out / "report.csv"
        txt_path = out / "report.txt"
        csv_path.write_bytes(reports_to_csv(reports).encode("utf-8"))
        table = reports_to_table(reports)
        deltas = comparison_deltas(reports)
        if deltas:
            table += "\nMacro F-measure, SVM minus KNN\n"
            table += "".join(f"  {variant:<5}{100 * d:+.2f} points\n" for variant, d in deltas.items())
        txt_path.write_text(table, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write reports to {out}: {exc}") from exc
    return csv_path, txt_path


def run_experiment(cfg: ExperimentConfig, save_models: bool = False) -> dict[str, EvaluationReport]:
    """Sample, encode, train and evaluate every configured method.

    Methods run in the canonical order so emitted files do not depend on
    the order given in the config.
    """
    data = prepare(cfg)
    if data.unseen_test_tokens:
        logger.warning("%d test categorical tokens were not seen in training", data.unseen_test_tokens)
    reports: dict[str, EvaluationReport] = {}
    for method in (m for m in METHODS if m in cfg.methods):
        model, reports[method] = run_method(method, data, cfg)
        if save_models:
            Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
            save_model(model, Path(cfg.out_dir) / f"{method}.model")
    write_reports(reports, cfg.out_dir)
    return reports
