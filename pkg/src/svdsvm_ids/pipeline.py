"""End-to-end prediction: encoder, optional SVD projection, classifier."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .features import FeatureEncoder, encode
from .ingest import DatasetSplit
from .knn import KnnModel
from .linalg import SvdModel, project
from .svm import SvmEnsemble

FORMAT_VERSION = 1


@dataclass
class ModelFile:
    encoder: FeatureEncoder
    classifier: SvmEnsemble | KnnModel
    svd: SvdModel | None = None
    config: dict[str, str] = field(default_factory=dict)
    format_version: int = FORMAT_VERSION
    checksum: str = ""

    def transform(self, x: np.ndarray) -> np.ndarray:
        return project(x, self.svd) if self.svd is not None else x

    def predict_matrix(self, x: np.ndarray) -> list:
        return self.classifier.predict(self.transform(x))

    def predict_records(self, split: DatasetSplit) -> list:
        matrix, _ = encode(split, self.encoder)
        return self.predict_matrix(matrix.values)
