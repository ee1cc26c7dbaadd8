"""Brute-force k-nearest-neighbour classifier."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, KTooLarge


@dataclass(frozen=True)
class KnnModel:
    train_matrix: np.ndarray
    train_labels: tuple
    k: int = 5

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.k > self.train_matrix.shape[0]:
            raise KTooLarge(f"k={self.k} exceeds {self.train_matrix.shape[0]} training rows")
        if len(self.train_labels) != self.train_matrix.shape[0]:
            raise DimensionMismatch("one label per training row required")

    def predict(self, x) -> list:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.train_matrix.shape[1]:
            raise DimensionMismatch(
                f"query has {x.shape[1]} features, model expects {self.train_matrix.shape[1]}")
        return [self._vote(self._nearest(q)) for q in x]

    def _nearest(self, q: np.ndarray) -> np.ndarray:
        diff = self.train_matrix - q
        dist = np.einsum("ij,ij->i", diff, diff)
        # stable sort: equal distances keep lower row index first
        return np.argsort(dist, kind="stable")[: self.k]

    def _vote(self, neighbours: np.ndarray):
        counts: dict = {}
        first_seen: dict = {}
        for rank, idx in enumerate(neighbours):
            label = self.train_labels[idx]
            counts[label] = counts.get(label, 0) + 1
            first_seen.setdefault(label, rank)
        best = max(counts.values())
        tied = [lab for lab, c in counts.items() if c == best]
        return min(tied, key=first_seen.__getitem__)


def knn_predict(model: KnnModel, x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionMismatch("knn_predict expects a single vector")
    return model.predict(x[None, :])[0]
