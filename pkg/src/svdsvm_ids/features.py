"""Min-max scaling and one-hot encoding of connection records."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import EmptyDataset
from .ingest import (
    CATEGORICAL_NAMES,
    NUMERIC_NAMES,
    AttackClass,
    ConnectionRecord,
    DatasetSplit,
    map_attack_class,
)

logger = logging.getLogger(__name__)


def _categorical_tokens(record: ConnectionRecord) -> tuple[str, str, str]:
    return record.protocol_type, record.service, record.flag


@dataclass(frozen=True)
class FeatureEncoder:
    numeric_min: tuple[float, ...]
    numeric_max: tuple[float, ...]
    vocabularies: tuple[tuple[str, ...], ...]

    @property
    def n_columns(self) -> int:
        return len(self.numeric_min) + sum(len(v) for v in self.vocabularies)

    @property
    def column_names(self) -> tuple[str, ...]:
        names = list(NUMERIC_NAMES)
        for cat, vocab in zip(CATEGORICAL_NAMES, self.vocabularies):
            names.extend(f"{cat}={tok}" for tok in vocab)
        return tuple(names)


@dataclass(frozen=True)
class FeatureMatrix:
    values: np.ndarray
    column_names: tuple[str, ...]
    unseen_tokens: int = 0

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def fit_encoder(train: DatasetSplit) -> FeatureEncoder:
    if len(train) == 0:
        raise EmptyDataset("cannot fit an encoder on zero records")
    numeric = np.array([r.numeric for r in train.records], dtype=np.float64)
    # dicts keep first-seen order
    vocabs: list[dict[str, None]] = [{} for _ in CATEGORICAL_NAMES]
    for r in train.records:
        for vocab, tok in zip(vocabs, _categorical_tokens(r)):
            vocab.setdefault(tok)
    return FeatureEncoder(
        numeric_min=tuple(float(v) for v in numeric.min(axis=0)),
        numeric_max=tuple(float(v) for v in numeric.max(axis=0)),
        vocabularies=tuple(tuple(v) for v in vocabs),
    )


def scale_numeric(raw: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Map each column to [0, 1] by its training range; constant columns map to 0."""
    span = hi - lo
    degenerate = span <= 0
    safe_span = np.where(degenerate, 1.0, span)
    scaled = (raw - lo) / safe_span
    scaled[:, degenerate] = 0.0
    return np.clip(scaled, 0.0, 1.0)


def encode(records: DatasetSplit, encoder: FeatureEncoder) -> tuple[FeatureMatrix, tuple[AttackClass, ...]]:
    n = len(records)
    n_numeric = len(encoder.numeric_min)
    values = np.zeros((n, encoder.n_columns), dtype=np.float64)
    if n:
        raw = np.array([r.numeric for r in records.records], dtype=np.float64)
        values[:, :n_numeric] = scale_numeric(
            raw, np.array(encoder.numeric_min), np.array(encoder.numeric_max))

    lookups = [{tok: j for j, tok in enumerate(v)} for v in encoder.vocabularies]
    offsets = np.cumsum([n_numeric] + [len(v) for v in encoder.vocabularies])[:-1]
    unseen = 0
    for i, r in enumerate(records.records):
        for lookup, offset, tok in zip(lookups, offsets, _categorical_tokens(r)):
            j = lookup.get(tok)
            if j is None:
                unseen += 1
            else:
                values[i, offset + j] = 1.0
    if unseen:
        logger.warning("%d categorical tokens unseen during fit encoded as all-zero groups", unseen)

    labels = tuple(map_attack_class(r.attack_name) for r in records.records)
    return FeatureMatrix(values, encoder.column_names, unseen), labels
