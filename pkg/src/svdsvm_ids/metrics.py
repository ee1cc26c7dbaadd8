"""Confusion matrix and per-class precision / recall / F-measure."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInput, LengthMismatch
from .ingest import CLASS_ORDER


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are true classes, columns predicted classes, both in ``classes`` order."""

    counts: np.ndarray
    classes: tuple = CLASS_ORDER

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def index(self, cls) -> int:
        return self.classes.index(cls)


def confusion(y_true, y_pred, classes=CLASS_ORDER) -> ConfusionMatrix:
    y_true, y_pred = list(y_true), list(y_pred)
    if len(y_true) != len(y_pred):
        raise LengthMismatch(f"{len(y_true)} true labels vs {len(y_pred)} predictions")
    if not y_true:
        raise EmptyInput("no labels to evaluate")
    pos = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        counts[pos[t], pos[p]] += 1
    return ConfusionMatrix(counts, tuple(classes))


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f_measure: float
    # names of metrics whose denominator was zero (reported as 0)
    zero_division: frozenset = frozenset()


def class_metrics(cm: ConfusionMatrix, cls) -> ClassMetrics:
    k = cm.index(cls)
    tp = int(cm.counts[k, k])
    fp = int(cm.counts[:, k].sum()) - tp
    fn = int(cm.counts[k, :].sum()) - tp
    flags = set()

    if tp + fp:
        precision = tp / (tp + fp)
    else:
        precision = 0.0
        flags.add("precision")
    if tp + fn:
        recall = tp / (tp + fn)
    else:
        recall = 0.0
        flags.add("recall")
    if precision + recall > 0:
        f = 2 * precision * recall / (precision + recall)
    else:
        f = 0.0
        flags.add("f_measure")
    return ClassMetrics(precision, recall, f, frozenset(flags))


@dataclass(frozen=True)
class EvaluationReport:
    per_class: dict = field(default_factory=dict)  # class -> ClassMetrics
    macro: ClassMetrics = ClassMetrics(0.0, 0.0, 0.0)
    accuracy: float = 0.0

    @property
    def zero_division_flags(self) -> dict:
        return {c: m.zero_division for c, m in self.per_class.items() if m.zero_division}


def summarize(cm: ConfusionMatrix) -> EvaluationReport:
    """Per-class metrics for every class, macro means over classes present in the truth."""
    per_class = {c: class_metrics(cm, c) for c in cm.classes}
    support = {c: int(cm.counts[i, :].sum()) for i, c in enumerate(cm.classes)}
    present = [c for c in cm.classes if support[c] > 0]
    macro = ClassMetrics(
        precision=float(np.mean([per_class[c].precision for c in present])),
        recall=float(np.mean([per_class[c].recall for c in present])),
        f_measure=float(np.mean([per_class[c].f_measure for c in present])),
    )
    accuracy = float(np.trace(cm.counts)) / cm.total
    return EvaluationReport(per_class, macro, accuracy)


def evaluate(y_true, y_pred, classes=CLASS_ORDER) -> EvaluationReport:
    return summarize(confusion(y_true, y_pred, classes))

