"""CSV and plain-text rendering of evaluation reports."""
from __future__ import annotations

import csv
import io

from .ingest import CLASS_ORDER, AttackClass
from .metrics import ClassMetrics, EvaluationReport

CSV_HEADER = ("method", "class", "precision", "recall", "f_measure", "zero_division")
METRICS = ("precision", "recall", "f_measure")


def _cell(x: float) -> str:
    return repr(float(x))


def _flags(m: ClassMetrics) -> str:
    return ";".join(name for name in METRICS if name in m.zero_division)


def reports_to_csv(reports: dict[str, EvaluationReport]) -> str:
    """One section per method: five class rows, then ``macro`` and ``accuracy``.

    The accuracy row repeats the accuracy in all three metric columns
    (micro-averaged precision, recall and F all equal accuracy for
    single-label data). ``zero_division`` names metrics whose denominator
    was zero and which are therefore reported as 0.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(CSV_HEADER)
    for method, rep in reports.items():
        for cls, m in rep.per_class.items():
            writer.writerow([method, str(cls), _cell(m.precision), _cell(m.recall),
                             _cell(m.f_measure), _flags(m)])
        mac = rep.macro
        writer.writerow([method, "macro", _cell(mac.precision), _cell(mac.recall),
                         _cell(mac.f_measure), ""])
        acc = _cell(rep.accuracy)
        writer.writerow([method, "accuracy", acc, acc, acc, ""])
    return buf.getvalue()


def reports_from_csv(text: str) -> dict[str, EvaluationReport]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header[:5]) != CSV_HEADER[:5]:
        raise ValueError(f"unexpected report header {header!r}")
    rows: dict[str, dict] = {}
    for row in reader:
        if not row:
            continue
        method, cls, p, r, f = row[:5]
        flags = frozenset(filter(None, row[5].split(";"))) if len(row) > 5 else frozenset()
        entry = rows.setdefault(method, {"per_class": {}, "macro": None, "accuracy": 0.0})
        metrics = ClassMetrics(float(p), float(r), float(f), flags)
        if cls == "macro":
            entry["macro"] = metrics
        elif cls == "accuracy":
            entry["accuracy"] = float(p)
        else:
            entry["per_class"][AttackClass.parse(cls)] = metrics
    return {m: EvaluationReport(e["per_class"], e["macro"], e["accuracy"]) for m, e in rows.items()}


def reports_to_table(reports: dict[str, EvaluationReport]) -> str:
    """Percent tables laid out with methods as rows and classes as columns."""
    classes = [c for c in CLASS_ORDER if any(c in r.per_class for r in reports.values())]
    width = max([len(m) for m in reports] + [12])
    lines = []
    for metric, title in zip(METRICS, ("Precision", "Recall", "F-measure")):
        lines.append(f"{title} by attack class (%)")
        lines.append(" " * width + "".join(f"{str(c):>9}" for c in classes) + f"{'macro':>9}")
        for method, rep in reports.items():
            cells = []
            for c in classes:
                m = rep.per_class.get(c)
                if m is None:
                    cells.append(f"{'-':>9}")
                else:
                    mark = "*" if metric in m.zero_division else " "
                    cells.append(f"{100 * getattr(m, metric):8.1f}{mark}")
            cells.append(f"{100 * getattr(rep.macro, metric):8.1f} ")
            lines.append(f"{method:<{width}}" + "".join(cells))
        lines.append("")
    lines.append("Accuracy (%)")
    for method, rep in reports.items():
        lines.append(f"{method:<{width}}{100 * rep.accuracy:9.1f}")
    if any(m.zero_division for r in reports.values() for m in r.per_class.values()):
        lines.append("")
        lines.append("* zero denominator, reported as 0")
    return "\n".join(lines) + "\n"


def comparison_deltas(reports: dict[str, EvaluationReport]) -> dict[str, float]:
    """Macro-F of SVM minus KNN for each feature variant run with both."""
    deltas = {}
    for variant in ("full", "svd"):
        svm, knn = reports.get(f"svm-{variant}"), reports.get(f"knn-{variant}")
        if svm is not None and knn is not None:
            deltas[variant] = svm.macro.f_measure - knn.macro.f_measure
    return deltas
