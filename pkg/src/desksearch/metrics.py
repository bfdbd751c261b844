"""Multiclass classification metrics around a K x K confusion matrix.

Rows are true labels, columns are predicted labels.  Accuracy is the trace
over the total count; precision and recall are per-class one-vs-rest, with
the 0/0 case defined as 0; weighted F1 averages per-class F1 by true-label
support.  The row-normalized view divides each row by its sum (zero-support
rows stay zero), matching the proportional confusion-matrix convention.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np


@dataclass
class ConfusionMatrix:
    counts: np.ndarray  # (K, K) non-negative integers, rows = true labels

    def __post_init__(self) -> None:
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.ndim != 2 or self.counts.shape[0] != self.counts.shape[1]:
            raise ValueError("confusion matrix must be square")
        if self.counts.shape[0] < 2:
            raise ValueError("need at least 2 classes")
        if np.any(self.counts < 0):
            raise ValueError("counts must be non-negative")

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def confusion_counts(pairs: list[tuple[int, int]], n_classes: int) -> ConfusionMatrix:
    """Count (true, predicted) label pairs into a K x K matrix."""
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    for y_true, y_pred in pairs:
        if not (0 <= y_true < n_classes and 0 <= y_pred < n_classes):
            raise ValueError(
                f"label pair ({y_true}, {y_pred}) out of range for {n_classes} classes"
            )
        counts[y_true, y_pred] += 1
    return ConfusionMatrix(counts)


def row_normalize(cm: ConfusionMatrix) -> np.ndarray:
    """Each row divided by its sum; rows with no support come back all zero."""
    counts = cm.counts.astype(float)
    row_sums = counts.sum(axis=1, keepdims=True)
    safe = np.where(row_sums == 0, 1.0, row_sums)
    out = counts / safe
    out[row_sums[:, 0] == 0] = 0.0
    return out


def accuracy(cm: ConfusionMatrix) -> float:
    if cm.total == 0:
        raise ValueError("accuracy of an empty confusion matrix is undefined")
    return float(np.trace(cm.counts)) / cm.total


def precision(cm: ConfusionMatrix, q: int) -> float:
    """Fraction of predicted-q samples that are truly q (0 when q is never predicted)."""
    _check_class(cm, q)
    predicted = int(cm.counts[:, q].sum())
    return int(cm.counts[q, q]) / predicted if predicted else 0.0


def recall(cm: ConfusionMatrix, q: int) -> float:
    """Fraction of truly-q samples predicted as q (0 when q has no support)."""
    _check_class(cm, q)
    support = int(cm.counts[q, :].sum())
    return int(cm.counts[q, q]) / support if support else 0.0


def f1(cm: ConfusionMatrix, q: int) -> float:
    """Harmonic mean 2PR / (P + R), 0 when both are 0."""
    p, r = precision(cm, q), recall(cm, q)
    return 2.0 * p * r / (p + r) if p + r else 0.0


def weighted_f1(cm: ConfusionMatrix) -> float:
    """Per-class F1 averaged with true-label support as weights."""
    if cm.total == 0:
        raise ValueError("weighted F1 of an empty confusion matrix is undefined")
    supports = cm.counts.sum(axis=1)
    num = sum(int(supports[q]) * f1(cm, q) for q in range(cm.n_classes))
    return num / int(supports.sum())


def _check_class(cm: ConfusionMatrix, q: int) -> None:
    if not 0 <= q < cm.n_classes:
        raise ValueError(f"class {q} out of range for {cm.n_classes} classes")


@dataclass
class MetricsReport:
    accuracy: float
    precision: list[float]
    recall: list[float]
    f1: list[float]
    weighted_f1: float
    support: list[int]
    degenerate_classes: list[int] = field(default_factory=list)  # 0/0 rule applied

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "weighted_f1": self.weighted_f1,
            "per_class": [
                {
                    "class": q,
                    "precision": self.precision[q],
                    "recall": self.recall[q],
                    "f1": self.f1[q],
                    "support": self.support[q],
                }
                for q in range(len(self.precision))
            ],
            "degenerate_classes": self.degenerate_classes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def compute_report(cm: ConfusionMatrix) -> MetricsReport:
    supports = [int(s) for s in cm.counts.sum(axis=1)]
    predicted = [int(s) for s in cm.counts.sum(axis=0)]
    return MetricsReport(
        accuracy=accuracy(cm),
        precision=[precision(cm, q) for q in range(cm.n_classes)],
        recall=[recall(cm, q) for q in range(cm.n_classes)],
        f1=[f1(cm, q) for q in range(cm.n_classes)],
        weighted_f1=weighted_f1(cm),
        support=supports,
        degenerate_classes=[
            q for q in range(cm.n_classes) if supports[q] == 0 or predicted[q] == 0
        ],
    )


def confusion_to_csv(cm: ConfusionMatrix, normalized: bool = False) -> str:
    """CSV with a true-label row per line; plot-ready data, not a plot."""
    matrix = row_normalize(cm) if normalized else cm.counts
    buf = io.StringIO()
    header = ["true\\pred"] + [str(q) for q in range(cm.n_classes)]
    buf.write(",".join(header) + "\n")
    for q in range(cm.n_classes):
        cells = [repr(float(x)) if normalized else str(int(x)) for x in matrix[q]]
        buf.write(",".join([str(q)] + cells) + "\n")
    return buf.getvalue()
