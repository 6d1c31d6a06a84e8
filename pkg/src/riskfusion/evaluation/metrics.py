from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..corpus.types import LEVELS, N_LEVELS, RiskLevel
from ..exceptions import DomainError, ShapeError


def _indices(labels) -> np.ndarray:
    out = []
    for v in labels:
        if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
            out.append(int(v))
        else:
            out.append(RiskLevel.parse(v).index)
    return np.asarray(out, dtype=int)


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """Counts with rows = true label, columns = predicted label."""

    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ShapeError(f"confusion matrix must be square, got {c.shape}")
        if np.any(c < 0):
            raise ValueError("confusion counts must be non-negative")
        object.__setattr__(self, "counts", c)

    def __getitem__(self, key):
        r, c = key
        r = r.index if isinstance(r, RiskLevel) else r
        c = c.index if isinstance(c, RiskLevel) else c
        return int(self.counts[r, c])

    def __eq__(self, other):
        return isinstance(other, ConfusionMatrix) and np.array_equal(self.counts, other.counts)

    __hash__ = None

    def __add__(self, other):
        return ConfusionMatrix(self.counts + other.counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def support(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def to_list(self) -> list[list[int]]:
        return self.counts.tolist()

    def to_csv(self) -> str:
        labels = [lvl.value for lvl in LEVELS[: self.counts.shape[0]]]
        lines = ["true\\pred," + ",".join(labels)]
        for lbl, row in zip(labels, self.counts):
            lines.append(lbl + "," + ",".join(str(int(v)) for v in row))
        return "\n".join(lines) + "\n"


def confusion_matrix(y_true, y_pred, n_labels: int = N_LEVELS) -> ConfusionMatrix:
    if len(y_true) != len(y_pred):
        raise ShapeError(f"y_true has {len(y_true)} labels but y_pred has {len(y_pred)}")
    if len(y_true) == 0:
        raise DomainError("confusion matrix of zero samples")
    t, p = _indices(y_true), _indices(y_pred)
    counts = np.zeros((n_labels, n_labels), dtype=np.int64)
    np.add.at(counts, (t, p), 1)
    return ConfusionMatrix(counts)


@dataclass(frozen=True)
class MetricsReport:
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    per_label_f1: tuple[float, ...]
    per_label_precision: tuple[float, ...]
    per_label_recall: tuple[float, ...]
    confusion: ConfusionMatrix
    support: tuple[int, ...] = field(default=())

    def to_dict(self) -> dict:
        names = [lvl.value for lvl in LEVELS]
        return {
            "weighted_precision": self.weighted_precision,
            "weighted_recall": self.weighted_recall,
            "weighted_f1": self.weighted_f1,
            "per_label_f1": dict(zip(names, self.per_label_f1)),
            "per_label_precision": dict(zip(names, self.per_label_precision)),
            "per_label_recall": dict(zip(names, self.per_label_recall)),
            "support": dict(zip(names, self.support)),
            "confusion": self.confusion.to_list(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        names = [lvl.value for lvl in LEVELS]
        return cls(
            weighted_precision=d["weighted_precision"],
            weighted_recall=d["weighted_recall"],
            weighted_f1=d["weighted_f1"],
            per_label_f1=tuple(d["per_label_f1"][n] for n in names),
            per_label_precision=tuple(d["per_label_precision"][n] for n in names),
            per_label_recall=tuple(d["per_label_recall"][n] for n in names),
            confusion=ConfusionMatrix(np.asarray(d["confusion"])),
            support=tuple(d["support"][n] for n in names),
        )


def _safe_div(num, den):
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    out = np.zeros_like(num)
    np.divide(num, den, out=out, where=den > 0)
    return out


def weighted_metrics(confusion: ConfusionMatrix) -> MetricsReport:
    """Support-weighted precision, recall and F1 from a confusion matrix.

    Zero denominators give 0 for the affected per-label metric.
    """
    c = confusion.counts.astype(float)
    total = c.sum()
    if total < 1:
        raise DomainError("all-zero confusion matrix")
    diag = np.diag(c)
    support = c.sum(axis=1)
    precision = _safe_div(diag, c.sum(axis=0))
    recall = _safe_div(diag, support)
    f1 = _safe_div(2 * precision * recall, precision + recall)
    w = support / total
    return MetricsReport(
        weighted_precision=float(w @ precision),
        weighted_recall=float(w @ recall),
        weighted_f1=float(w @ f1),
        per_label_f1=tuple(float(v) for v in f1),
        per_label_precision=tuple(float(v) for v in precision),
        per_label_recall=tuple(float(v) for v in recall),
        confusion=confusion,
        support=tuple(int(v) for v in support),
    )


def evaluate(y_true, y_pred) -> MetricsReport:
    return weighted_metrics(confusion_matrix(y_true, y_pred))


def weighted_f1_score(y_true, y_pred) -> float:
    if len(y_true) == 0:
        return 0.0
    return evaluate(y_true, y_pred).weighted_f1


def per_label_report(reports) -> tuple[float, ...]:
    """Mean per-label F1 across fold reports."""
    reports = list(reports)
    if not reports:
        raise DomainError("need at least one fold report")
    return tuple(float(v) for v in np.mean([r.per_label_f1 for r in reports], axis=0))


def aggregate_reports(reports) -> MetricsReport:
    """Mean scalar metrics across folds and element-wise summed confusion."""
    reports = list(reports)
    if not reports:
        raise DomainError("need at least one fold report")
    conf = reports[0].confusion
    for r in reports[1:]:
        conf = conf + r.confusion

    def mean(attr):
        return float(np.mean([getattr(r, attr) for r in reports]))

    def mean_vec(attr):
        return tuple(float(v) for v in np.mean([getattr(r, attr) for r in reports], axis=0))

    return MetricsReport(
        weighted_precision=mean("weighted_precision"),
        weighted_recall=mean("weighted_recall"),
        weighted_f1=mean("weighted_f1"),
        per_label_f1=per_label_report(reports),
        per_label_precision=mean_vec("per_label_precision"),
        per_label_recall=mean_vec("per_label_recall"),
        confusion=conf,
        support=tuple(int(v) for v in conf.support),
    )
