"""Fold planning, weighted metrics and the cross-validation driver."""

from .folds import Fold, FoldPlan, make_folds, stratified_split
from .metrics import (
    ConfusionMatrix,
    MetricsReport,
    aggregate_reports,
    confusion_matrix,
    evaluate,
    per_label_report,
    weighted_f1_score,
    weighted_metrics,
)


def __getattr__(name):
    # cv pulls in training, which itself imports metrics lazily
    if name in ("CVResult", "run_cv", "run_fold", "parse_recipe"):
        from . import cv

        return getattr(cv, name)
    raise AttributeError(name)


__all__ = [
    "CVResult",
    "ConfusionMatrix",
    "Fold",
    "FoldPlan",
    "MetricsReport",
    "aggregate_reports",
    "confusion_matrix",
    "evaluate",
    "make_folds",
    "parse_recipe",
    "per_label_report",
    "run_cv",
    "run_fold",
    "stratified_split",
    "weighted_f1_score",
    "weighted_metrics",
]
