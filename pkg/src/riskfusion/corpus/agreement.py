"""Inter-annotator agreement and label reconciliation."""

from __future__ import annotations

import numpy as np

from ..exceptions import DomainError, UndefinedAgreementError
from .types import LEVELS, AnnotationSet, RiskLevel


def fleiss_kappa(annotations: AnnotationSet) -> float:
    """Fleiss' kappa over the four risk categories.

    Raises
    ------
    UndefinedAgreementError
        When expected agreement is 1, i.e. every rating falls in a single
        category and kappa is 0/0.
    """
    if annotations.n_items < 2 or annotations.n_annotators < 2:
        raise DomainError("Fleiss' kappa needs at least 2 items and 2 annotators")
    counts = annotations.counts().astype(float)
    n = annotations.n_annotators
    n_items = counts.shape[0]

    p_item = (np.sum(counts**2, axis=1) - n) / (n * (n - 1))
    p_bar = p_item.mean()
    p_cat = counts.sum(axis=0) / (n_items * n)
    p_e = float(np.sum(p_cat**2))
    if np.isclose(p_e, 1.0, rtol=0, atol=1e-15):
        raise UndefinedAgreementError("all ratings fall in one category; kappa is undefined")
    return float((p_bar - p_e) / (1.0 - p_e))


def resolve_labels(annotations: AnnotationSet) -> dict[str, RiskLevel]:
    """Majority vote per item; ties go to the more severe level."""
    out = {}
    for item_id, row in zip(annotations.item_ids, annotations.counts()):
        top = row.max()
        # scan from most severe down so ties escalate
        winner = next(lvl for lvl in reversed(LEVELS) if row[lvl.index] == top)
        out[item_id] = winner
    return out
