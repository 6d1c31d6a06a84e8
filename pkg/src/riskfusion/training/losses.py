"""Softmax head, cross-entropy losses and their analytic gradients."""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np

from ..corpus.types import LEVELS, N_LEVELS, RiskLevel
from ..exceptions import DomainError, NumericError, ShapeError

PROB_FLOOR = 1e-12


def softmax(logits) -> np.ndarray:
    z = np.asarray(logits, dtype=float)
    if not np.all(np.isfinite(z)):
        raise NumericError("non-finite logits")
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def forward(x, weights, bias) -> np.ndarray:
    """``softmax(weights @ x + bias)``; ``x`` may be one vector or a batch of rows."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise NumericError("non-finite input features")
    if x.shape[-1] != weights.shape[1]:
        raise ShapeError(f"input width {x.shape[-1]} does not match head width {weights.shape[1]}")
    return softmax(x @ weights.T + bias)


def _label_indices(labels) -> np.ndarray:
    return np.array([RiskLevel.parse(y).index if not isinstance(y, (int, np.integer)) else int(y) for y in labels])


def weighted_ce_loss(probs, labels, weights=None) -> float:
    """``-(1/D) * sum_i w[y_i] * log p_i[y_i]``, probabilities floored at 1e-12."""
    probs = np.asarray(probs, dtype=float)
    y = _label_indices(labels)
    if probs.ndim != 2 or probs.shape[0] != len(y):
        raise ShapeError(f"probs shape {probs.shape} does not match {len(y)} labels")
    w = np.ones(probs.shape[1]) if weights is None else np.asarray(weights, dtype=float)
    picked = np.maximum(probs[np.arange(len(y)), y], PROB_FLOOR)
    return float(-np.sum(w[y] * np.log(picked)) / len(y))


def ce_loss(probs, labels) -> float:
    return weighted_ce_loss(probs, labels, None)


def class_weights(label_counts, D: int | None = None) -> np.ndarray:
    """Inverse-proportion weights ``D / D_c`` in severity order.

    ``label_counts`` is a mapping ``RiskLevel -> count`` or a length-4
    sequence. A category with zero count raises :class:`DomainError`.
    """
    if isinstance(label_counts, Mapping):
        counts = np.array([label_counts.get(lvl, label_counts.get(lvl.value, 0)) for lvl in LEVELS], dtype=float)
    else:
        counts = np.asarray(label_counts, dtype=float)
        if counts.shape != (N_LEVELS,):
            raise ShapeError(f"expected {N_LEVELS} counts, got shape {counts.shape}")
    if np.any(counts < 1):
        missing = [lvl.value for lvl, c in zip(LEVELS, counts) if c < 1]
        raise DomainError(f"categories absent from the training split: {', '.join(missing)}")
    D = counts.sum() if D is None else D
    return D / counts


def loss_and_grad(X, y, weights, bias, class_w=None):
    """Weighted CE of a linear softmax head and its gradient.

    Returns ``(loss, dW, db)`` for ``X`` of shape ``(D, d)`` and integer
    labels ``y``.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    D = X.shape[0]
    probs = forward(X, weights, bias)
    w = np.ones(weights.shape[0]) if class_w is None else np.asarray(class_w, dtype=float)
    loss = weighted_ce_loss(probs, y, w)
    delta = probs.copy()
    delta[np.arange(D), y] -= 1.0
    delta *= (w[y] / D)[:, None]
    return loss, delta.T @ X, delta.sum(axis=0)
