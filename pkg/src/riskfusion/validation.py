"""Input validation helpers and split provenance tags.

Texts travelling through the cross-validation harness are wrapped in
:class:`TaggedText`, a ``str`` subclass that remembers which split it came
from. Every fitted transform calls :func:`check_train_only` on its input so a
test or validation sample can never leak into fitted statistics. Plain
``str`` input is untagged and accepted, which keeps the estimators usable
outside the harness.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .exceptions import LeakageError, ShapeError

TRAIN = "train"
VAL = "val"
TEST = "test"
SPLITS = (TRAIN, VAL, TEST)


class TaggedText(str):
    """A string carrying split provenance."""

    split: str | None
    source_id: str | None

    def __new__(cls, value: str, split: str | None = None, source_id: str | None = None):
        if split is not None and split not in SPLITS:
            raise ValueError(f"unknown split tag {split!r}")
        obj = super().__new__(cls, value)
        obj.split = split
        obj.source_id = source_id
        return obj

    def __reduce__(self):
        return (TaggedText, (str(self), self.split, self.source_id))


def split_of(obj) -> str | None:
    if isinstance(obj, TaggedText):
        return obj.split
    if isinstance(obj, str):
        return None
    sp = getattr(obj, "split", None)
    return sp if isinstance(sp, str) else None


def tag(texts: Iterable[str], split: str, ids: Iterable[str] | None = None) -> list[TaggedText]:
    if ids is None:
        return [TaggedText(t, split) for t in texts]
    return [TaggedText(t, split, i) for t, i in zip(texts, ids)]


def check_train_only(samples: Iterable, what: str = "fit") -> None:
    """Raise :class:`LeakageError` if any sample is tagged with a non-train split."""
    for i, s in enumerate(samples):
        sp = split_of(s)
        if sp is not None and sp != TRAIN:
            raise LeakageError(f"{what} received a {sp}-tagged sample at position {i}")


def check_split_tags(tags, what: str = "fit") -> None:
    """Like :func:`check_train_only` for a sequence of bare tag strings
    (``"train"``, ``"val"``, ``"test"`` or ``None``) or tagged texts."""
    for i, t in enumerate(tags):
        sp = t.split if isinstance(t, TaggedText) else t
        if sp is not None and sp != TRAIN:
            raise LeakageError(f"{what} received a {sp}-tagged sample at position {i}")


def check_texts(X) -> list[str]:
    if isinstance(X, str):
        raise TypeError("expected an iterable of texts, got a single string")
    X = list(X)
    for i, t in enumerate(X):
        if not isinstance(t, str):
            raise TypeError(f"element {i} is {type(t).__name__}, expected str")
    return X


def check_vector(v, dim: int, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != dim:
        raise ShapeError(f"{name} must have shape ({dim},), got {arr.shape}")
    return arr


def check_matrix(X, n_features: int | None = None, name: str = "X") -> np.ndarray:
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if n_features is not None and arr.shape[1] != n_features:
        raise ShapeError(f"{name} has {arr.shape[1]} features, expected {n_features}")
    return arr


def check_same_length(a: Sequence, b: Sequence, names=("a", "b")) -> None:
    if len(a) != len(b):
        raise ShapeError(f"{names[0]} has length {len(a)} but {names[1]} has length {len(b)}")
