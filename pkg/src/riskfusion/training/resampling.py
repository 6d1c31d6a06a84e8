"""Over- and under-sampling to a balanced training split.

Both operate on any sequence of samples exposing ``.label`` (or on a
parallel label list via ``labels=``) and return a new list; the input is
never modified.
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from ..corpus.types import LEVELS, RiskLevel
from ..exceptions import DomainError

STRATEGIES = ("original", "oversample", "undersample", "weighted_loss")


def _group(samples, labels, categories):
    labels = [s.label for s in samples] if labels is None else list(labels)
    groups = defaultdict(list)
    for i, y in enumerate(labels):
        groups[y].append(i)
    categories = list(categories) if categories is not None else LEVELS
    empty = [c for c in categories if not groups.get(c)]
    if empty:
        names = ", ".join(c.value if isinstance(c, RiskLevel) else str(c) for c in empty)
        raise DomainError(f"resampling needs every category present; empty: {names}")
    return groups, categories


def oversample(samples, seed=0, labels=None, categories=None) -> list:
    """Grow every category to the largest category's size.

    Each category is repeated whole ``target // n`` times and topped up with
    ``target % n`` of its members drawn without replacement, so every
    original sample is retained.
    """
    groups, categories = _group(samples, labels, categories)
    rng = np.random.default_rng(seed)
    target = max(len(groups[c]) for c in categories)
    chosen = []
    for c in categories:
        idx = groups[c]
        reps, rem = divmod(target, len(idx))
        chosen.extend(idx * reps)
        if rem:
            chosen.extend(int(i) for i in rng.choice(idx, size=rem, replace=False))
    return [samples[i] for i in sorted(chosen)]


def undersample(samples, seed=0, labels=None, categories=None) -> list:
    """Shrink every category to the smallest category's size, without replacement."""
    groups, categories = _group(samples, labels, categories)
    rng = np.random.default_rng(seed)
    target = min(len(groups[c]) for c in categories)
    chosen = []
    for c in categories:
        chosen.extend(int(i) for i in rng.choice(groups[c], size=target, replace=False))
    return [samples[i] for i in sorted(chosen)]


def resample(samples, strategy: str, seed=0) -> list:
    if strategy == "oversample":
        return oversample(samples, seed)
    if strategy == "undersample":
        return undersample(samples, seed)
    if strategy in ("original", "weighted_loss"):
        return list(samples)
    raise ValueError(f"unknown resampling strategy {strategy!r}")
