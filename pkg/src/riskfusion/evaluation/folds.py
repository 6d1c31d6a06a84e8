from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import DomainError


@dataclass(frozen=True)
class Fold:
    index: int
    test_ids: tuple[str, ...]
    train_ids: tuple[str, ...]
    val_ids: tuple[str, ...]


@dataclass(frozen=True)
class FoldPlan:
    k: int
    seed: int
    folds: tuple[Fold, ...]

    @property
    def fold_assignments(self) -> dict[str, int]:
        return {pid: f.index for f in self.folds for pid in f.test_ids}

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "seed": self.seed,
            "folds": [
                {"index": f.index, "test": list(f.test_ids), "train": list(f.train_ids), "val": list(f.val_ids)}
                for f in self.folds
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FoldPlan":
        folds = tuple(
            Fold(f["index"], tuple(f["test"]), tuple(f["train"]), tuple(f["val"])) for f in d["folds"]
        )
        return cls(d["k"], d["seed"], folds)


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def stratified_split(ids, labels, fraction: float, rng) -> tuple[list, list]:
    """Split ``ids`` into (rest, held) with ``held`` ~ ``fraction`` of each label.

    The held-out total is ``round(fraction * n)``, apportioned across labels
    by largest remainder, so every label's held count is within 1 of its
    exact share.
    """
    n = len(ids)
    by_label: dict = {}
    for pid, y in zip(ids, labels):
        by_label.setdefault(y, []).append(pid)
    keys = sorted(by_label, key=lambda y: str(y))
    exact = {y: fraction * len(by_label[y]) for y in keys}
    held_n = {y: int(np.floor(exact[y])) for y in keys}
    short = _round_half_up(fraction * n) - sum(held_n.values())
    for y in sorted(keys, key=lambda y: (-(exact[y] - held_n[y]), str(y)))[: max(short, 0)]:
        held_n[y] += 1
    rest, held = [], []
    for y in keys:
        members = list(by_label[y])
        order = rng.permutation(len(members))
        chosen = {members[i] for i in order[: held_n[y]]}
        for pid in members:
            (held if pid in chosen else rest).append(pid)
    return rest, held


def make_folds(corpus, k: int = 5, seed: int = 0, val_fraction: float = 0.2) -> FoldPlan:
    """Seeded, label-agnostic k-fold partition with stratified inner splits.

    Posts are shuffled and cut into ``k`` contiguous, near-equal folds (the
    first ``n % k`` folds get one extra post). For each fold the remaining
    posts are split into train/val with ``val_fraction`` held out per label.
    """
    n = len(corpus)
    if k < 2:
        raise ValueError("k must be >= 2")
    if n < k:
        raise DomainError(f"corpus of {n} posts is smaller than k={k}")
    ids = [s.id for s in corpus]
    if len(set(ids)) != n:
        raise DomainError("corpus ids are not unique")
    label_of = {s.id: s.label for s in corpus}
    rng = np.random.default_rng(seed)
    order = [ids[i] for i in rng.permutation(n)]
    chunks = np.array_split(np.arange(n), k)
    folds = []
    for f, chunk in enumerate(chunks):
        test = [order[i] for i in chunk]
        test_set = set(test)
        rest_ids = [pid for pid in order if pid not in test_set]
        train, val = stratified_split(rest_ids, [label_of[p] for p in rest_ids], val_fraction, rng)
        folds.append(Fold(f, tuple(test), tuple(train), tuple(val)))
    return FoldPlan(k, seed, tuple(folds))
