from __future__ import annotations

import functools
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Mapping, Sequence

from ..exceptions import ValidationError

EARLIEST_POST = datetime(2005, 1, 1, tzinfo=timezone.utc)

SOURCES = ("provided", "scraped")
REPRESENTATIONS = ("post_only", "post_with_comments")


@functools.total_ordering
class RiskLevel(str, Enum):
    """Four-way suicide-risk severity label.

    The ordering ``IN < ID < BR < AT`` follows severity and is used for
    reporting and tie-breaking only.
    """

    IN = "IN"  # Indicator: no explicit suicidal expression
    ID = "ID"  # Ideation: explicit expression, no plan
    BR = "BR"  # Behavior: plan or self-harm
    AT = "AT"  # Attempt: historic attempt

    @property
    def index(self) -> int:
        return _ORDER[self]

    @property
    def full_name(self) -> str:
        return _FULL_NAMES[self]

    @classmethod
    def parse(cls, value) -> "RiskLevel":
        if isinstance(value, RiskLevel):
            return value
        try:
            return cls(value)
        except ValueError:
            raise ValidationError(f"unknown risk label {value!r}; expected one of IN, ID, BR, AT") from None

    @classmethod
    def from_index(cls, i: int) -> "RiskLevel":
        return LEVELS[i]

    def __lt__(self, other):
        if not isinstance(other, RiskLevel):
            return NotImplemented
        return self.index < other.index

    def __str__(self):
        return self.value


LEVELS: tuple[RiskLevel, ...] = (RiskLevel.IN, RiskLevel.ID, RiskLevel.BR, RiskLevel.AT)
_ORDER = {lvl: i for i, lvl in enumerate(LEVELS)}
_FULL_NAMES = {
    RiskLevel.IN: "Indicator",
    RiskLevel.ID: "Ideation",
    RiskLevel.BR: "Behavior",
    RiskLevel.AT: "Attempt",
}
N_LEVELS = len(LEVELS)


@dataclass(frozen=True)
class Post:
    id: str
    user_id: str
    title: str
    body: str
    author_comments: tuple[str, ...] = ()
    created_utc: datetime | None = None
    source: str = "provided"
    representation: str = "post_only"

    def __post_init__(self):
        if not isinstance(self.author_comments, tuple):
            object.__setattr__(self, "author_comments", tuple(self.author_comments))
        if not self.id:
            raise ValidationError("post id must be non-empty")
        if not self.title and not self.body:
            raise ValidationError(f"post {self.id!r}: title and body are both empty")
        if self.source not in SOURCES:
            raise ValidationError(f"post {self.id!r}: unknown source {self.source!r}")
        if self.representation not in REPRESENTATIONS:
            raise ValidationError(f"post {self.id!r}: unknown representation {self.representation!r}")
        if self.source == "scraped" and self.created_utc is not None:
            ts = self.created_utc
            if ts.tzinfo is None:
                ts = ts.replace(tzinfo=timezone.utc)
            if not (EARLIEST_POST <= ts <= datetime.now(timezone.utc)):
                raise ValidationError(f"post {self.id!r}: created_utc {ts.isoformat()} out of range")

    @property
    def text(self) -> str:
        """Model input text: title and body, plus the author's comments for
        the ``post_with_comments`` representation."""
        parts = [self.title, self.body]
        if self.representation == "post_with_comments":
            parts.extend(self.author_comments)
        return "\n".join(p for p in parts if p)

    def all_text(self) -> str:
        return "\n".join(p for p in (self.title, self.body, *self.author_comments) if p)


@dataclass(frozen=True)
class LabeledPost:
    post: Post
    label: RiskLevel
    split: str | None = None
    augmented_from: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "label", RiskLevel.parse(self.label))

    @property
    def id(self) -> str:
        return self.post.id

    @property
    def text(self) -> str:
        return self.post.text


@dataclass(frozen=True)
class AnnotationSet:
    """Complete item x annotator rating matrix."""

    item_ids: tuple[str, ...]
    ratings: tuple[tuple[RiskLevel, ...], ...]

    def __post_init__(self):
        ids = tuple(self.item_ids)
        rows = tuple(tuple(RiskLevel.parse(r) for r in row) for row in self.ratings)
        object.__setattr__(self, "item_ids", ids)
        object.__setattr__(self, "ratings", rows)
        if len(ids) != len(rows):
            raise ValidationError(f"{len(ids)} item ids but {len(rows)} rating rows")
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            raise ValidationError(f"rating matrix is ragged: row widths {sorted(widths)}")

    @property
    def n_items(self) -> int:
        return len(self.item_ids)

    @property
    def n_annotators(self) -> int:
        return len(self.ratings[0]) if self.ratings else 0

    def counts(self):
        """Item x category count matrix."""
        import numpy as np

        out = np.zeros((self.n_items, N_LEVELS), dtype=np.int64)
        for i, row in enumerate(self.ratings):
            for r in row:
                out[i, r.index] += 1
        return out


@dataclass(frozen=True)
class CorpusStats:
    n_posts: int
    n_users: int
    n_distinct_tokens: int
    n_tokens: int
    avg_tokens_per_post: float
    label_counts: Mapping[RiskLevel, int] = field(default_factory=dict)
    label_proportions: Mapping[RiskLevel, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n_posts": self.n_posts,
            "n_users": self.n_users,
            "n_distinct_tokens": self.n_distinct_tokens,
            "n_tokens": self.n_tokens,
            "avg_tokens_per_post": self.avg_tokens_per_post,
            "label_counts": {k.value: v for k, v in self.label_counts.items()},
            "label_proportions": {k.value: v for k, v in self.label_proportions.items()},
        }


def labels_of(samples: Sequence[LabeledPost]) -> list[RiskLevel]:
    return [s.label for s in samples]
