from __future__ import annotations

import re
from collections import Counter
from typing import Sequence

from ..exceptions import DomainError
from .types import LEVELS, LabeledPost, Post

# Latin letters (ASCII, Latin-1 letters without the two math signs, Latin
# Extended-A/B, Latin Extended Additional), ASCII digits, underscore.
_TOKEN_CLASS = "0-9A-Za-z_À-ÖØ-öø-ɏḀ-ỿ"
TOKEN_RE = re.compile(f"[{_TOKEN_CLASS}]+")


def word_tokens(text: str) -> list[str]:
    return TOKEN_RE.findall(text)


def count_word_tokens(text: str) -> int:
    """Count maximal runs of Latin letters, digits and underscores.

    >>> count_word_tokens("I can't go_on 123 \\N{CRYING FACE}!")
    5
    """
    return sum(1 for _ in TOKEN_RE.finditer(text))


def compute_stats(corpus: Sequence[Post | LabeledPost]):
    from .types import CorpusStats

    if not corpus:
        raise DomainError("cannot compute statistics of an empty corpus")
    users = set()
    vocab = set()
    n_tokens = 0
    labels = Counter()
    for rec in corpus:
        post = rec.post if isinstance(rec, LabeledPost) else rec
        users.add(post.user_id)
        toks = word_tokens(post.all_text())
        n_tokens += len(toks)
        vocab.update(t.casefold() for t in toks)
        if isinstance(rec, LabeledPost):
            labels[rec.label] += 1
    n_labeled = sum(labels.values())
    counts = {lvl: labels.get(lvl, 0) for lvl in LEVELS}
    props = {lvl: (c / n_labeled if n_labeled else 0.0) for lvl, c in counts.items()}
    return CorpusStats(
        n_posts=len(corpus),
        n_users=len(users),
        n_distinct_tokens=len(vocab),
        n_tokens=n_tokens,
        avg_tokens_per_post=n_tokens / len(corpus),
        label_counts=counts,
        label_proportions=props,
    )
