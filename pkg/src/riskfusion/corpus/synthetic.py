"""Keyword-planted synthetic corpora for hermetic end-to-end runs.

Every post mixes neutral filler words with a few keywords drawn from a
vocabulary owned by its label, so the four levels are linearly separable
by construction. No real data is involved.
"""

from __future__ import annotations

import numpy as np

from .types import LEVELS, LabeledPost, Post, RiskLevel

# label shares of the reference distribution
DEFAULT_PROPORTIONS = {RiskLevel.IN: 0.2821, RiskLevel.ID: 0.4528, RiskLevel.BR: 0.1797, RiskLevel.AT: 0.0854}

FILLER = (
    "today work home friend family school night morning week people time life thing "
    "really just maybe feel think know think still always never sometimes talk said "
    "tired sleep food music game phone room city weather year month weekend class job"
).split()

KEYWORDS = {
    RiskLevel.IN: "lonely stressed anxious overwhelmed numb empty worthless sad".split(),
    RiskLevel.ID: "disappear vanish wishgone endit nopoint dontwake giveup goodbye".split(),
    RiskLevel.BR: "planned pills rope bridge cutting burning scheduled arranged".split(),
    RiskLevel.AT: "hospital survived overdosed icu paramedics stomach pumped relapse".split(),
}


def label_counts(n: int, proportions=None) -> dict[RiskLevel, int]:
    """Largest-remainder apportionment of ``n`` posts to levels."""
    proportions = proportions or DEFAULT_PROPORTIONS
    total = sum(proportions.values())
    exact = {lvl: n * proportions[lvl] / total for lvl in LEVELS}
    counts = {lvl: int(np.floor(v)) for lvl, v in exact.items()}
    short = n - sum(counts.values())
    for lvl in sorted(LEVELS, key=lambda l: (-(exact[l] - counts[l]), l.index))[:short]:
        counts[lvl] += 1
    return counts


def make_synthetic_corpus(
    n_posts: int = 400,
    *,
    proportions=None,
    n_users: int = 60,
    words_per_post: tuple[int, int] = (12, 30),
    keywords_per_post: tuple[int, int] = (2, 4),
    seed: int = 0,
) -> list[LabeledPost]:
    rng = np.random.default_rng(seed)
    counts = label_counts(n_posts, proportions)
    labels = [lvl for lvl in LEVELS for _ in range(counts[lvl])]
    rng.shuffle(labels)
    out = []
    for i, lvl in enumerate(labels):
        n_words = int(rng.integers(words_per_post[0], words_per_post[1] + 1))
        n_kw = int(rng.integers(keywords_per_post[0], keywords_per_post[1] + 1))
        words = list(rng.choice(FILLER, size=n_words))
        kws = rng.choice(KEYWORDS[lvl], size=n_kw)
        for kw in kws:
            words.insert(int(rng.integers(0, len(words) + 1)), str(kw))
        cut = max(2, len(words) // 5)
        post = Post(
            id=f"syn{i:05d}",
            user_id=f"u{int(rng.integers(0, n_users)):03d}",
            title=" ".join(words[:cut]),
            body=" ".join(words[cut:]) + ".",
        )
        out.append(LabeledPost(post, lvl))
    return out
