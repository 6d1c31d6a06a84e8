from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from functools import lru_cache

from ..corpus.types import LabeledPost, Post
from ..exceptions import AugmentationError, ContractViolation, LeakageError, TransportError
from ..validation import TRAIN
from .tables import ExpansionTable, load_abbreviation_table, load_emoji_table
from .translation import IdentityTranslator

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AugmentationPlan:
    abbrev: bool = False
    emoji: bool = False
    summarize: bool = False
    back_translate: bool = False
    pivot: str = "es"
    source_language: str = "en"
    summary_limit: int = 512

    def __post_init__(self):
        if self.summary_limit < 1:
            raise ValueError("summary_limit must be >= 1")
        if self.pivot == self.source_language:
            raise ValueError("pivot language must differ from the source language")

    @property
    def any_enabled(self) -> bool:
        return self.abbrev or self.emoji or self.summarize or self.back_translate


# abbreviations ---------------------------------------------------------------


@lru_cache(maxsize=8)
def _abbrev_pattern(keys: tuple[str, ...]):
    alts = "|".join(re.escape(k) for k in sorted(keys, key=lambda k: (-len(k), k)))
    return re.compile(rf"(?<!\w)(?:{alts})(?!\w)", re.IGNORECASE)


def expand_abbreviations_count(text: str, table: ExpansionTable) -> tuple[str, int]:
    if not len(table):
        return text, 0
    pattern = _abbrev_pattern(tuple(table.entries))
    return pattern.subn(lambda m: table.lookup(m.group(0)), text)


def expand_abbreviations(text: str, table: ExpansionTable | None = None) -> str:
    """Replace whole-token abbreviations case-insensitively in one pass."""
    table = table if table is not None else default_abbreviations()
    return expand_abbreviations_count(text, table)[0]


# emoji -------------------------------------------------------------------------

_EMOJI_CHARS = (
    "\U0001F000-\U0001FAFF"
    "\u2300-\u23ff"
    "\u2600-\u27bf"
    "\u2b00-\u2bff"
    "\ufe0f\u200d\u20e3"
    "\U000E0020-\U000E007F"
)
_MODIFIERS = set("\ufe0f\u200d\u20e3") | {chr(c) for c in range(0x1F3FB, 0x1F400)} | {
    chr(c) for c in range(0xE0020, 0xE0080)
}
_EMOJI_RUN = re.compile(f"[ \\t]*[{_EMOJI_CHARS}]+[ \\t]*")
_NO_SPACE_BEFORE = set(".,!?;:)]}\"'")


def _decompose(run: str, table: ExpansionTable) -> tuple[list[str], int]:
    """Greedy longest-match of a run of emoji characters against ``table``."""
    phrases, events, i = [], 0, 0
    longest = table.max_key_length
    while i < len(run):
        for L in range(min(longest, len(run) - i), 0, -1):
            hit = table.lookup(run[i : i + L])
            if hit is not None:
                phrases.append(hit)
                events += 1
                i += L
                break
        else:
            if run[i] in _MODIFIERS:
                i += 1
                continue
            # unmapped: drop the base character with any trailing modifiers / ZWJ joins
            i += 1
            while i < len(run) and (run[i] in _MODIFIERS or (i > 0 and run[i - 1] == "\u200d")):
                i += 1
            events += 1
    return phrases, events


def expand_emojis_count(text: str, table: ExpansionTable) -> tuple[str, int]:
    out, pos, events = [], 0, 0
    for m in _EMOJI_RUN.finditer(text):
        core = m.group(0).strip(" \t")
        phrases, n = _decompose(core, table)
        if n == 0:
            continue
        events += n
        out.append(text[pos : m.start()])
        before = m.start() > 0 and text[m.start() - 1] != "\n"
        after = m.end() < len(text) and text[m.end()] != "\n"
        if phrases:
            rep = " ".join(phrases)
            if before:
                rep = " " + rep
            if after and text[m.end()] not in _NO_SPACE_BEFORE:
                rep += " "
        else:
            rep = " " if before and after and text[m.end()] not in _NO_SPACE_BEFORE else ""
        out.append(rep)
        pos = m.end()
    out.append(text[pos:])
    return "".join(out), events


def expand_emojis(text: str, table: ExpansionTable | None = None) -> str:
    """Replace mapped emoji with their phrase and drop unmapped emoji."""
    table = table if table is not None else default_emojis()
    return expand_emojis_count(text, table)[0]


# summarisation -----------------------------------------------------------------

_SENTENCE_END = re.compile(r"(?<=[.!?])\s+|\n+")


def split_sentences(text: str) -> list[str]:
    return [s.strip() for s in _SENTENCE_END.split(text) if s and s.strip()]


class LeadSummarizer:
    """Extractive lead selection: whole sentences in order while they fit."""

    def summarize(self, text: str, limit: int, count_tokens) -> str:
        kept: list[str] = []
        for sent in split_sentences(text):
            candidate = " ".join(kept + [sent])
            if count_tokens(candidate) > limit:
                break
            kept.append(sent)
        if kept:
            return " ".join(kept)
        # the first sentence alone is too long: keep its longest fitting word prefix
        words = split_sentences(text)[0].split() if text.strip() else []
        lo, hi = 0, len(words)
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if count_tokens(" ".join(words[:mid])) <= limit:
                lo = mid
            else:
                hi = mid - 1
        return " ".join(words[:lo])


def _default_counter():
    from ..features.encoders import StubEncoder

    return StubEncoder().count_tokens


def summarize_to_limit(text: str, limit: int = 512, summarizer=None, count_tokens=None) -> str:
    """Return ``text`` unchanged if it fits in ``limit`` encoder tokens,
    otherwise the summarizer's output, which must fit."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    count_tokens = count_tokens or _default_counter()
    if count_tokens(text) <= limit:
        return text
    summarizer = summarizer or LeadSummarizer()
    out = summarizer.summarize(text, limit, count_tokens)
    n = count_tokens(out)
    if n > limit:
        raise ContractViolation(f"summarizer returned {n} tokens, limit is {limit}")
    return out


# back-translation --------------------------------------------------------------


def back_translate(text: str, pivot: str = "es", client=None, source: str = "en") -> str:
    client = client or IdentityTranslator()
    forward = client.translate(text, source, pivot)
    back = client.translate(forward, pivot, source)
    if not back or not back.strip():
        raise AugmentationError("translation client returned empty text")
    return back


# plan --------------------------------------------------------------------------


@lru_cache(maxsize=1)
def default_abbreviations() -> ExpansionTable:
    return load_abbreviation_table()


@lru_cache(maxsize=1)
def default_emojis() -> ExpansionTable:
    return load_emoji_table()


@dataclass
class AugmentResult:
    samples: list
    counts: Counter = field(default_factory=Counter)


def _map_post_text(post: Post, fn) -> tuple[Post, int]:
    total = 0

    def go(s):
        nonlocal total
        out, n = fn(s)
        total += n
        return out

    new = replace(
        post,
        title=go(post.title),
        body=go(post.body),
        author_comments=tuple(go(c) for c in post.author_comments),
    )
    return new, total


@dataclass
class Augmenter:
    """Applies an :class:`AugmentationPlan` to a training split.

    Fixed order: abbreviations, emoji, summarisation, back-translation.
    The first three rewrite samples in place; back-translation appends a
    copy per sample carrying the original's label and an
    ``augmented_from`` link.
    """

    plan: AugmentationPlan
    abbreviations: ExpansionTable | None = None
    emojis: ExpansionTable | None = None
    summarizer: object = None
    translator: object = None
    count_tokens: object = None

    def apply(self, train_set) -> AugmentResult:
        plan = self.plan
        for s in train_set:
            if s.split not in (None, TRAIN):
                raise LeakageError(f"augmentation received {s.split}-tagged sample {s.id!r}")
        counts = Counter()
        abbr = self.abbreviations if self.abbreviations is not None else default_abbreviations()
        emo = self.emojis if self.emojis is not None else default_emojis()
        counter = self.count_tokens or _default_counter()
        out = []
        for s in train_set:
            post = s.post
            if plan.abbrev:
                post, n = _map_post_text(post, lambda t: expand_abbreviations_count(t, abbr))
                counts["abbrev"] += n
            if plan.emoji:
                post, n = _map_post_text(post, lambda t: expand_emojis_count(t, emo))
                counts["emoji"] += n
            if plan.summarize:
                text = post.text
                short = summarize_to_limit(text, plan.summary_limit, self.summarizer, counter)
                if short != text:
                    post = replace(post, title="", body=short, author_comments=())
                    counts["summarize"] += 1
            out.append(replace(s, post=post) if post is not s.post else s)

        if plan.back_translate:
            client = self.translator or IdentityTranslator()
            extra, seen = [], Counter()
            for s in out:
                try:
                    text = back_translate(s.text, plan.pivot, client, plan.source_language)
                except (TransportError, AugmentationError) as exc:
                    log.warning("back-translation skipped for %s: %s", s.id, exc)
                    counts["back_translate_skipped"] += 1
                    continue
                seen[s.id] += 1
                new_post = replace(
                    s.post,
                    id=f"{s.id}~bt{seen[s.id]}-{plan.pivot}",
                    title="",
                    body=text,
                    author_comments=(),
                )
                extra.append(LabeledPost(new_post, s.label, split=s.split, augmented_from=s.id))
            counts["back_translate"] += len(extra)
            out.extend(extra)
        return AugmentResult(out, counts)


def apply_plan(train_set, plan: AugmentationPlan, **kwargs) -> AugmentResult:
    return Augmenter(plan, **kwargs).apply(train_set)
