"""Data model, corpus I/O, statistics, agreement and Reddit collection."""

from .agreement import fleiss_kappa, resolve_labels
from .io import load_annotations, load_corpus, write_corpus
from .scrape import ReplayTransport, RedditClient, ScrapeConfig, Scraper, scrape_reddit
from .stats import compute_stats, count_word_tokens, word_tokens
from .synthetic import DEFAULT_PROPORTIONS, label_counts, make_synthetic_corpus
from .types import LEVELS, N_LEVELS, AnnotationSet, CorpusStats, LabeledPost, Post, RiskLevel

__all__ = [
    "LEVELS",
    "N_LEVELS",
    "AnnotationSet",
    "CorpusStats",
    "LabeledPost",
    "Post",
    "RedditClient",
    "ReplayTransport",
    "RiskLevel",
    "ScrapeConfig",
    "Scraper",
    "compute_stats",
    "count_word_tokens",
    "fleiss_kappa",
    "load_annotations",
    "load_corpus",
    "make_synthetic_corpus",
    "label_counts",
    "DEFAULT_PROPORTIONS",
    "resolve_labels",
    "scrape_reddit",
    "word_tokens",
    "write_corpus",
]
