"""Training-split text augmentation."""

from .tables import ExpansionTable, load_abbreviation_table, load_emoji_table
from .transforms import (
    AugmentationPlan,
    Augmenter,
    AugmentResult,
    LeadSummarizer,
    apply_plan,
    back_translate,
    expand_abbreviations,
    expand_emojis,
    summarize_to_limit,
)
from .translation import HttpTranslator, IdentityTranslator, ReplayTranslator

__all__ = [
    "AugmentResult",
    "AugmentationPlan",
    "Augmenter",
    "ExpansionTable",
    "HttpTranslator",
    "IdentityTranslator",
    "LeadSummarizer",
    "ReplayTranslator",
    "apply_plan",
    "back_translate",
    "expand_abbreviations",
    "expand_emojis",
    "load_abbreviation_table",
    "load_emoji_table",
    "summarize_to_limit",
]
