from __future__ import annotations

from functools import lru_cache
from importlib import resources

from ..features.tfidf import analyze
from ..validation import TaggedText

VARIANTS = ("none", "remove_stopwords", "stemming", "lemmatization")


def _data_lines(name: str) -> list[str]:
    text = resources.files("riskfusion.baselines").joinpath(f"data/{name}").read_text("utf-8")
    return [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    return frozenset(ln.strip() for ln in _data_lines("stopwords_en.txt"))


@lru_cache(maxsize=1)
def _lemma_lexicon() -> dict[str, str]:
    out = {}
    for ln in _data_lines("lemmas_en.tsv"):
        form, lemma = ln.split("\t")
        out[form.strip()] = lemma.strip()
    return out


@lru_cache(maxsize=1)
def _porter():
    from nltk.stem.porter import PorterStemmer

    return PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)


def stem(token: str) -> str:
    return _porter().stem(token)


def lemmatize(token: str) -> str:
    """Lexicon lookup, then conservative noun-plural rules."""
    lex = _lemma_lexicon()
    if token in lex:
        return lex[token]
    if len(token) > 4 and token.endswith("ies"):
        return token[:-3] + "y"
    if len(token) > 4 and token.endswith(("sses", "shes", "ches", "xes")):
        return token[:-2]
    if len(token) > 3 and token.endswith("s") and not token.endswith(("ss", "us", "is")):
        return token[:-1]
    return token


def preprocess_variant(text: str, variant: str = "none") -> str:
    """Apply one preprocessing variant; anything but ``"none"`` returns
    space-joined case-folded tokens."""
    if variant == "none":
        return text
    toks = analyze(text)
    if variant == "remove_stopwords":
        sw = stopwords()
        toks = [t for t in toks if t not in sw]
    elif variant == "stemming":
        toks = [stem(t) for t in toks]
    elif variant == "lemmatization":
        toks = [lemmatize(t) for t in toks]
    else:
        raise ValueError(f"unknown preprocessing variant {variant!r}; expected one of {VARIANTS}")
    out = " ".join(toks)
    if isinstance(text, TaggedText):
        return TaggedText(out, text.split, text.source_id)
    return out
