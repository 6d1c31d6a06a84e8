from __future__ import annotations

import math
from collections import Counter

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ..corpus.stats import word_tokens
from ..exceptions import DomainError
from ..validation import check_texts, check_train_only

FORMAT_VERSION = 1


def analyze(text: str) -> list[str]:
    """Case-folded word tokens under the corpus token rule."""
    return [t.casefold() for t in word_tokens(text)]


class TfidfVectorizer(BaseEstimator, TransformerMixin):
    """Raw-count TF with smoothed IDF and L2-normalised rows.

    ``idf(t) = ln((1 + n_docs) / (1 + df(t))) + 1``. The vocabulary keeps the
    ``max_features`` terms with the largest summed TF-IDF weight over the
    training documents (computed on the full vocabulary), ties broken
    lexicographically. Output rows are re-normalised over the kept terms, so
    every non-zero row has unit norm.

    Parameters
    ----------
    max_features : int, default=3000
        Vocabulary cap.
    analyzer : callable, optional
        ``str -> list[str]``; defaults to the corpus token rule, case-folded.
    """

    def __init__(self, max_features=3000, analyzer=None):
        self.max_features = max_features
        self.analyzer = analyzer

    def _analyze(self, text):
        return (self.analyzer or analyze)(text)

    def fit(self, X, y=None):
        X = check_texts(X)
        check_train_only(X, "TfidfVectorizer.fit")
        if not X:
            raise DomainError("cannot fit TF-IDF on an empty corpus")
        if self.max_features < 1:
            raise ValueError("max_features must be >= 1")

        docs = [Counter(self._analyze(t)) for t in X]
        n_docs = len(docs)
        df = Counter()
        for d in docs:
            df.update(d.keys())
        terms = sorted(df)
        idf = {t: math.log((1 + n_docs) / (1 + df[t])) + 1.0 for t in terms}

        # fsum keeps the ranking independent of document order
        contributions: dict[str, list[float]] = {t: [] for t in terms}
        for d in docs:
            weights = {t: c * idf[t] for t, c in d.items()}
            norm = math.sqrt(math.fsum(w * w for w in weights.values()))
            if norm == 0:
                continue
            for t, w in weights.items():
                contributions[t].append(w / norm)
        mass = {t: math.fsum(v) for t, v in contributions.items()}

        ranked = sorted(terms, key=lambda t: (-mass[t], t))[: self.max_features]
        self.vocabulary_ = ranked
        self.term_index_ = {t: i for i, t in enumerate(ranked)}
        self.idf_ = np.array([idf[t] for t in ranked])
        self.n_docs_ = n_docs
        return self

    @property
    def n_features_out_(self) -> int:
        return len(self.vocabulary_)

    def transform(self, X):
        """Return a CSR matrix of shape ``(n_texts, len(vocabulary_))``."""
        check_is_fitted(self, "vocabulary_")
        X = check_texts(X)
        rows, cols, vals = [], [], []
        for r, text in enumerate(X):
            counts = Counter(t for t in self._analyze(text) if t in self.term_index_)
            if not counts:
                continue
            idx = np.array([self.term_index_[t] for t in counts])
            w = np.array(list(counts.values()), dtype=float) * self.idf_[idx]
            w /= np.linalg.norm(w)
            rows.extend([r] * len(idx))
            cols.extend(idx.tolist())
            vals.extend(w.tolist())
        return sp.csr_matrix((vals, (rows, cols)), shape=(len(X), self.n_features_out_))

    def transform_one(self, text: str) -> sp.csr_matrix:
        return self.transform([text])

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "vocabulary_")
        return np.array(self.vocabulary_, dtype=object)

    def to_dict(self) -> dict:
        check_is_fitted(self, "vocabulary_")
        return {
            "kind": "tfidf",
            "version": FORMAT_VERSION,
            "max_features": self.max_features,
            "n_docs": self.n_docs_,
            "terms": list(self.vocabulary_),
            "idf": self.idf_.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TfidfVectorizer":
        if d.get("kind") != "tfidf" or d.get("version") != FORMAT_VERSION:
            raise ValueError("not a version-1 TF-IDF artifact")
        obj = cls(max_features=d["max_features"])
        obj.vocabulary_ = list(d["terms"])
        obj.term_index_ = {t: i for i, t in enumerate(obj.vocabulary_)}
        obj.idf_ = np.asarray(d["idf"], dtype=float)
        obj.n_docs_ = d["n_docs"]
        return obj
