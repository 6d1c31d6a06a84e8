from __future__ import annotations

import zlib

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ..exceptions import DomainError
from ..validation import check_texts, check_train_only
from .tfidf import analyze


def _stable_hash(s: str) -> int:
    # gensim seeds vectors with hash(word + seed); the builtin is salted per process
    return zlib.crc32(s.encode("utf-8"))


class Word2VecEmbedder(BaseEstimator, TransformerMixin):
    """Skip-gram word vectors (gensim) averaged into document vectors.

    Out-of-vocabulary tokens are ignored; a document with no known token maps
    to the zero vector.
    """

    def __init__(self, vector_size=1000, window=5, min_count=1, epochs=10, negative=5, random_state=0):
        self.vector_size = vector_size
        self.window = window
        self.min_count = min_count
        self.epochs = epochs
        self.negative = negative
        self.random_state = random_state

    def fit(self, X, y=None):
        from gensim.models import Word2Vec

        X = check_texts(X)
        check_train_only(X, "Word2VecEmbedder.fit")
        if not X:
            raise DomainError("cannot fit Word2Vec on an empty corpus")
        sentences = [analyze(t) for t in X]
        model = Word2Vec(
            sentences=[s for s in sentences if s],
            vector_size=self.vector_size,
            window=self.window,
            min_count=self.min_count,
            sg=1,
            negative=self.negative,
            epochs=self.epochs,
            seed=self.random_state,
            workers=1,
            hashfxn=_stable_hash,
        )
        self.table_ = {w: np.asarray(model.wv[w], dtype=float) for w in model.wv.index_to_key}
        self.dim_ = self.vector_size
        return self

    @classmethod
    def from_table(cls, table: dict, **params) -> "Word2VecEmbedder":
        obj = cls(**params)
        obj.table_ = {w: np.asarray(v, dtype=float) for w, v in table.items()}
        obj.dim_ = len(next(iter(obj.table_.values()))) if obj.table_ else obj.vector_size
        return obj

    def embed_doc(self, text: str) -> np.ndarray:
        check_is_fitted(self, "table_")
        vecs = [self.table_[t] for t in analyze(text) if t in self.table_]
        if not vecs:
            return np.zeros(self.dim_)
        return np.mean(vecs, axis=0)

    def transform(self, X):
        check_is_fitted(self, "table_")
        X = check_texts(X)
        out = np.zeros((len(X), self.dim_))
        for r, t in enumerate(X):
            out[r] = self.embed_doc(t)
        return out
