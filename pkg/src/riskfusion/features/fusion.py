from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ..exceptions import ShapeError
from ..validation import check_texts, check_train_only, split_of
from .encoders import ENCODER_DIM, MAX_ENCODER_TOKENS, StubEncoder
from .pca import PCA
from .tfidf import TfidfVectorizer


@dataclass(frozen=True)
class FeatureConfig:
    max_features: int = 3000
    n_components: int = 300
    encoder_dim: int = ENCODER_DIM
    max_encoder_tokens: int = MAX_ENCODER_TOKENS
    word2vec_dim: int = 1000

    def __post_init__(self):
        if not 1 <= self.n_components <= self.max_features:
            raise ValueError(f"need 1 <= n_components <= max_features, got {self.n_components}, {self.max_features}")
        if self.encoder_dim != ENCODER_DIM:
            raise ValueError(f"encoder_dim must be {ENCODER_DIM} for the supported checkpoint family")
        if self.max_encoder_tokens < 1 or self.word2vec_dim < 1:
            raise ValueError("max_encoder_tokens and word2vec_dim must be positive")

    @property
    def fused_dim(self) -> int:
        return self.encoder_dim + self.n_components


def fuse(embedding, pca_vec, encoder_dim: int = ENCODER_DIM, n_components: int | None = None) -> np.ndarray:
    """Concatenate an encoder embedding with a PCA vector.

    The embedding occupies ``[0, encoder_dim)`` and the PCA vector the
    following ``n_components`` positions. Works row-wise on 2-D input.
    """
    e = np.asarray(embedding, dtype=float)
    p = np.asarray(pca_vec, dtype=float)
    if e.shape[-1] != encoder_dim:
        raise ShapeError(f"embedding has width {e.shape[-1]}, expected {encoder_dim}")
    if n_components is not None and p.shape[-1] != n_components:
        raise ShapeError(f"PCA vector has width {p.shape[-1]}, expected {n_components}")
    if e.ndim != p.ndim or (e.ndim == 2 and e.shape[0] != p.shape[0]):
        raise ShapeError(f"cannot fuse shapes {e.shape} and {p.shape}")
    return np.concatenate([e, p], axis=-1)


def split_fused(x, encoder_dim: int = ENCODER_DIM):
    x = np.asarray(x)
    return x[..., :encoder_dim], x[..., encoder_dim:]


class HybridFeaturizer(BaseEstimator, TransformerMixin):
    """Encoder embedding concatenated with PCA-reduced TF-IDF.

    ``fit`` learns the TF-IDF vocabulary and PCA basis from training texts
    only; the encoder is used as given. With ``use_tfidf=False`` the output
    is the bare embedding (the encoder-only recipe).
    """

    def __init__(self, encoder=None, max_features=3000, n_components=300, use_tfidf=True):
        self.encoder = encoder
        self.max_features = max_features
        self.n_components = n_components
        self.use_tfidf = use_tfidf

    def fit(self, X, y=None):
        X = check_texts(X)
        check_train_only(X, "HybridFeaturizer.fit")
        self.encoder_ = self.encoder if self.encoder is not None else StubEncoder()
        if self.use_tfidf:
            self.tfidf_ = TfidfVectorizer(max_features=self.max_features).fit(X)
            self.pca_ = PCA(n_components=self.n_components)
            self.pca_.fit(self.tfidf_.transform(X), splits=[split_of(t) for t in X])
            self.n_components_ = self.pca_.n_components_
        else:
            self.tfidf_ = self.pca_ = None
            self.n_components_ = 0
        self.n_features_out_ = ENCODER_DIM + self.n_components_
        return self

    def embed(self, X) -> np.ndarray:
        check_is_fitted(self, "encoder_")
        return self.encoder_.transform(check_texts(X))

    def pca_features(self, X) -> np.ndarray:
        check_is_fitted(self, "encoder_")
        X = check_texts(X)
        if not self.use_tfidf:
            return np.zeros((len(X), 0))
        return self.pca_.transform(self.tfidf_.transform(X))

    def transform(self, X):
        X = check_texts(X)
        return fuse(self.embed(X), self.pca_features(X), n_components=self.n_components_)

    def to_dict(self) -> dict:
        check_is_fitted(self, "encoder_")
        return {
            "use_tfidf": self.use_tfidf,
            "max_features": self.max_features,
            "n_components": self.n_components,
            "n_components_fitted": self.n_components_,
            "tfidf": self.tfidf_.to_dict() if self.tfidf_ is not None else None,
            "pca": self.pca_.to_dict() if self.pca_ is not None else None,
        }

    @classmethod
    def from_dict(cls, d: dict, encoder) -> "HybridFeaturizer":
        obj = cls(encoder=encoder, max_features=d["max_features"], n_components=d["n_components"], use_tfidf=d["use_tfidf"])
        obj.encoder_ = encoder
        obj.tfidf_ = TfidfVectorizer.from_dict(d["tfidf"]) if d["tfidf"] else None
        obj.pca_ = PCA.from_dict(d["pca"]) if d["pca"] else None
        obj.n_components_ = d["n_components_fitted"]
        obj.n_features_out_ = ENCODER_DIM + obj.n_components_
        return obj

    def __sklearn_clone__(self):
        # the encoder may hold a large model; share it rather than deep-copy
        return type(self)(**self.get_params(deep=False))
