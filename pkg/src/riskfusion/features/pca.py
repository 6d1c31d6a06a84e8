from __future__ import annotations

import warnings

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ..exceptions import DomainError, ShapeError
from ..validation import check_matrix, check_split_tags

FORMAT_VERSION = 1


class RankReductionWarning(UserWarning):
    pass


class PCA(BaseEstimator, TransformerMixin):
    """Principal components via SVD of the mean-centred training matrix.

    Components are the top right singular vectors, each flipped so its
    largest-magnitude entry is positive. ``explained_variance_`` uses the
    ``n - 1`` denominator, so it equals the sample variance of the training
    projections. If ``n_components`` exceeds the numerical rank the model
    keeps only the rank-many components and warns; it never pads.
    """

    def __init__(self, n_components=300):
        self.n_components = n_components

    def fit(self, X, y=None, splits=None):
        """Fit on ``X`` (dense or sparse, ``n x M``).

        ``splits`` optionally gives the split tag of each row, or tagged
        source texts; any non-train tag raises :class:`LeakageError`.
        """
        if splits is not None:
            check_split_tags(splits, "PCA.fit")
        if sp.issparse(X):
            X = X.toarray()
        X = check_matrix(X)
        n, m = X.shape
        if n < 2:
            raise DomainError("PCA needs at least 2 samples")
        if self.n_components < 0:
            raise ValueError("n_components must be >= 0")

        self.mean_ = X.mean(axis=0)
        centred = X - self.mean_
        _, s, vt = np.linalg.svd(centred, full_matrices=False)
        tol = max(n, m) * np.finfo(float).eps * (s[0] if s.size else 0.0)
        rank = int(np.sum(s > tol)) if s.size and s[0] > 0 else 0
        k = self.n_components
        if k > rank:
            warnings.warn(
                f"requested {k} components but the centred training matrix has rank {rank}; keeping {rank}",
                RankReductionWarning,
                stacklevel=2,
            )
            k = rank
        comps = vt[:k].copy()
        if k:
            pivots = np.argmax(np.abs(comps), axis=1)
            signs = np.sign(comps[np.arange(k), pivots])
            comps *= signs[:, None]
        self.components_ = comps
        self.explained_variance_ = s[:k] ** 2 / (n - 1)
        self.n_components_ = k
        self.n_features_in_ = m
        return self

    def transform(self, X):
        check_is_fitted(self, "components_")
        if sp.issparse(X):
            X = X.toarray()
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X = check_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise ShapeError(f"input has {X.shape[1]} features, model was fitted on {self.n_features_in_}")
        out = (X - self.mean_) @ self.components_.T
        return out[0] if single else out

    def inverse_transform(self, Z):
        check_is_fitted(self, "components_")
        Z = check_matrix(Z, self.n_components_)
        return Z @ self.components_ + self.mean_

    def to_dict(self) -> dict:
        check_is_fitted(self, "components_")
        return {
            "kind": "pca",
            "version": FORMAT_VERSION,
            "n_components": self.n_components,
            "n_features_in": self.n_features_in_,
            "mean": self.mean_.tolist(),
            # row-major: n_components_ rows of length n_features_in
            "components": self.components_.ravel().tolist(),
            "n_components_fitted": self.n_components_,
            "explained_variance": self.explained_variance_.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PCA":
        if d.get("kind") != "pca" or d.get("version") != FORMAT_VERSION:
            raise ValueError("not a version-1 PCA artifact")
        obj = cls(n_components=d["n_components"])
        obj.n_features_in_ = d["n_features_in"]
        obj.n_components_ = d["n_components_fitted"]
        obj.mean_ = np.asarray(d["mean"], dtype=float)
        obj.components_ = np.asarray(d["components"], dtype=float).reshape(obj.n_components_, obj.n_features_in_)
        obj.explained_variance_ = np.asarray(d["explained_variance"], dtype=float)
        return obj
