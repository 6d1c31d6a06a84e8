"""Closed-form Naive Bayes and gradient-descent logistic regression.

These are written out rather than delegated because their exact fits anchor
oracle tests. Linear SVM and random forest come from scikit-learn.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.special import logsumexp
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ..exceptions import DomainError, ShapeError


def _as_features(X):
    if sp.issparse(X):
        return X.tocsr().astype(float)
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ShapeError(f"expected a 2-D feature matrix, got shape {X.shape}")
    return X


def _check_xy(X, y):
    X = _as_features(X)
    y = np.asarray(y)
    if X.shape[0] != len(y):
        raise ShapeError(f"{X.shape[0]} rows but {len(y)} labels")
    classes = np.unique(y)
    if len(classes) < 2:
        raise DomainError("training labels cover a single category")
    return X, y, classes


class _Classifier(BaseEstimator, ClassifierMixin):
    def predict(self, X):
        jll = self._joint_log_likelihood(_as_features(X))
        return self.classes_[np.argmax(jll, axis=1)]

    def predict_log_proba(self, X):
        jll = self._joint_log_likelihood(_as_features(X))
        return jll - logsumexp(jll, axis=1, keepdims=True)

    def predict_proba(self, X):
        return np.exp(self.predict_log_proba(X))


class MultinomialNB(_Classifier):
    """Multinomial NB with additive (Laplace) smoothing.

    ``P(t | c) = (N_ct + alpha) / (N_c + alpha * n_features)``.
    """

    def __init__(self, alpha=1.0):
        self.alpha = alpha

    def fit(self, X, y):
        X, y, self.classes_ = _check_xy(X, y)
        if (X.min() if not sp.issparse(X) else (X.data.min() if X.nnz else 0)) < 0:
            raise ValueError("MultinomialNB needs non-negative features")
        counts = np.vstack([np.asarray(X[y == c].sum(axis=0)).ravel() for c in self.classes_])
        n_c = np.array([np.sum(y == c) for c in self.classes_], dtype=float)
        self.class_log_prior_ = np.log(n_c / n_c.sum())
        smoothed = counts + self.alpha
        self.feature_log_prob_ = np.log(smoothed) - np.log(smoothed.sum(axis=1, keepdims=True))
        self.n_features_in_ = X.shape[1]
        return self

    def _joint_log_likelihood(self, X):
        check_is_fitted(self, "feature_log_prob_")
        if X.shape[1] != self.feature_log_prob_.shape[1]:
            raise ShapeError("feature width differs from training")
        return np.asarray(X @ self.feature_log_prob_.T) + self.class_log_prior_


class GaussianNB(_Classifier):
    """Per-class, per-feature normal likelihoods (MLE), variances floored."""

    def __init__(self, var_floor=1e-9):
        self.var_floor = var_floor

    def fit(self, X, y):
        X, y, self.classes_ = _check_xy(X, y)
        if sp.issparse(X):
            X = X.toarray()
        self.theta_ = np.vstack([X[y == c].mean(axis=0) for c in self.classes_])
        self.var_ = np.maximum(np.vstack([X[y == c].var(axis=0) for c in self.classes_]), self.var_floor)
        n_c = np.array([np.sum(y == c) for c in self.classes_], dtype=float)
        self.class_log_prior_ = np.log(n_c / n_c.sum())
        self.n_features_in_ = X.shape[1]
        return self

    def _joint_log_likelihood(self, X):
        check_is_fitted(self, "theta_")
        if sp.issparse(X):
            X = X.toarray()
        if X.shape[1] != self.theta_.shape[1]:
            raise ShapeError("feature width differs from training")
        out = []
        # terms are summed in sorted order so the result does not depend on
        # feature order; floored variances make rounding ties common otherwise
        for k in range(len(self.classes_)):
            ll = -0.5 * np.sum(np.sort(np.log(2 * np.pi * self.var_[k])))
            terms = np.sort((X - self.theta_[k]) ** 2 / self.var_[k], axis=1)
            out.append(ll - 0.5 * np.sum(terms, axis=1) + self.class_log_prior_[k])
        return np.column_stack(out)


class LogisticRegression(_Classifier):
    """Multinomial logistic regression with an L2 penalty, fitted by
    full-batch gradient descent.

    Objective: ``mean CE + (l2 / (2 n)) * ||W||^2`` (intercept unpenalised).
    The step is ``1 / L`` for the Böhning bound
    ``L = ||[X, 1]||_F^2 / (2 n) + l2 / n``, which makes the objective
    non-increasing at every iteration. Stops when the gradient norm drops
    below ``tol`` or after ``max_iter`` steps.
    """

    def __init__(self, l2=1.0, max_iter=1000, tol=1e-5):
        self.l2 = l2
        self.max_iter = max_iter
        self.tol = tol

    def _objective(self, X, Y, W, b):
        Z = np.asarray(X @ W.T) + b
        lse = logsumexp(Z, axis=1)
        n = X.shape[0]
        loss = float(np.mean(lse - np.sum(Z * Y, axis=1)) + self.l2 / (2 * n) * np.sum(W * W))
        P = np.exp(Z - lse[:, None])
        G = (P - Y) / n
        dW = np.asarray((X.T @ G).T) + self.l2 / n * W
        db = G.sum(axis=0)
        return loss, dW, db

    def fit(self, X, y):
        X, y, self.classes_ = _check_xy(X, y)
        n, d = X.shape
        K = len(self.classes_)
        Y = (y[:, None] == self.classes_[None, :]).astype(float)
        fro = X.multiply(X).sum() if sp.issparse(X) else np.sum(X * X)
        lipschitz = (float(fro) + n) / (2 * n) + self.l2 / n
        step = 1.0 / lipschitz
        W, b = np.zeros((K, d)), np.zeros(K)
        curve = []
        for it in range(self.max_iter):
            loss, dW, db = self._objective(X, Y, W, b)
            curve.append(loss)
            gnorm = np.sqrt(np.sum(dW * dW) + np.sum(db * db))
            if gnorm < self.tol:
                break
            W -= step * dW
            b -= step * db
        else:
            curve.append(self._objective(X, Y, W, b)[0])
        self.coef_, self.intercept_ = W, b
        self.loss_curve_ = curve
        self.n_iter_ = len(curve) - 1
        self.n_features_in_ = d
        return self

    def _joint_log_likelihood(self, X):
        check_is_fitted(self, "coef_")
        if X.shape[1] != self.coef_.shape[1]:
            raise ShapeError("feature width differs from training")
        return np.asarray(X @ self.coef_.T) + self.intercept_
