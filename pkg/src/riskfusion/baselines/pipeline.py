from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import asdict, dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ..corpus.types import LEVELS
from ..exceptions import ShapeError
from ..features.tfidf import TfidfVectorizer
from ..features.word2vec import Word2VecEmbedder
from ..training.classifier import encode_labels
from ..validation import check_same_length, check_texts
from .models import GaussianNB, LogisticRegression, MultinomialNB
from .preprocessing import VARIANTS, preprocess_variant

CLASSIFIERS = ("svm_linear", "logistic_regression", "naive_bayes", "random_forest")
FEATURES = ("tfidf", "word2vec")


@dataclass(frozen=True)
class BaselineRecipe:
    classifier: str
    features: str = "tfidf"
    preprocessing: str = "none"

    def __post_init__(self):
        if self.classifier not in CLASSIFIERS:
            raise ValueError(f"classifier must be one of {CLASSIFIERS}, got {self.classifier!r}")
        if self.features not in FEATURES:
            raise ValueError(f"features must be one of {FEATURES}, got {self.features!r}")
        if self.preprocessing not in VARIANTS:
            raise ValueError(f"preprocessing must be one of {VARIANTS}, got {self.preprocessing!r}")
        if self.features == "word2vec" and self.preprocessing != "none":
            raise ValueError("preprocessing variants apply to tfidf features only")

    @property
    def key(self) -> str:
        return f"{self.classifier}/{self.features}/{self.preprocessing}"

    @property
    def row(self) -> str:
        return self.features if self.preprocessing == "none" else f"{self.features}+{self.preprocessing}"

    @property
    def naive_bayes_form(self) -> str | None:
        if self.classifier != "naive_bayes":
            return None
        return "multinomial" if self.features == "tfidf" else "gaussian"

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def parse(cls, s: str) -> "BaselineRecipe":
        """``"classifier[/features[/preprocessing]]"``."""
        return cls(*s.split("/"))


def default_recipes() -> list[BaselineRecipe]:
    rows = [("tfidf", v) for v in VARIANTS] + [("word2vec", "none")]
    return [BaselineRecipe(c, f, p) for f, p in rows for c in CLASSIFIERS]


def cell_seed(master_seed: int, recipe: BaselineRecipe) -> int:
    digest = hashlib.sha256(f"{master_seed}:{recipe.key}".encode()).hexdigest()
    return int(digest[:8], 16)


def make_model(recipe: BaselineRecipe, random_state: int = 0):
    if recipe.classifier == "naive_bayes":
        return MultinomialNB(alpha=1.0) if recipe.features == "tfidf" else GaussianNB(var_floor=1e-9)
    if recipe.classifier == "logistic_regression":
        return LogisticRegression(l2=1.0, max_iter=1000, tol=1e-5)
    if recipe.classifier == "svm_linear":
        from sklearn.svm import LinearSVC

        return LinearSVC(C=1.0, random_state=random_state)
    from sklearn.ensemble import RandomForestClassifier

    return RandomForestClassifier(n_estimators=100, random_state=random_state, n_jobs=1)


class BaselinePipeline(BaseEstimator, ClassifierMixin):
    """Preprocess, vectorise and classify raw texts for one baseline recipe.

    The vectoriser (TF-IDF or Word2Vec) is fitted on the training texts only
    and inherits their leakage guard.
    """

    def __init__(self, classifier="svm_linear", features="tfidf", preprocessing="none",
                 max_features=3000, word2vec_dim=1000, word2vec_epochs=10, random_state=0):
        self.classifier = classifier
        self.features = features
        self.preprocessing = preprocessing
        self.max_features = max_features
        self.word2vec_dim = word2vec_dim
        self.word2vec_epochs = word2vec_epochs
        self.random_state = random_state

    @classmethod
    def from_recipe(cls, recipe: BaselineRecipe, **kw) -> "BaselinePipeline":
        return cls(recipe.classifier, recipe.features, recipe.preprocessing, **kw)

    @property
    def recipe(self) -> BaselineRecipe:
        return BaselineRecipe(self.classifier, self.features, self.preprocessing)

    def _prep(self, X):
        return [preprocess_variant(t, self.preprocessing) for t in check_texts(X)]

    def fit(self, X, y, X_val=None, y_val=None):
        # validation data is not used: none of the baselines early-stop
        recipe = self.recipe
        check_same_length(X, y, ("X", "y"))
        texts = self._prep(X)
        if recipe.features == "tfidf":
            self.vectorizer_ = TfidfVectorizer(max_features=self.max_features)
        else:
            self.vectorizer_ = Word2VecEmbedder(
                vector_size=self.word2vec_dim, epochs=self.word2vec_epochs, random_state=self.random_state
            )
        F = self.vectorizer_.fit(texts).transform(texts)
        self.model_ = make_model(recipe, self.random_state)
        self.model_.fit(F, encode_labels(y))
        return self

    def predict_index(self, X) -> np.ndarray:
        check_is_fitted(self, "model_")
        texts = self._prep(X)
        if not texts:
            return np.zeros(0, dtype=int)
        return np.asarray(self.model_.predict(self.vectorizer_.transform(texts)), dtype=int)

    def predict(self, X):
        return np.array([LEVELS[i] for i in self.predict_index(X)], dtype=object)


def fit_baseline(train_features, train_labels, recipe: BaselineRecipe, random_state: int = 0):
    """Fit the recipe's classifier on precomputed features."""
    return make_model(recipe, random_state).fit(train_features, encode_labels(train_labels))


def predict_baseline(model, features) -> np.ndarray:
    if hasattr(model, "n_features_in_") and np.shape(features)[1] != model.n_features_in_:
        raise ShapeError(f"features have width {np.shape(features)[1]}, model expects {model.n_features_in_}")
    return np.array([LEVELS[int(i)] for i in model.predict(features)], dtype=object)


# grid -------------------------------------------------------------------------


@dataclass
class GridCell:
    recipe: BaselineRecipe
    weighted_f1: float
    seed: int
    annotation: str = ""

    def to_dict(self) -> dict:
        return {**self.recipe.to_dict(), "weighted_f1": self.weighted_f1, "seed": self.seed, "annotation": self.annotation}


@dataclass
class BaselineGrid:
    cells: list

    @property
    def rows(self) -> list[str]:
        return list(dict.fromkeys(c.recipe.row for c in self.cells))

    @property
    def columns(self) -> list[str]:
        present = {c.recipe.classifier for c in self.cells}
        return [c for c in CLASSIFIERS if c in present]

    def cell(self, row: str, classifier: str) -> GridCell | None:
        for c in self.cells:
            if c.recipe.row == row and c.recipe.classifier == classifier:
                return c
        return None

    def table(self) -> list[list]:
        out = []
        for r in self.rows:
            line = [r]
            for col in self.columns:
                c = self.cell(r, col)
                line.append(None if c is None else c.weighted_f1)
            out.append(line)
        return out

    def to_dict(self) -> dict:
        return {"columns": self.columns, "rows": self.rows, "cells": [c.to_dict() for c in self.cells]}

    @classmethod
    def from_dict(cls, d: dict) -> "BaselineGrid":
        cells = [
            GridCell(BaselineRecipe(c["classifier"], c["features"], c["preprocessing"]),
                     c["weighted_f1"], c["seed"], c.get("annotation", ""))
            for c in d["cells"]
        ]
        return cls(cells)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["features"] + self.columns)
        for r in self.rows:
            line = [r]
            for col in self.columns:
                c = self.cell(r, col)
                line.append("" if c is None else f"{c.weighted_f1:.4f}{c.annotation}")
            w.writerow(line)
        return buf.getvalue()


def run_baseline_grid(corpus, recipes=None, k: int = 5, seed: int = 0, annotations=None, **pipeline_kw) -> BaselineGrid:
    """Cross-validate every recipe over one shared fold plan.

    Folds come from the master ``seed``; each cell's model seed is derived
    from ``(seed, recipe.key)`` so cells are independent of execution order.
    ``annotations`` maps recipe keys to a marker appended in the CSV.
    """
    from ..evaluation.cv import run_cv
    from ..evaluation.folds import make_folds

    recipes = default_recipes() if recipes is None else list(recipes)
    if not recipes:
        raise ValueError("recipes must be non-empty")
    plan = make_folds(corpus, k=k, seed=seed)
    annotations = annotations or {}
    cells = []
    for r in recipes:
        s = cell_seed(seed, r)
        result = run_cv(corpus, r, plan=plan, seed=s, baseline_kw=pipeline_kw)
        cells.append(GridCell(r, result.aggregate.weighted_f1, s, annotations.get(r.key, "")))
    return BaselineGrid(cells)
