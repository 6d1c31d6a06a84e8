"""Traditional classifiers over TF-IDF and Word2Vec features."""

from .models import GaussianNB, LogisticRegression, MultinomialNB
from .pipeline import (
    CLASSIFIERS,
    FEATURES,
    BaselineGrid,
    BaselinePipeline,
    BaselineRecipe,
    GridCell,
    cell_seed,
    default_recipes,
    fit_baseline,
    make_model,
    predict_baseline,
    run_baseline_grid,
)
from .preprocessing import VARIANTS, lemmatize, preprocess_variant, stem, stopwords

__all__ = [
    "CLASSIFIERS",
    "FEATURES",
    "VARIANTS",
    "BaselineGrid",
    "BaselinePipeline",
    "BaselineRecipe",
    "GaussianNB",
    "GridCell",
    "LogisticRegression",
    "MultinomialNB",
    "cell_seed",
    "default_recipes",
    "fit_baseline",
    "lemmatize",
    "make_model",
    "predict_baseline",
    "preprocess_variant",
    "run_baseline_grid",
    "stem",
    "stopwords",
]
