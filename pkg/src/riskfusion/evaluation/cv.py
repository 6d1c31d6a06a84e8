"""Cross-validation driver shared by the hybrid, encoder-only and baseline recipes."""

from __future__ import annotations

import logging
import time
from collections import Counter
from dataclasses import dataclass, field, replace

from ..corpus.types import LEVELS
from ..exceptions import FoldError, RiskFusionError
from ..features.fusion import FeatureConfig
from ..training.classifier import HybridRiskClassifier, TrainConfig
from ..training.resampling import resample
from ..validation import TEST, TRAIN, VAL, tag
from .folds import FoldPlan, make_folds
from .metrics import MetricsReport, aggregate_reports, evaluate

log = logging.getLogger(__name__)

MODEL_RECIPES = ("hybrid", "encoder_only")


def parse_recipe(recipe):
    """Accept ``"hybrid"``, ``"encoder_only"``, a BaselineRecipe, or
    ``"baseline:classifier/features/preprocessing"``."""
    from ..baselines.pipeline import BaselineRecipe

    if isinstance(recipe, BaselineRecipe) or recipe in MODEL_RECIPES:
        return recipe
    if isinstance(recipe, str) and recipe.startswith("baseline:"):
        return BaselineRecipe.parse(recipe[len("baseline:") :])
    raise ValueError(f"unknown recipe {recipe!r}; expected one of {MODEL_RECIPES} or 'baseline:...'")


def recipe_name(recipe) -> str:
    return recipe if isinstance(recipe, str) else f"baseline:{recipe.key}"


@dataclass
class CVResult:
    recipe: str
    plan: FoldPlan
    fold_reports: list
    aggregate: MetricsReport
    fold_meta: list = field(default_factory=list)
    models: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "recipe": self.recipe,
            "folds": [r.to_dict() for r in self.fold_reports],
            "aggregate": self.aggregate.to_dict(),
            "fold_meta": self.fold_meta,
        }


def _counts(samples) -> dict:
    c = Counter(s.label for s in samples)
    return {lvl.value: c.get(lvl, 0) for lvl in LEVELS}


def _texts(samples, split):
    return tag([s.text for s in samples], split, [s.id for s in samples])


def run_fold(fold, by_id, recipe, *, features, train, augmenter=None, encoder=None, seed=0, baseline_kw=None):
    """Fit on one fold's train split and score its test split.

    Returns ``(report, meta, model)``.
    """
    from ..baselines.pipeline import BaselinePipeline

    tr = [replace(by_id[i], split=TRAIN) for i in fold.train_ids]
    va = [replace(by_id[i], split=VAL) for i in fold.val_ids]
    te = [replace(by_id[i], split=TEST) for i in fold.test_ids]
    meta = {"fold": fold.index, "n_train_raw": len(tr), "n_val": len(va), "n_test": len(te)}

    tr = resample(tr, train.resample, seed=seed + fold.index)
    meta["train_counts"] = _counts(tr)
    if augmenter is not None and augmenter.plan.any_enabled:
        aug = augmenter.apply(tr)
        tr = aug.samples
        meta["augmentation"] = dict(sorted(aug.counts.items()))
        meta["train_counts_augmented"] = _counts(tr)

    X, y = _texts(tr, TRAIN), [s.label for s in tr]
    Xv, yv = _texts(va, VAL), [s.label for s in va]
    Xt = _texts(te, TEST)

    if isinstance(recipe, str):
        if encoder is not None and hasattr(encoder, "reset_metadata"):
            encoder.reset_metadata()
        model = HybridRiskClassifier.from_config(
            replace(train, seed=seed + fold.index), features, encoder=encoder, use_tfidf=recipe == "hybrid"
        )
        model.fit(X, y, Xv, yv)
        meta["n_components"] = model.featurizer_.n_components_
        meta["best_epoch"] = model.best_epoch_
        meta["history"] = model.history_
        enc = model.featurizer_.encoder_
        meta["truncated_texts"] = getattr(enc, "truncation_count_", 0)
    else:
        kw = {"max_features": features.max_features, "word2vec_dim": features.word2vec_dim, **(baseline_kw or {})}
        model = BaselinePipeline.from_recipe(recipe, random_state=seed, **kw).fit(X, y)
    pred = model.predict_index(Xt)
    return evaluate([s.label.index for s in te], pred), meta, model


def run_cv(
    corpus,
    recipe="hybrid",
    *,
    plan: FoldPlan | None = None,
    k: int = 5,
    seed: int = 0,
    features: FeatureConfig | None = None,
    train: TrainConfig | None = None,
    augmenter=None,
    encoder=None,
    baseline_kw=None,
    keep_models: bool = False,
) -> CVResult:
    """Run k-fold cross-validation of one recipe.

    Transforms are fitted on each fold's train split; resampling and
    augmentation touch that split only; the model early-stops on val and is
    scored on test. Scalar metrics are averaged over folds and confusion
    matrices summed.

    Raises
    ------
    FoldError
        Wrapping whatever failed, with the fold index.
    """
    recipe = parse_recipe(recipe)
    corpus = list(corpus)
    features = features or FeatureConfig()
    train = train or TrainConfig(seed=seed)
    plan = plan or make_folds(corpus, k=k, seed=seed)
    by_id = {s.id: s for s in corpus}
    reports, metas, models = [], [], []
    for fold in plan.folds:
        t0 = time.perf_counter()
        try:
            rep, meta, model = run_fold(
                fold, by_id, recipe, features=features, train=train, augmenter=augmenter,
                encoder=encoder, seed=seed, baseline_kw=baseline_kw,
            )
        except (RiskFusionError, ValueError, ArithmeticError, RuntimeError) as exc:
            raise FoldError(fold.index, exc) from exc
        # wall time is logged only, so fold metadata stays reproducible
        log.info(
            "fold %d: weighted F1 %.4f in %.2fs, train counts %s",
            fold.index, rep.weighted_f1, time.perf_counter() - t0, meta["train_counts"],
        )
        reports.append(rep)
        metas.append(meta)
        if keep_models:
            models.append(model)
    return CVResult(recipe_name(recipe), plan, reports, aggregate_reports(reports), metas, models)
