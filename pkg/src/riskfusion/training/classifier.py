from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ..corpus.types import LEVELS, N_LEVELS, RiskLevel
from ..exceptions import DomainError, ShapeError, TrainingError
from ..features.fusion import HybridFeaturizer
from ..validation import check_same_length, check_texts
from .losses import class_weights, forward, loss_and_grad
from .optim import AdamW
from .resampling import STRATEGIES

log = logging.getLogger(__name__)

HEAD_FORMAT_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-5
    weight_decay: float = 0.01
    batch_size: int = 3
    max_epochs: int = 20
    early_stop_patience: int = 3
    resample: str = "original"
    seed: int = 0
    fine_tune_encoder: bool = True

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.early_stop_patience < 1:
            raise ValueError("early_stop_patience must be >= 1")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if self.resample not in STRATEGIES:
            raise ValueError(f"resample must be one of {STRATEGIES}")

    def to_dict(self) -> dict:
        return asdict(self)


def encode_labels(y) -> np.ndarray:
    return np.array([int(v) if isinstance(v, (int, np.integer)) else RiskLevel.parse(v).index for v in y], dtype=int)


def severity_argmax(probs) -> np.ndarray:
    """Row-wise argmax; exact ties resolve to the more severe level."""
    probs = np.atleast_2d(probs)
    return probs.shape[1] - 1 - np.argmax(probs[:, ::-1], axis=1)


def _default_scorer(y_true, y_pred) -> float:
    from ..evaluation.metrics import weighted_f1_score

    return weighted_f1_score(y_true, y_pred)


class HybridRiskClassifier(BaseEstimator, ClassifierMixin):
    """Linear softmax head over fused encoder + TF-IDF/PCA features.

    Trained with AdamW on (weighted) cross-entropy, early-stopped on the
    validation score. When the encoder is trainable and
    ``fine_tune_encoder`` is set, encoder weights are updated jointly
    (requires torch); otherwise features are computed once and only the
    head is trained.

    Parameters
    ----------
    encoder : encoder backend, optional
        Defaults to :class:`~riskfusion.features.StubEncoder`.
    use_tfidf : bool, default=True
        False gives the encoder-only model.
    loss : {"ce", "weighted"}, default="ce"
        ``"weighted"`` scales each sample by ``D / D_c`` of its category.
    scorer : callable, optional
        ``scorer(y_true_idx, y_pred_idx) -> float`` for early stopping;
        defaults to weighted F1.
    """

    def __init__(
        self,
        encoder=None,
        use_tfidf=True,
        max_features=3000,
        n_components=300,
        learning_rate=1e-5,
        weight_decay=0.01,
        batch_size=3,
        max_epochs=20,
        patience=3,
        loss="ce",
        fine_tune_encoder=True,
        random_state=0,
        scorer=None,
    ):
        self.encoder = encoder
        self.use_tfidf = use_tfidf
        self.max_features = max_features
        self.n_components = n_components
        self.learning_rate = learning_rate
        self.weight_decay = weight_decay
        self.batch_size = batch_size
        self.max_epochs = max_epochs
        self.patience = patience
        self.loss = loss
        self.fine_tune_encoder = fine_tune_encoder
        self.random_state = random_state
        self.scorer = scorer

    @classmethod
    def from_config(cls, train: TrainConfig, features=None, encoder=None, use_tfidf=True, **kw):
        fk = {} if features is None else {"max_features": features.max_features, "n_components": features.n_components}
        return cls(
            encoder=encoder,
            use_tfidf=use_tfidf,
            learning_rate=train.learning_rate,
            weight_decay=train.weight_decay,
            batch_size=train.batch_size,
            max_epochs=train.max_epochs,
            patience=train.early_stop_patience,
            loss="weighted" if train.resample == "weighted_loss" else "ce",
            fine_tune_encoder=train.fine_tune_encoder,
            random_state=train.seed,
            **fk,
            **kw,
        )

    @property
    def classes_(self):
        return np.array(LEVELS, dtype=object)

    def _class_weights(self, y_idx):
        if self.loss == "ce":
            return np.ones(N_LEVELS)
        if self.loss == "weighted":
            return class_weights(np.bincount(y_idx, minlength=N_LEVELS), len(y_idx))
        raise ValueError(f"unknown loss {self.loss!r}")

    def fit(self, X, y, X_val=None, y_val=None):
        X = check_texts(X)
        check_same_length(X, y, ("X", "y"))
        if not X:
            raise DomainError("empty training set")
        y_idx = encode_labels(y)
        has_val = X_val is not None and len(X_val) > 0
        if has_val:
            X_val = check_texts(X_val)
            check_same_length(X_val, y_val, ("X_val", "y_val"))
            yv_idx = encode_labels(y_val)
        else:
            X_val, yv_idx = [], np.zeros(0, dtype=int)

        self.featurizer_ = HybridFeaturizer(
            encoder=self.encoder,
            max_features=self.max_features,
            n_components=self.n_components,
            use_tfidf=self.use_tfidf,
        ).fit(X)
        self.class_weight_ = self._class_weights(y_idx)
        enc = self.featurizer_.encoder_
        if self.fine_tune_encoder and getattr(enc, "trainable", False):
            from .finetune import fit_end_to_end

            fit_end_to_end(self, X, y_idx, X_val, yv_idx)
        else:
            F = self.featurizer_.transform(X)
            Fv = self.featurizer_.transform(X_val) if has_val else np.zeros((0, F.shape[1]))
            self._fit_head(F, y_idx, Fv, yv_idx)
        return self

    def _init_head(self, d, rng):
        bound = 1.0 / np.sqrt(d)
        return rng.uniform(-bound, bound, size=(N_LEVELS, d)), rng.uniform(-bound, bound, size=N_LEVELS)

    def _fit_head(self, F, y, Fv, yv):
        rng = np.random.default_rng(self.random_state)
        W, b = self._init_head(F.shape[1], rng)
        opt = AdamW([W, b], lr=self.learning_rate, weight_decay=self.weight_decay)
        scorer = self.scorer or _default_scorer
        best = (-np.inf, W.copy(), b.copy(), 0)
        history, stale = [], 0
        n = F.shape[0]
        for epoch in range(1, self.max_epochs + 1):
            order = rng.permutation(n)
            total = 0.0
            for start in range(0, n, self.batch_size):
                idx = order[start : start + self.batch_size]
                loss, dW, db = loss_and_grad(F[idx], y[idx], W, b, self.class_weight_)
                if not np.isfinite(loss):
                    raise TrainingError(f"non-finite loss at epoch {epoch}, batch starting {start}: {loss}")
                total += loss * len(idx)
                opt.step([dW, db])
            entry = {"epoch": epoch, "train_loss": total / n}
            if len(yv):
                score = float(scorer(yv, severity_argmax(forward(Fv, W, b))))
                entry["val_score"] = score
                if score > best[0]:
                    best, stale = (score, W.copy(), b.copy(), epoch), 0
                else:
                    stale += 1
            else:
                best = (np.nan, W.copy(), b.copy(), epoch)
            history.append(entry)
            log.debug("epoch %d %s", epoch, entry)
            if stale >= self.patience:
                break
        _, self.coef_, self.intercept_, self.best_epoch_ = best
        self.history_ = history
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        F = self.featurizer_.transform(check_texts(X))
        if F.shape[1] != self.coef_.shape[1]:
            raise ShapeError(f"features have width {F.shape[1]}, head expects {self.coef_.shape[1]}")
        return F @ self.coef_.T + self.intercept_

    def predict_proba(self, X):
        check_is_fitted(self, "coef_")
        X = check_texts(X)
        if not X:
            return np.zeros((0, N_LEVELS))
        return forward(self.featurizer_.transform(X), self.coef_, self.intercept_)

    def predict_index(self, X) -> np.ndarray:
        probs = self.predict_proba(X)
        return severity_argmax(probs) if len(probs) else np.zeros(0, dtype=int)

    def predict(self, X):
        return np.array([LEVELS[i] for i in self.predict_index(X)], dtype=object)

    def predict_with_proba(self, X):
        """List of ``(RiskLevel, probs)`` pairs in input order."""
        probs = self.predict_proba(X)
        if not len(probs):
            return []
        return [(LEVELS[i], p) for i, p in zip(severity_argmax(probs), probs)]

    # persistence -----------------------------------------------------------

    def save(self, directory) -> dict:
        """Write ``head.json`` and ``features.json``; returns the file map."""
        check_is_fitted(self, "coef_")
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        head = {
            "kind": "softmax_head",
            "version": HEAD_FORMAT_VERSION,
            "n_inputs": int(self.coef_.shape[1]),
            "weights": self.coef_.ravel().tolist(),
            "bias": self.intercept_.tolist(),
            "params": {k: v for k, v in self.get_params(deep=False).items() if k not in ("encoder", "scorer")},
            "features": "features.json",
        }
        files = {"head": "head.json", "features": "features.json"}
        (d / "features.json").write_text(json.dumps(self.featurizer_.to_dict()), encoding="utf-8")
        enc = self.featurizer_.encoder_
        if getattr(self, "encoder_finetuned_", False) and hasattr(enc, "model_"):
            enc.model_.save_pretrained(d / "encoder")
            enc.tokenizer_.save_pretrained(d / "encoder")
            head["encoder"] = files["encoder"] = "encoder"
        (d / "head.json").write_text(json.dumps(head), encoding="utf-8")
        return files

    @classmethod
    def load(cls, directory, encoder=None) -> "HybridRiskClassifier":
        d = Path(directory)
        head = json.loads((d / "head.json").read_text(encoding="utf-8"))
        if head.get("kind") != "softmax_head" or head.get("version") != HEAD_FORMAT_VERSION:
            raise ValueError(f"{d / 'head.json'} is not a version-{HEAD_FORMAT_VERSION} head artifact")
        if head.get("encoder"):
            from ..features.encoders import CheckpointEncoder

            encoder = CheckpointEncoder(checkpoint_path=d / head["encoder"]).load()
        obj = cls(encoder=encoder, **head["params"])
        feats = json.loads((d / head["features"]).read_text(encoding="utf-8"))
        from ..features.encoders import StubEncoder

        obj.featurizer_ = HybridFeaturizer.from_dict(feats, encoder if encoder is not None else StubEncoder())
        n_in = head["n_inputs"]
        if obj.featurizer_.n_features_out_ != n_in:
            raise ShapeError(f"feature artifact gives width {obj.featurizer_.n_features_out_}, head expects {n_in}")
        obj.coef_ = np.asarray(head["weights"], dtype=float).reshape(N_LEVELS, n_in)
        obj.intercept_ = np.asarray(head["bias"], dtype=float)
        return obj
