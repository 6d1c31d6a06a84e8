"""Run configuration: a JSON document merged with command-line overrides.

Schema (all keys optional; defaults shown by :meth:`RunConfig.to_dict`)::

    {
      "corpus": "data/corpus.jsonl",
      "recipe": "hybrid" | "encoder_only" | "baseline_grid" | "baseline:<clf>/<feat>/<prep>",
      "encoder": "stub" | "checkpoint",
      "checkpoint_path": null,
      "seed": 0,
      "k": 5,
      "out": "runs",
      "resample": "original" | "oversample" | "undersample" | "weighted_loss",
      "features": {FeatureConfig fields},
      "train": {TrainConfig fields except resample and seed},
      "augmentation": {AugmentationPlan fields},
      "translator": null | {"replay_dir": ...} | {"endpoint": ...},
      "baseline": {"recipes": [...], "word2vec_epochs": 10}
    }

Unknown keys at any level are rejected by name.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .augment.transforms import AugmentationPlan
from .exceptions import ConfigError
from .features.fusion import FeatureConfig
from .training.classifier import TrainConfig
from .training.resampling import STRATEGIES

RECIPES = ("hybrid", "encoder_only", "baseline_grid")
ENCODERS = ("stub", "checkpoint")
_TRAIN_KEYS = tuple(f.name for f in fields(TrainConfig) if f.name not in ("resample", "seed"))
_BASELINE_KEYS = ("recipes", "word2vec_epochs", "word2vec_dim", "max_features")
_TRANSLATOR_KEYS = ("replay_dir", "endpoint", "min_interval")


def _nested(cls, data, section, allowed=None):
    allowed = allowed or tuple(f.name for f in fields(cls))
    if not isinstance(data, dict):
        raise ConfigError(f"config section {section!r} must be an object")
    for key in data:
        if key not in allowed:
            raise ConfigError(f"unknown config key {section}.{key}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {section} config: {exc}") from exc


@dataclass(frozen=True)
class RunConfig:
    corpus: str | None = None
    recipe: str = "hybrid"
    encoder: str = "stub"
    checkpoint_path: str | None = None
    seed: int = 0
    k: int = 5
    out: str = "runs"
    resample: str = "original"
    features: FeatureConfig = field(default_factory=FeatureConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    augmentation: AugmentationPlan = field(default_factory=AugmentationPlan)
    translator: dict | None = None
    baseline: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.recipe not in RECIPES and not str(self.recipe).startswith("baseline:"):
            raise ConfigError(f"recipe must be one of {RECIPES} or 'baseline:...', got {self.recipe!r}")
        if self.encoder not in ENCODERS:
            raise ConfigError(f"encoder must be one of {ENCODERS}, got {self.encoder!r}")
        if self.resample not in STRATEGIES:
            raise ConfigError(f"resample must be one of {STRATEGIES}, got {self.resample!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigError("seed must be an integer")
        if not isinstance(self.k, int) or self.k < 2:
            raise ConfigError("k must be an integer >= 2")
        for key in self.baseline:
            if key not in _BASELINE_KEYS:
                raise ConfigError(f"unknown config key baseline.{key}")
        for key in self.translator or {}:
            if key not in _TRANSLATOR_KEYS:
                raise ConfigError(f"unknown config key translator.{key}")
        # the top-level strategy and seed are authoritative for training
        object.__setattr__(self, "train", replace(self.train, resample=self.resample, seed=self.seed))

    # serialisation -----------------------------------------------------------

    def to_dict(self) -> dict:
        train = {k: v for k, v in asdict(self.train).items() if k in _TRAIN_KEYS}
        return {
            "corpus": self.corpus,
            "recipe": self.recipe,
            "encoder": self.encoder,
            "checkpoint_path": self.checkpoint_path,
            "seed": self.seed,
            "k": self.k,
            "out": self.out,
            "resample": self.resample,
            "features": asdict(self.features),
            "train": train,
            "augmentation": asdict(self.augmentation),
            "translator": self.translator,
            "baseline": dict(self.baseline),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config document must be a JSON object")
        top = {f.name for f in fields(cls)}
        for key in d:
            if key not in top:
                raise ConfigError(f"unknown config key {key}")
        kw = {k: v for k, v in d.items() if k not in ("features", "train", "augmentation")}
        if "features" in d:
            kw["features"] = _nested(FeatureConfig, d["features"], "features")
        if "train" in d:
            kw["train"] = _nested(TrainConfig, d["train"], "train", _TRAIN_KEYS)
        if "augmentation" in d:
            kw["augmentation"] = _nested(AugmentationPlan, d["augmentation"], "augmentation")
        if kw.get("baseline") is None:
            kw.pop("baseline", None)
        try:
            return cls(**kw)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid config: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
        return cls.from_dict(data)

    def with_overrides(self, **overrides) -> "RunConfig":
        """Return a copy with ``None``-valued overrides ignored.

        Dotted keys (``"train.learning_rate"``) reach into nested sections.
        """
        d = self.to_dict()
        for key, value in overrides.items():
            if value is None:
                continue
            parts = key.split(".")
            node = d
            for p in parts[:-1]:
                if not isinstance(node.get(p), dict):
                    raise ConfigError(f"unknown config key {key}")
                node = node[p]
            node[parts[-1]] = value
        return type(self).from_dict(d)

    # identity ----------------------------------------------------------------

    def content(self) -> dict:
        """The fields that determine a run's results (everything but ``out``)."""
        d = self.to_dict()
        d.pop("out")
        return d

    @property
    def config_hash(self) -> str:
        blob = json.dumps(self.content(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def run_dir(self) -> Path:
        slug = self.recipe.replace(":", "-").replace("/", "-")
        return Path(self.out) / f"{slug}-{self.config_hash[:12]}-s{self.seed}"
