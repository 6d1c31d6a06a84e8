"""Run directories: config snapshot, fold plan, reports, models and manifest.

Layout::

    <run_dir>/
      manifest.json        file map with sha256 digests, config hash, environment
      config.json          merged config snapshot
      folds.json           fold plan
      reports/fold_<i>.json, reports/aggregate.json, reports/confusion.csv
      fold_meta.json       per-fold train counts, augmentation counts, history
      corpus_stats.json    label distribution of the input corpus
      models/fold_<i>/     serialized heads and feature pipelines
      run.log
"""

from __future__ import annotations

import hashlib
import json
import platform
import sys
from dataclasses import dataclass
from importlib import metadata
from pathlib import Path

from .config import RunConfig
from .evaluation.folds import FoldPlan
from .evaluation.metrics import MetricsReport
from .exceptions import ManifestError

MANIFEST = "manifest.json"
MANIFEST_VERSION = 1
LOCK_NAME = ".lock"


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def environment_fingerprint() -> dict:
    versions = {}
    for pkg in ("numpy", "scipy", "scikit-learn", "gensim", "nltk", "torch", "transformers"):
        try:
            versions[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            versions[pkg] = None
    return {"python": sys.version.split()[0], "platform": platform.platform(), "packages": versions}


def _dump(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_run(run_dir, config: RunConfig, result, corpus_stats: dict | None = None, log_text: str = "") -> dict:
    """Persist a :class:`~riskfusion.evaluation.cv.CVResult`; returns the manifest."""
    d = Path(run_dir)
    files = {}

    def put(rel, obj):
        _dump(d / rel, obj)
        files[rel] = rel

    (d / "config.json").parent.mkdir(parents=True, exist_ok=True)
    (d / "config.json").write_text(config.to_json(), encoding="utf-8")
    files["config"] = "config.json"
    put("folds.json", result.plan.to_dict())
    for i, rep in enumerate(result.fold_reports):
        put(f"reports/fold_{i}.json", rep.to_dict())
    put("reports/aggregate.json", result.aggregate.to_dict())
    (d / "reports/confusion.csv").write_text(result.aggregate.confusion.to_csv(), encoding="utf-8")
    files["reports/confusion.csv"] = "reports/confusion.csv"
    put("fold_meta.json", result.fold_meta)
    if corpus_stats is not None:
        put("corpus_stats.json", corpus_stats)
    for i, model in enumerate(result.models):
        if hasattr(model, "save"):
            for name in model.save(d / f"models/fold_{i}").values():
                rel = f"models/fold_{i}/{name}"
                files[rel] = rel
    (d / "run.log").write_text(log_text, encoding="utf-8")
    files["run.log"] = "run.log"

    digests = {}
    for rel in files.values():
        p = d / rel
        if p.is_file():
            digests[rel] = sha256_file(p)
    manifest = {
        "version": MANIFEST_VERSION,
        "recipe": result.recipe,
        "config_hash": config.config_hash,
        "seed": config.seed,
        "n_folds": len(result.fold_reports),
        "files": digests,
        "models": [f"models/fold_{i}" for i, m in enumerate(result.models) if hasattr(m, "save")],
        "environment": environment_fingerprint(),
    }
    _dump(d / MANIFEST, manifest)
    return manifest


@dataclass
class RunArtifact:
    """A completed run loaded read-only from disk."""

    path: Path
    manifest: dict
    config: RunConfig
    fold_reports: list
    aggregate: MetricsReport
    plan: FoldPlan
    fold_meta: list
    corpus_stats: dict | None

    @property
    def recipe(self) -> str:
        return self.manifest["recipe"]

    @property
    def label(self) -> str:
        return self.path.name

    @classmethod
    def load(cls, run_dir, verify_digests: bool = True) -> "RunArtifact":
        d = Path(run_dir)
        mpath = d / MANIFEST
        if not mpath.is_file():
            raise ManifestError(f"{d}: no {MANIFEST}")
        try:
            manifest = json.loads(mpath.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ManifestError(f"{mpath}: invalid JSON: {exc.msg}") from None
        if manifest.get("version") != MANIFEST_VERSION:
            raise ManifestError(f"{mpath}: unsupported manifest version {manifest.get('version')!r}")
        for rel, digest in manifest.get("files", {}).items():
            p = d / rel
            if not p.is_file():
                raise ManifestError(f"{d}: manifest lists missing file {rel}")
            if verify_digests and sha256_file(p) != digest:
                raise ManifestError(f"{d}: {rel} does not match its manifest digest")
        for rel in ("config.json", "reports/aggregate.json", "folds.json"):
            if rel not in manifest.get("files", {}):
                raise ManifestError(f"{d}: manifest lacks {rel}")
        config = RunConfig.load(d / "config.json")
        if config.config_hash != manifest.get("config_hash"):
            raise ManifestError(f"{d}: config hash does not match the manifest")

        def read(rel):
            return json.loads((d / rel).read_text(encoding="utf-8"))

        folds = [MetricsReport.from_dict(read(f"reports/fold_{i}.json")) for i in range(manifest["n_folds"])]
        stats = read("corpus_stats.json") if (d / "corpus_stats.json").is_file() else None
        return cls(
            path=d,
            manifest=manifest,
            config=config,
            fold_reports=folds,
            aggregate=MetricsReport.from_dict(read("reports/aggregate.json")),
            plan=FoldPlan.from_dict(read("folds.json")),
            fold_meta=read("fold_meta.json") if (d / "fold_meta.json").is_file() else [],
            corpus_stats=stats,
        )

    def model_dirs(self) -> list[Path]:
        return [self.path / m for m in self.manifest.get("models", [])]
