import json

import pytest

from riskfusion.artifact import RunArtifact, sha256_file, write_run
from riskfusion.config import RunConfig
from riskfusion.corpus import compute_stats, make_synthetic_corpus
from riskfusion.evaluation import run_cv
from riskfusion.exceptions import LockError, ManifestError
from riskfusion.locking import FileLock
from riskfusion.training import HybridRiskClassifier


@pytest.fixture(scope="module")
def run(tmp_path_factory):
    cfg = RunConfig(k=3, out=str(tmp_path_factory.mktemp("runs"))).with_overrides(
        **{"train.learning_rate": 0.01, "train.max_epochs": 4, "features.n_components": 10, "features.max_features": 200}
    )
    corpus = make_synthetic_corpus(90, seed=0)
    res = run_cv(corpus, "hybrid", k=3, seed=0, features=cfg.features, train=cfg.train, keep_models=True)
    d = cfg.run_dir()
    write_run(d, cfg, res, compute_stats(corpus).to_dict(), "log line\n")
    return d, cfg, res


def test_layout_and_manifest(run):
    d, cfg, res = run
    m = json.loads((d / "manifest.json").read_text())
    assert m["config_hash"] == cfg.config_hash and m["n_folds"] == 3
    for rel in ("config.json", "folds.json", "reports/aggregate.json", "reports/fold_0.json",
                "reports/confusion.csv", "fold_meta.json", "corpus_stats.json", "run.log",
                "models/fold_0/head.json"):
        assert rel in m["files"]
        assert sha256_file(d / rel) == m["files"][rel]
    assert set(m["environment"]) == {"python", "platform", "packages"}


def test_load(run):
    d, cfg, res = run
    art = RunArtifact.load(d)
    assert art.config == cfg and art.aggregate == res.aggregate
    assert art.plan == res.plan and art.recipe == "hybrid"
    assert len(art.model_dirs()) == 3
    m = HybridRiskClassifier.load(art.model_dirs()[0])
    assert m.coef_.shape == (4, 768 + 10)


def _copy(run, tmp_path):
    import shutil

    dst = tmp_path / "copy"
    shutil.copytree(run[0], dst)
    return dst


def test_missing_file(run, tmp_path):
    d = _copy(run, tmp_path)
    (d / "reports/aggregate.json").unlink()
    with pytest.raises(ManifestError, match="aggregate"):
        RunArtifact.load(d)


def test_tampered_file(run, tmp_path):
    d = _copy(run, tmp_path)
    (d / "run.log").write_text("edited\n")
    with pytest.raises(ManifestError, match="digest"):
        RunArtifact.load(d)
    RunArtifact.load(d, verify_digests=False)


def test_config_hash_mismatch(run, tmp_path):
    d = _copy(run, tmp_path)
    m = json.loads((d / "manifest.json").read_text())
    m["config_hash"] = "0" * 64
    (d / "manifest.json").write_text(json.dumps(m))
    with pytest.raises(ManifestError, match="hash"):
        RunArtifact.load(d)


def test_no_manifest(tmp_path):
    with pytest.raises(ManifestError):
        RunArtifact.load(tmp_path)


def test_file_lock(tmp_path):
    p = tmp_path / ".lock"
    with FileLock(p, "run directory"):
        assert p.exists()
        with pytest.raises(LockError, match="run directory"):
            with FileLock(p, "run directory"):
                pass
    assert not p.exists()
