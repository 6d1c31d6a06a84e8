"""Command-line interface.

Every failure prints one line ``E_CODE: message`` to stderr. Exit status is
0 on success, 1 for runtime failures and 2 for usage, configuration or
input errors.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import shutil
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .exceptions import (
    ConfigError,
    CredentialError,
    EncoderInitError,
    ManifestError,
    RiskFusionError,
    ShapeError,
    ValidationError,
)

log = logging.getLogger("riskfusion")

USAGE_ERRORS = (ConfigError, CredentialError, ManifestError, ShapeError, ValidationError, EncoderInitError)


class UsageError(RiskFusionError):
    code = "E_USAGE"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    sup = argparse.SUPPRESS
    p.add_argument("--config", metavar="PATH", default=sup, help="JSON run config; flags override its keys")
    p.add_argument("--seed", type=int, default=sup)
    p.add_argument("--out", metavar="DIR", default=sup, help="output root directory")
    p.add_argument("--encoder", choices=("checkpoint", "stub"), default=sup)
    p.add_argument("--quiet", action="store_true", default=sup)
    return p


def _augment_flags(p):
    p.add_argument("--abbrev", action="store_true", default=None, help="expand abbreviations")
    p.add_argument("--emoji", action="store_true", default=None, help="expand emoji")
    p.add_argument("--summarize", action="store_true", default=None, help="summarise over-long posts")
    p.add_argument("--back-translate", action="store_true", default=None, dest="back_translate")
    p.add_argument("--pivot", default=None, help="back-translation pivot language")
    p.add_argument("--translator-replay", metavar="DIR", default=None, help="recorded translation transcripts")
    p.add_argument("--translator-endpoint", metavar="URL", default=None)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="riskfusion", description="Suicide-risk level classification experiments.", parents=[common])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", parents=[common], help="collect posts into a JSONL corpus")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--replay", metavar="DIR", help="serve API responses from a recorded transcript")
    src.add_argument("--synthetic", type=int, metavar="N", help="generate N keyword-planted labeled posts")
    p.add_argument("--subreddit", default="SuicideWatch")
    p.add_argument("--store", metavar="DIR", help="scrape store for the seen-id ledger (default OUT/scrape_store)")
    p.add_argument("--output", metavar="PATH", help="corpus file (default OUT/corpus.jsonl)")
    p.add_argument("--limit", type=int, default=1000, help="posts per listing")

    p = sub.add_parser("augment", parents=[common], help="preview augmentation of a corpus (dry run)")
    p.add_argument("--corpus", metavar="PATH")
    _augment_flags(p)
    p.add_argument("--show", type=int, default=3, help="number of changed samples to print")
    p.add_argument("--output", metavar="PATH", help="also write the augmented corpus here")

    p = sub.add_parser("train", parents=[common], help="cross-validate a recipe and save the run")
    p.add_argument("--corpus", metavar="PATH")
    p.add_argument("--recipe", help="hybrid, encoder_only or baseline:<classifier>/<features>/<preprocessing>")
    p.add_argument("--resample", choices=("original", "oversample", "undersample", "weighted_loss"))
    p.add_argument("--k", type=int)
    p.add_argument("--learning-rate", type=float, dest="learning_rate")
    p.add_argument("--max-epochs", type=int, dest="max_epochs")
    p.add_argument("--n-components", type=int, dest="n_components")
    p.add_argument("--max-features", type=int, dest="max_features")
    p.add_argument("--checkpoint", metavar="DIR", dest="checkpoint_path")
    p.add_argument("--no-fine-tune", action="store_false", dest="fine_tune_encoder", default=None)
    _augment_flags(p)
    p.add_argument("--force", action="store_true", help="replace an existing run directory")

    p = sub.add_parser("predict", parents=[common], help="score unlabeled posts with a saved run")
    p.add_argument("--run", metavar="DIR", required=True)
    p.add_argument("--input", metavar="PATH", required=True, help="JSONL posts")
    p.add_argument("--output", metavar="PATH", help="predictions JSONL (default stdout)")
    p.add_argument("--fold", type=int, help="use one fold's model instead of the fold ensemble")
    p.add_argument("--n-components", type=int, dest="n_components", help="expected PCA width")

    p = sub.add_parser("report", parents=[common], help="render comparison tables from saved runs")
    p.add_argument("runs", nargs="*", metavar="RUN_DIR")
    p.add_argument("--grid", action="append", default=[], metavar="PATH", help="baseline grid JSON")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--figures", action="store_true", help="write SVG figures under OUT")
    p.add_argument("--no-reference", action="store_false", dest="reference")

    p = sub.add_parser("baseline-grid", parents=[common], help="cross-validate the traditional classifiers")
    p.add_argument("--corpus", metavar="PATH")
    p.add_argument("--recipes", nargs="+", metavar="CLF/FEAT/PREP", help="subset of recipes (default: full grid)")
    p.add_argument("--k", type=int)
    p.add_argument("--word2vec-dim", type=int, dest="word2vec_dim")
    p.add_argument("--word2vec-epochs", type=int, dest="word2vec_epochs")
    p.add_argument("--force", action="store_true")
    return parser


# helpers ------------------------------------------------------------------------


def _config(args):
    from .config import RunConfig

    cfg = RunConfig.load(args.config) if getattr(args, "config", None) else RunConfig()
    over = {
        "seed": getattr(args, "seed", None),
        "out": getattr(args, "out", None),
        "encoder": getattr(args, "encoder", None),
        "corpus": getattr(args, "corpus", None),
        "recipe": getattr(args, "recipe", None),
        "resample": getattr(args, "resample", None),
        "k": getattr(args, "k", None),
        "checkpoint_path": getattr(args, "checkpoint_path", None),
        "train.learning_rate": getattr(args, "learning_rate", None),
        "train.max_epochs": getattr(args, "max_epochs", None),
        "train.fine_tune_encoder": getattr(args, "fine_tune_encoder", None),
        "features.n_components": getattr(args, "n_components", None),
        "features.max_features": getattr(args, "max_features", None),
    }
    for flag in ("abbrev", "emoji", "summarize", "back_translate", "pivot"):
        over[f"augmentation.{flag}"] = getattr(args, flag, None)
    if getattr(args, "translator_replay", None):
        over["translator"] = {"replay_dir": args.translator_replay}
    elif getattr(args, "translator_endpoint", None):
        over["translator"] = {"endpoint": args.translator_endpoint}
    return cfg.with_overrides(**over)


def _need_corpus(cfg):
    from .corpus.io import load_corpus

    if not cfg.corpus:
        raise ConfigError("no corpus given (use --corpus or the config key corpus)")
    if not Path(cfg.corpus).is_file():
        raise ConfigError(f"corpus file not found: {cfg.corpus}")
    corpus = load_corpus(cfg.corpus)
    unlabeled = [r.id for r in corpus if not hasattr(r, "label")]
    if unlabeled:
        raise ValidationError(f"corpus has unlabeled record {unlabeled[0]!r}")
    return corpus


def _encoder(cfg):
    from .features.encoders import make_encoder

    if cfg.encoder == "checkpoint" and not cfg.checkpoint_path:
        raise ConfigError("checkpoint encoder needs checkpoint_path (or --checkpoint)")
    return make_encoder(cfg.encoder, cfg.checkpoint_path, max_tokens=cfg.features.max_encoder_tokens)


def _translator(cfg):
    from .augment.translation import HttpTranslator, ReplayTranslator

    t = cfg.translator or {}
    if "replay_dir" in t:
        return ReplayTranslator(t["replay_dir"])
    if "endpoint" in t:
        return HttpTranslator(t["endpoint"], min_interval=t.get("min_interval", 0.0))
    return None


def _augmenter(cfg, encoder=None):
    from .augment.transforms import Augmenter

    counter = encoder.count_tokens if encoder is not None else None
    return Augmenter(cfg.augmentation, translator=_translator(cfg), count_tokens=counter)


def _prepare_run_dir(run_dir: Path, force: bool):
    from .artifact import MANIFEST

    if (run_dir / MANIFEST).exists():
        if not force:
            raise ConfigError(f"run directory {run_dir} already holds a completed run (use --force to replace)")
        shutil.rmtree(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)


class _Capture:
    """Collect riskfusion log records for the run log."""

    def __init__(self):
        self.buf = io.StringIO()
        self.handler = logging.StreamHandler(self.buf)
        self.handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        self.handler.setLevel(logging.INFO)

    def __enter__(self):
        log.addHandler(self.handler)
        return self

    def __exit__(self, *exc):
        log.removeHandler(self.handler)

    @property
    def text(self):
        return self.buf.getvalue()


def _say(args, *parts):
    if not getattr(args, "quiet", False):
        print(*parts)


# commands -----------------------------------------------------------------------


def cmd_ingest(args) -> int:
    from .config import RunConfig
    from .corpus.io import write_corpus

    cfg = RunConfig() if not getattr(args, "config", None) else RunConfig.load(args.config)
    out_root = Path(getattr(args, "out", None) or cfg.out)
    output = Path(args.output) if args.output else out_root / "corpus.jsonl"
    seed = getattr(args, "seed", None)
    seed = cfg.seed if seed is None else seed

    if args.synthetic is not None:
        from .corpus.synthetic import make_synthetic_corpus

        records = make_synthetic_corpus(args.synthetic, seed=seed)
        write_corpus(records, output)
        _say(args, f"wrote {len(records)} synthetic posts to {output}")
        return 0

    from .corpus.scrape import SORTS, TIME_FILTERS, RedditClient, ReplayTransport, Scraper, ScrapeConfig

    store = Path(args.store) if args.store else out_root / "scrape_store"
    sc = ScrapeConfig(subreddit=args.subreddit, store_dir=store, limit_per_listing=args.limit)
    if args.replay:
        creds = {"client_id": "replay", "client_secret": "replay", "user_agent": "riskfusion-replay"}
        client = RedditClient(creds, ReplayTransport(args.replay), sleep=lambda s: None)
    else:
        client = RedditClient(max_retries=sc.max_retries, backoff_base=sc.backoff_base, backoff_cap=sc.backoff_cap)
    if output.exists():
        output.unlink()
    scraper = Scraper(sc, client, out_path=output)
    posts = scraper.run()
    if not output.exists():
        write_corpus([], output)
    for s in SORTS:
        for t in TIME_FILTERS:
            if (s, t) in scraper.cell_counts:
                _say(args, f"{s}\t{t}\t{scraper.cell_counts[(s, t)]}")
    if not posts:
        log.warning("no qualifying posts found; %s is empty", output)
        print(f"warning: no qualifying posts found; wrote empty corpus {output}", file=sys.stderr)
    _say(args, f"wrote {len(posts)} records to {output}")
    return 0


def cmd_augment(args) -> int:
    from .corpus.io import write_corpus
    from .validation import TRAIN

    cfg = _config(args)
    corpus = _need_corpus(cfg)
    if not cfg.augmentation.any_enabled:
        raise ConfigError("no augmentation enabled (use --abbrev, --emoji, --summarize or --back-translate)")
    train = [replace(s, split=TRAIN) for s in corpus]
    result = _augmenter(cfg, _encoder(cfg) if cfg.augmentation.summarize else None).apply(train)
    for key in ("abbrev", "emoji", "summarize", "back_translate", "back_translate_skipped"):
        _say(args, f"{key}\t{result.counts.get(key, 0)}")
    _say(args, f"samples\t{len(train)} -> {len(result.samples)}")
    shown = 0
    for before, after in zip(train, result.samples):
        if shown >= args.show:
            break
        if before.text != after.text:
            _say(args, f"--- {before.id}\n- {before.text}\n+ {after.text}")
            shown += 1
    if args.output:
        write_corpus([replace(s, split=None) for s in result.samples], args.output)
        _say(args, f"wrote {len(result.samples)} records to {args.output}")
    return 0


def _train_run(args, cfg, runner) -> int:
    from .locking import FileLock

    run_dir = cfg.run_dir()
    _prepare_run_dir(run_dir, getattr(args, "force", False))
    with FileLock(run_dir / ".lock", "run directory"), _Capture() as cap:
        runner(run_dir, cap)
    return 0


def cmd_train(args) -> int:
    from .artifact import write_run
    from .corpus.stats import compute_stats
    from .evaluation.cv import run_cv

    cfg = _config(args)
    if cfg.recipe == "baseline_grid":
        raise ConfigError("recipe baseline_grid runs through the baseline-grid command")
    corpus = _need_corpus(cfg)
    encoder = _encoder(cfg)
    augmenter = _augmenter(cfg, encoder) if cfg.augmentation.any_enabled else None

    def runner(run_dir, cap):
        result = run_cv(
            corpus, cfg.recipe, k=cfg.k, seed=cfg.seed, features=cfg.features, train=cfg.train,
            augmenter=augmenter, encoder=encoder, baseline_kw=_baseline_kw(cfg), keep_models=True,
        )
        for meta in result.fold_meta:
            log.info("fold %d train counts %s", meta["fold"], json.dumps(meta["train_counts"], sort_keys=True))
        write_run(run_dir, cfg, result, compute_stats(corpus).to_dict(), cap.text)
        agg = result.aggregate
        _say(args, f"run: {run_dir}")
        for meta, rep in zip(result.fold_meta, result.fold_reports):
            _say(args, f"fold {meta['fold']}: weighted F1 {rep.weighted_f1:.4f} train counts {meta['train_counts']}")
        print(f"weighted P/R/F1 {agg.weighted_precision:.4f} {agg.weighted_recall:.4f} {agg.weighted_f1:.4f}")

    return _train_run(args, cfg, runner)


def _baseline_kw(cfg) -> dict:
    kw = {k: v for k, v in cfg.baseline.items() if k in ("word2vec_epochs", "word2vec_dim", "max_features")}
    return kw


def cmd_baseline_grid(args) -> int:
    from .baselines.pipeline import BaselineRecipe, default_recipes, run_baseline_grid
    from .evaluation import reports

    cfg = _config(args).with_overrides(recipe="baseline_grid")
    extra = {"baseline.word2vec_dim": getattr(args, "word2vec_dim", None),
             "baseline.word2vec_epochs": getattr(args, "word2vec_epochs", None)}
    if args.recipes:
        extra["baseline.recipes"] = list(args.recipes)
    cfg = _with_baseline(cfg, extra)
    corpus = _need_corpus(cfg)
    try:
        recipes = [BaselineRecipe.parse(r) for r in cfg.baseline["recipes"]] if cfg.baseline.get("recipes") else default_recipes()
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid baseline recipe: {exc}") from None
    kw = {"max_features": cfg.features.max_features, "word2vec_dim": cfg.features.word2vec_dim, **_baseline_kw(cfg)}

    def runner(run_dir, cap):
        grid = run_baseline_grid(corpus, recipes, k=cfg.k, seed=cfg.seed, **kw)
        (run_dir / "grid.json").write_text(grid.to_json() + "\n", encoding="utf-8")
        (run_dir / "grid.csv").write_text(grid.to_csv(), encoding="utf-8")
        (run_dir / "config.json").write_text(cfg.to_json(), encoding="utf-8")
        (run_dir / "run.log").write_text(cap.text, encoding="utf-8")
        _say(args, f"run: {run_dir}")
        header, rows = reports.grid_table(grid)
        print(reports.render_text(header, rows), end="")

    return _train_run(args, cfg, runner)


def _with_baseline(cfg, extra):
    d = cfg.to_dict()
    for k, v in extra.items():
        if v is not None:
            d["baseline"][k.split(".", 1)[1]] = v
    from .config import RunConfig

    return RunConfig.from_dict(d)


def _load_models(run, fold):
    from .training.classifier import HybridRiskClassifier

    dirs = run.model_dirs()
    if not dirs:
        raise ManifestError(f"{run.path}: run has no serialized models")
    if fold is not None:
        if not 0 <= fold < len(dirs):
            raise ConfigError(f"--fold must be in [0, {len(dirs)})")
        dirs = [dirs[fold]]
    encoder = _encoder(run.config)
    return [HybridRiskClassifier.load(d, encoder=encoder) for d in dirs]


def cmd_predict(args) -> int:
    from .artifact import RunArtifact
    from .corpus.io import iter_corpus
    from .corpus.types import LEVELS
    from .training.classifier import severity_argmax

    run = RunArtifact.load(args.run)
    if run.recipe not in ("hybrid", "encoder_only"):
        raise ConfigError(f"run {run.path} is a {run.recipe} run; predict needs a hybrid or encoder_only run")
    expected = args.n_components
    if expected is None and getattr(args, "config", None):
        expected = _config(args).features.n_components
    models = _load_models(run, args.fold)
    if expected is not None and run.recipe == "hybrid":
        got = models[0].featurizer_.n_components
        if got != expected:
            raise ShapeError(f"run was trained with n_components={got}, requested {expected}")
    records = list(iter_corpus(args.input, strict=False))
    texts = [r.text for r in records]
    out = open(args.output, "w", encoding="utf-8", newline="\n") if args.output else sys.stdout
    try:
        if texts:
            probs = np.mean([m.predict_proba(texts) for m in models], axis=0)
            for rec, p, k in zip(records, probs, severity_argmax(probs)):
                line = {"id": rec.id, "label": LEVELS[k].value, "probabilities": {l.value: float(v) for l, v in zip(LEVELS, p)}}
                out.write(json.dumps(line, sort_keys=True) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    log.info("scored %d posts", len(texts))
    return 0


def cmd_report(args) -> int:
    from .artifact import RunArtifact
    from .baselines.pipeline import BaselineGrid
    from .evaluation import reports

    if not args.runs and not args.grid:
        raise UsageError("report needs at least one run directory or --grid file")
    runs = [RunArtifact.load(r) for r in args.runs]
    grids = []
    for g in args.grid:
        try:
            grids.append(BaselineGrid.from_dict(json.loads(Path(g).read_text(encoding="utf-8"))))
        except (OSError, ValueError, KeyError) as exc:
            raise ManifestError(f"cannot read baseline grid {g}: {exc}") from None
    render = reports.render_text if args.format == "text" else reports.render_csv
    sections = []
    if runs:
        sections.append(("model comparison", reports.model_comparison(runs, args.reference)))
        sections.append(("resampling comparison", reports.resampling_comparison(runs, args.reference)))
        sections.append(("per-label F1", reports.per_label_table(runs, args.reference)))
    for g in grids:
        sections.append(("baseline grid (weighted F1)", reports.grid_table(g, args.reference)))
    for title, (header, rows) in sections:
        if args.format == "text":
            print(f"== {title}")
        print(render(header, rows), end="")
        if args.format == "text":
            print()
    if args.figures:
        fig_dir = Path(getattr(args, "out", None) or "reports")
        fig_dir.mkdir(parents=True, exist_ok=True)
        for run in runs:
            if run.corpus_stats is not None:
                p = reports.distribution_figure(run.corpus_stats["label_counts"], fig_dir / f"{run.label}-distribution.svg")
                _say(args, f"figure: {p}")
            p = reports.confusion_figure(run.aggregate.confusion, fig_dir / f"{run.label}-confusion.svg")
            _say(args, f"figure: {p}")
    return 0


COMMANDS = {
    "ingest": cmd_ingest,
    "augment": cmd_augment,
    "train": cmd_train,
    "predict": cmd_predict,
    "report": cmd_report,
    "baseline-grid": cmd_baseline_grid,
}


def _one_line(msg: str) -> str:
    return " ".join(str(msg).split())


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"{exc.code}: {_one_line(exc)}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr, force=True)
    # the run log always captures INFO; --quiet only silences the console
    logging.getLogger().handlers[0].setLevel(logging.WARNING if getattr(args, "quiet", False) else logging.INFO)
    logging.getLogger("gensim").setLevel(logging.WARNING)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"{exc.code}: {_one_line(exc)}", file=sys.stderr)
        return 2
    except USAGE_ERRORS as exc:
        print(f"{exc.code}: {_one_line(exc)}", file=sys.stderr)
        return 2
    except RiskFusionError as exc:
        print(f"{exc.code}: {_one_line(exc)}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"E_IO: {_one_line(exc)}", file=sys.stderr)
        return 2
    except (OSError, ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"E_RUNTIME: {type(exc).__name__}: {_one_line(exc)}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
