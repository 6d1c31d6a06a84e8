"""Comparison tables and figures rendered from run artifacts.

Tables are returned as lists of rows and rendered to aligned plain text or
CSV; published reference values are appended as extra rows when a matching
key exists.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from ..corpus.types import LEVELS
from . import reference

METRIC_HEADER = ["run", "weighted_precision", "weighted_recall", "weighted_f1"]
LEVEL_HEADER = ["run"] + [f"{lvl.value}_f1" for lvl in LEVELS]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


def render_text(header, rows) -> str:
    cells = [[_fmt(v) for v in r] for r in [header] + list(rows)]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _triple(rep):
    return [rep.weighted_precision, rep.weighted_recall, rep.weighted_f1]


def model_comparison(artifacts, with_reference: bool = True):
    """One row per artifact: weighted P/R/F1 of its aggregate."""
    rows = [[a.label] + _triple(a.aggregate) for a in artifacts]
    if with_reference:
        for name in dict.fromkeys(a.recipe for a in artifacts):
            if name in reference.MODELS:
                rows.append([f"reference:{name}", *reference.MODELS[name]])
    return METRIC_HEADER, rows


def resampling_comparison(artifacts, with_reference: bool = True):
    """Rows keyed by each artifact's resampling strategy."""
    rows = [[f"{a.config.resample} ({a.label})"] + _triple(a.aggregate) for a in artifacts]
    if with_reference:
        for name in dict.fromkeys(a.config.resample for a in artifacts):
            rows.append([f"reference:{name}", *reference.RESAMPLING[name]])
    return METRIC_HEADER, rows


def per_label_table(artifacts, with_reference: bool = True):
    rows = [[a.label, *a.aggregate.per_label_f1] for a in artifacts]
    if with_reference:
        for name in dict.fromkeys(a.recipe for a in artifacts):
            if name in reference.PER_LABEL_F1:
                rows.append([f"reference:{name}", *reference.PER_LABEL_F1[name]])
    return LEVEL_HEADER, rows


def _cell_key(classifier: str, row: str) -> str:
    features, _, prep = row.partition("+")
    return f"{classifier}/{features}/{prep or 'none'}"


def grid_table(grid, with_reference: bool = False):
    """Rows are feature/preprocessing variants, columns classifiers."""
    header = ["features"] + grid.columns
    rows = []
    for r in grid.rows:
        line = [r]
        for col in grid.columns:
            c = grid.cell(r, col)
            line.append(None if c is None else f"{c.weighted_f1:.4f}{c.annotation}")
        rows.append(line)
        if with_reference and r in reference.BASELINE_GRID:
            ref = reference.BASELINE_GRID[r]
            line = [f"reference:{r}"]
            for col in grid.columns:
                mark = reference.BASELINE_ANNOTATIONS.get(_cell_key(col, r), "")
                line.append(None if col not in ref else f"{ref[col]:.4f}{mark}")
            rows.append(line)
    return header, rows


# figures ----------------------------------------------------------------------


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    return plt


def distribution_figure(label_counts: dict, path) -> Path:
    """Bar chart of posts per risk level with percentage labels."""
    plt = _pyplot()
    names = [lvl.full_name for lvl in LEVELS]
    counts = np.array([label_counts.get(lvl.value, 0) for lvl in LEVELS], dtype=float)
    total = counts.sum() or 1.0
    fig, ax = plt.subplots(figsize=(5, 3.5))
    bars = ax.bar(names, counts, color="#4c72b0")
    for b, c in zip(bars, counts):
        ax.annotate(f"{100 * c / total:.2f}%", (b.get_x() + b.get_width() / 2, c), ha="center", va="bottom")
    ax.set_ylabel("posts")
    ax.set_title("Risk level distribution")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, format=path.suffix.lstrip(".") or "svg", metadata={"Date": None} if path.suffix == ".svg" else None)
    plt.close(fig)
    return path


def confusion_figure(confusion, path) -> Path:
    """Annotated heatmap of a (fold-summed) confusion matrix."""
    plt = _pyplot()
    m = np.asarray(confusion.counts)
    names = [lvl.full_name for lvl in LEVELS]
    fig, ax = plt.subplots(figsize=(4.5, 4))
    im = ax.imshow(m, cmap="Blues")
    ax.set_xticks(range(len(names)), names, rotation=30, ha="right")
    ax.set_yticks(range(len(names)), names)
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    hi = m.max() if m.size else 0
    for r in range(m.shape[0]):
        for c in range(m.shape[1]):
            ax.text(c, r, str(m[r, c]), ha="center", va="center", color="white" if m[r, c] > hi / 2 else "black")
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, format=path.suffix.lstrip(".") or "svg", metadata={"Date": None} if path.suffix == ".svg" else None)
    plt.close(fig)
    return path
