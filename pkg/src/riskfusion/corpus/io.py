"""JSONL corpus and CSV annotation file formats."""

from __future__ import annotations

import csv
import json
import os
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Union

from ..exceptions import CorpusParseError, ValidationError
from .types import AnnotationSet, LabeledPost, Post, RiskLevel

Record = Union[Post, LabeledPost]

FIELDS = (
    "id",
    "user_id",
    "title",
    "body",
    "author_comments",
    "created_utc",
    "source",
    "representation",
    "label",
)


def parse_timestamp(value) -> datetime | None:
    if value is None:
        return None
    if not isinstance(value, str):
        raise ValidationError(f"created_utc must be an ISO-8601 string or null, got {value!r}")
    s = value[:-1] + "+00:00" if value.endswith("Z") else value
    try:
        ts = datetime.fromisoformat(s)
    except ValueError:
        raise ValidationError(f"invalid ISO-8601 timestamp {value!r}") from None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime | None) -> str | None:
    if ts is None:
        return None
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def record_from_dict(d: dict, strict: bool = True) -> Record:
    if not isinstance(d, dict):
        raise ValidationError("record must be a JSON object")
    missing = [k for k in ("id", "title", "body") if k not in d]
    if missing:
        raise ValidationError(f"missing required field(s): {', '.join(missing)}")
    comments = d.get("author_comments") or []
    if not isinstance(comments, list) or not all(isinstance(c, str) for c in comments):
        raise ValidationError("author_comments must be a list of strings")
    post = Post(
        id=str(d["id"]),
        user_id=str(d.get("user_id") or ""),
        title=d["title"] or "",
        body=d["body"] or "",
        author_comments=tuple(comments),
        created_utc=parse_timestamp(d.get("created_utc")),
        source=d.get("source", "provided"),
        representation=d.get("representation", "post_only"),
    )
    label = d.get("label")
    if label is None:
        if strict:
            raise ValidationError(f"record {post.id!r} has no label (strict mode)")
        return post
    return LabeledPost(post, RiskLevel.parse(label), augmented_from=d.get("augmented_from"))


def record_to_dict(rec: Record) -> dict:
    post = rec.post if isinstance(rec, LabeledPost) else rec
    d = {
        "id": post.id,
        "user_id": post.user_id,
        "title": post.title,
        "body": post.body,
        "author_comments": list(post.author_comments),
        "created_utc": format_timestamp(post.created_utc),
        "source": post.source,
        "representation": post.representation,
        "label": rec.label.value if isinstance(rec, LabeledPost) else None,
    }
    if isinstance(rec, LabeledPost) and rec.augmented_from is not None:
        d["augmented_from"] = rec.augmented_from
    return d


def iter_corpus(path, strict: bool = True):
    seen: set[str] = set()
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                d = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusParseError(f"malformed JSON: {exc.msg}", line=lineno) from None
            try:
                rec = record_from_dict(d, strict=strict)
            except ValidationError as exc:
                raise ValidationError(f"line {lineno}: {exc}") from None
            rid = rec.id if isinstance(rec, LabeledPost) else rec.id
            if rid in seen:
                raise ValidationError(f"line {lineno}: duplicate id {rid!r}")
            seen.add(rid)
            yield rec


def load_corpus(path, strict: bool = True) -> list[Record]:
    """Read a JSONL corpus.

    Parameters
    ----------
    path : path-like
        One JSON record per line, UTF-8.
    strict : bool, default=True
        When true every record must carry a label.

    Returns
    -------
    list of LabeledPost, with bare Post entries for unlabeled records
    (non-strict mode only).
    """
    return list(iter_corpus(path, strict=strict))


def dumps_record(rec: Record) -> str:
    return json.dumps(record_to_dict(rec), ensure_ascii=False)


def write_corpus(records: Iterable[Record], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(dumps_record(rec))
            fh.write("\n")
    os.replace(tmp, path)
    return path


def load_annotations(path) -> AnnotationSet:
    """Read an annotation CSV with header ``item_id, annotator_1..annotator_n``."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CorpusParseError("empty annotation file", line=1) from None
        if not header or header[0].strip() != "item_id" or len(header) < 3:
            raise CorpusParseError("header must be item_id, annotator_1, ..., annotator_n (n >= 2)", line=1)
        ids, rows = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise CorpusParseError(f"expected {len(header)} columns, got {len(row)}", line=lineno)
            try:
                rows.append(tuple(RiskLevel.parse(v.strip()) for v in row[1:]))
            except ValidationError as exc:
                raise CorpusParseError(str(exc), line=lineno) from None
            ids.append(row[0].strip())
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate item_id in annotation file")
    return AnnotationSet(tuple(ids), tuple(rows))
