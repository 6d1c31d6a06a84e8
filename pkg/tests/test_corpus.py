import json
from datetime import datetime, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from riskfusion.corpus import (
    LEVELS,
    AnnotationSet,
    LabeledPost,
    Post,
    RiskLevel,
    compute_stats,
    count_word_tokens,
    fleiss_kappa,
    load_annotations,
    load_corpus,
    resolve_labels,
    write_corpus,
)
from riskfusion.corpus.io import dumps_record, format_timestamp, parse_timestamp, record_from_dict
from riskfusion.corpus.synthetic import label_counts, make_synthetic_corpus
from riskfusion.exceptions import CorpusParseError, DomainError, UndefinedAgreementError, ValidationError


def _post(i="p", title="t", body="b", **kw):
    return Post(id=i, user_id="u", title=title, body=body, **kw)


# types -------------------------------------------------------------------------


def test_risk_level_order_and_names():
    assert [l.value for l in LEVELS] == ["IN", "ID", "BR", "AT"]
    assert RiskLevel.IN < RiskLevel.AT
    assert RiskLevel.BR.full_name == "Behavior"
    assert RiskLevel.from_index(3) is RiskLevel.AT


def test_unknown_label_names_the_value():
    with pytest.raises(ValidationError, match="XX"):
        RiskLevel.parse("XX")


def test_post_requires_text():
    with pytest.raises(ValidationError):
        _post(title="", body="")
    with pytest.raises(ValidationError):
        _post(i="")


def test_scraped_timestamp_range():
    with pytest.raises(ValidationError):
        _post(source="scraped", created_utc=datetime(2001, 1, 1, tzinfo=timezone.utc))
    _post(source="scraped", created_utc=datetime(2010, 1, 1, tzinfo=timezone.utc))


def test_text_representations():
    p = _post(author_comments=("c1",))
    assert p.text == "t\nb"
    q = _post(author_comments=("c1",), representation="post_with_comments")
    assert q.text == "t\nb\nc1"
    assert p.all_text() == "t\nb\nc1"


# io ----------------------------------------------------------------------------


def test_load_fixture(fixtures):
    corpus = load_corpus(fixtures / "corpus_small.jsonl")
    assert [r.label for r in corpus] == [RiskLevel.ID, RiskLevel.IN, RiskLevel.BR, RiskLevel.AT]
    assert corpus[0].post.body.endswith("\U0001F622")


def test_round_trip(tmp_path, fixtures):
    corpus = load_corpus(fixtures / "corpus_small.jsonl")
    out = write_corpus(corpus, tmp_path / "c.jsonl")
    assert load_corpus(out) == corpus
    assert b"\r\n" not in out.read_bytes()


def test_malformed_line_reports_line_number(tmp_path):
    p = tmp_path / "bad.jsonl"
    p.write_text('{"id": "a", "title": "x", "body": "y", "label": "IN"}\n{not json\n')
    with pytest.raises(CorpusParseError, match="line 2"):
        load_corpus(p)


def test_duplicate_ids_rejected(tmp_path):
    rec = '{"id": "a", "title": "x", "body": "y", "label": "IN"}\n'
    p = tmp_path / "dup.jsonl"
    p.write_text(rec + rec)
    with pytest.raises(ValidationError, match="duplicate id"):
        load_corpus(p)


def test_unlabeled_records():
    d = {"id": "a", "title": "x", "body": "y", "label": None}
    assert isinstance(record_from_dict(d, strict=False), Post)
    with pytest.raises(ValidationError):
        record_from_dict(d, strict=True)


def test_timestamps():
    ts = parse_timestamp("2024-01-02T03:04:05Z")
    assert format_timestamp(ts) == "2024-01-02T03:04:05Z"
    assert parse_timestamp(None) is None


def test_dumps_record_keeps_unicode():
    rec = LabeledPost(_post(body="señor"), "IN")
    assert "señor" in dumps_record(rec)
    assert json.loads(dumps_record(rec))["label"] == "IN"


def test_load_annotations(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("item_id,annotator_1,annotator_2\nx,IN,IN\ny,IN,ID\n")
    ann = load_annotations(p)
    assert ann.n_items == 2 and ann.n_annotators == 2


# stats -------------------------------------------------------------------------


@pytest.mark.parametrize(
    "text,n", [("I can't go_on 123 \U0001F622!", 5), ("", 0), ("¡hola señor!", 2)]
)
def test_count_word_tokens(text, n):
    assert count_word_tokens(text) == n


def test_compute_stats_hand_case():
    s = compute_stats([_post("1", title="a b", body=""), _post("2", title="", body="b c")])
    assert (s.n_posts, s.n_users, s.n_distinct_tokens, s.avg_tokens_per_post) == (2, 1, 3, 2.0)


def test_compute_stats_empty():
    with pytest.raises(DomainError):
        compute_stats([])


# agreement ---------------------------------------------------------------------


def test_kappa_hand_cases():
    assert fleiss_kappa(AnnotationSet(("1", "2"), (("IN",) * 3, ("ID",) * 3))) == 1.0
    k = fleiss_kappa(AnnotationSet(("1", "2"), (("IN", "IN"), ("IN", "ID"))))
    assert abs(k - (-1 / 3)) < 1e-12


def test_kappa_undefined_when_single_category():
    with pytest.raises(UndefinedAgreementError):
        fleiss_kappa(AnnotationSet(("1", "2"), (("IN", "IN"), ("IN", "IN"))))


def test_kappa_needs_two_items_and_raters():
    with pytest.raises(DomainError):
        fleiss_kappa(AnnotationSet(("1",), (("IN", "ID"),)))


def test_ragged_ratings_rejected():
    with pytest.raises(ValidationError):
        AnnotationSet(("1", "2"), (("IN", "IN"), ("IN",)))


def test_resolve_labels_majority_and_tie():
    ann = AnnotationSet(("a", "b"), (("IN", "IN", "ID"), ("ID", "BR", "IN")))
    out = resolve_labels(ann)
    assert out["a"] is RiskLevel.IN
    assert out["b"] is RiskLevel.BR


@given(st.integers(2, 6), st.integers(2, 5), st.randoms(use_true_random=False))
def test_kappa_bounded(n_items, n_raters, rnd):
    rows = tuple(tuple(rnd.choice(LEVELS) for _ in range(n_raters)) for _ in range(n_items))
    try:
        k = fleiss_kappa(AnnotationSet(tuple(map(str, range(n_items))), rows))
    except UndefinedAgreementError:
        return
    assert -1.0 - 1e-12 <= k <= 1.0 + 1e-12


# synthetic ---------------------------------------------------------------------


def test_reference_label_counts():
    c = label_counts(2999)
    assert [c[l] for l in LEVELS] == [846, 1358, 539, 256]


def test_synthetic_corpus_deterministic_and_sized():
    a = make_synthetic_corpus(50, seed=3)
    b = make_synthetic_corpus(50, seed=3)
    assert a == b and len(a) == 50
    assert len({s.id for s in a}) == 50


@pytest.mark.parametrize(
    "ratings,expected",
    [(("ID", "ID", "IN"), "ID"), (("ID", "BR"), "BR"), (("IN", "IN", "AT", "AT"), "AT")],
)
def test_resolve_label_examples(ratings, expected):
    ann = AnnotationSet(("x", "y"), (ratings, ratings))
    assert resolve_labels(ann)["x"] is RiskLevel.parse(expected)


_ratings = st.integers(2, 5).flatmap(
    lambda r: st.lists(st.lists(st.sampled_from(LEVELS), min_size=r, max_size=r), min_size=2, max_size=8)
)


@given(_ratings, st.randoms(use_true_random=False))
def test_kappa_and_resolution_permutation_invariant(rows, rnd):
    ids = tuple(str(i) for i in range(len(rows)))
    base = AnnotationSet(ids, tuple(map(tuple, rows)))
    cols = list(range(len(rows[0])))
    rnd.shuffle(cols)
    order = list(range(len(rows)))
    rnd.shuffle(order)
    perm = AnnotationSet(
        tuple(ids[i] for i in order), tuple(tuple(rows[i][c] for c in cols) for i in order)
    )
    assert resolve_labels(base) == resolve_labels(perm)
    try:
        k = fleiss_kappa(base)
    except UndefinedAgreementError:
        with pytest.raises(UndefinedAgreementError):
            fleiss_kappa(perm)
        return
    assert abs(k - fleiss_kappa(perm)) < 1e-12


_text = st.text(st.characters(blacklist_categories=("Cs",)), max_size=40)


@given(st.lists(st.tuples(_text, _text, st.sampled_from(LEVELS)), min_size=1, max_size=6))
def test_stats_invariants(items):
    items = [(t, b or "x", l) for t, b, l in items]
    recs = [LabeledPost(_post(str(i), title=t, body=b), l) for i, (t, b, l) in enumerate(items)]
    s = compute_stats(recs)
    assert abs(sum(s.label_proportions.values()) - 1.0) < 1e-9
    assert s.n_distinct_tokens <= sum(count_word_tokens(r.post.all_text()) for r in recs)


@given(st.lists(st.tuples(_text, _text, st.sampled_from(LEVELS)), min_size=1, max_size=5))
def test_write_load_round_trip_bytes(tmp_path_factory, items):
    d = tmp_path_factory.mktemp("rt")
    recs = [LabeledPost(_post(str(i), title=t, body=b or "x"), l) for i, (t, b, l) in enumerate(items)]
    first = write_corpus(recs, d / "a.jsonl")
    second = write_corpus(load_corpus(first), d / "b.jsonl")
    assert first.read_bytes() == second.read_bytes()
