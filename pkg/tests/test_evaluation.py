from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from riskfusion.corpus import LEVELS
from riskfusion.corpus.synthetic import make_synthetic_corpus
from riskfusion.evaluation import (
    ConfusionMatrix,
    FoldPlan,
    MetricsReport,
    aggregate_reports,
    confusion_matrix,
    evaluate,
    make_folds,
    per_label_report,
    run_cv,
    weighted_metrics,
)
from riskfusion.exceptions import DomainError, FoldError, ShapeError
from riskfusion.features import FeatureConfig
from riskfusion.training import TrainConfig
from riskfusion.validation import TRAIN

IN, ID, BR, AT = LEVELS


class P:
    def __init__(self, i, label):
        self.id, self.label = str(i), label


def _corpus(labels):
    return [P(i, l) for i, l in enumerate(labels)]


# folds ---------------------------------------------------------------------------


def test_reference_fold_sizes():
    corpus = _corpus([LEVELS[i % 4] for i in range(2999)])
    plan = make_folds(corpus, k=5, seed=0)
    assert [len(f.test_ids) for f in plan.folds] == [600, 600, 600, 600, 599]
    f0 = plan.folds[0]
    assert (len(f0.train_ids), len(f0.val_ids)) in ((1919, 480), (1920, 479))


def test_folds_deterministic_and_seeded():
    corpus = _corpus([LEVELS[i % 4] for i in range(50)])
    assert make_folds(corpus, seed=3) == make_folds(corpus, seed=3)
    assert make_folds(corpus, seed=3) != make_folds(corpus, seed=4)


def test_folds_round_trip():
    plan = make_folds(_corpus([LEVELS[i % 4] for i in range(23)]), seed=1)
    assert FoldPlan.from_dict(plan.to_dict()) == plan


def test_folds_errors():
    with pytest.raises(DomainError):
        make_folds(_corpus([IN] * 4), k=5)
    with pytest.raises(DomainError):
        make_folds([P(1, IN)] * 6, k=5)


@given(st.lists(st.sampled_from(LEVELS), min_size=5, max_size=120), st.integers(0, 2**31 - 1), st.integers(2, 5))
def test_fold_plan_invariants(labels, seed, k):
    corpus = _corpus(labels)
    if len(corpus) < k:
        return
    plan = make_folds(corpus, k=k, seed=seed)
    ids = {p.id for p in corpus}
    label_of = {p.id: p.label for p in corpus}
    tests = [set(f.test_ids) for f in plan.folds]
    assert set().union(*tests) == ids and sum(map(len, tests)) == len(ids)
    sizes = [len(t) for t in tests]
    assert max(sizes) - min(sizes) <= 1
    for f in plan.folds:
        tr, va, te = set(f.train_ids), set(f.val_ids), set(f.test_ids)
        assert not (tr & va) and not (tr & te) and not (va & te)
        assert tr | va == ids - te
        rest = Counter(label_of[i] for i in tr | va)
        held = Counter(label_of[i] for i in va)
        for lvl, n in rest.items():
            assert abs(held[lvl] - 0.2 * n) <= 1


# metrics -------------------------------------------------------------------------


def test_confusion_examples():
    assert confusion_matrix(LEVELS, LEVELS).counts.tolist() == np.eye(4, dtype=int).tolist()
    c = confusion_matrix([IN, IN], [ID, ID])
    assert c[IN, ID] == 2 and c.total == 2
    with pytest.raises(ShapeError):
        confusion_matrix([IN], [IN, ID])
    assert confusion_matrix([IN], [AT]).to_csv().splitlines()[0] == "true\\pred,IN,ID,BR,AT"


def test_weighted_metrics_hand_case():
    r = evaluate(["IN", "IN", "ID"], ["IN", "ID", "ID"])
    assert r.weighted_precision == pytest.approx(0.8333, abs=1e-4)
    assert r.weighted_recall == pytest.approx(2 / 3)
    assert r.weighted_f1 == pytest.approx(2 / 3)
    assert r.per_label_f1[:2] == pytest.approx((2 / 3, 2 / 3))


def test_perfect_and_zero_column():
    r = evaluate(LEVELS, LEVELS)
    assert (r.weighted_precision, r.weighted_recall, r.weighted_f1) == (1.0, 1.0, 1.0)
    r = evaluate([IN, ID], [IN, IN])
    assert r.per_label_precision[1] == 0.0 and r.per_label_f1[1] == 0.0
    with pytest.raises(DomainError):
        weighted_metrics(ConfusionMatrix(np.zeros((4, 4))))


def _brute(y_true, y_pred):
    n = len(y_true)
    out = {"p": 0.0, "r": 0.0, "f": 0.0}
    for c in range(4):
        tp = sum(t == c and p == c for t, p in zip(y_true, y_pred))
        pred = sum(p == c for p in y_pred)
        sup = sum(t == c for t in y_true)
        prec = tp / pred if pred else 0.0
        rec = tp / sup if sup else 0.0
        f = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        out["p"] += sup * prec / n
        out["r"] += sup * rec / n
        out["f"] += sup * f / n
    return out


_pairs = st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=200)


@given(_pairs)
def test_metrics_match_brute_force(pairs):
    t, p = zip(*pairs)
    r = evaluate(list(t), list(p))
    b = _brute(t, p)
    assert r.weighted_precision == pytest.approx(b["p"], abs=1e-12)
    assert r.weighted_recall == pytest.approx(b["r"], abs=1e-12)
    assert r.weighted_f1 == pytest.approx(b["f"], abs=1e-12)
    # weighted recall is accuracy
    assert r.weighted_recall == pytest.approx(sum(a == b for a, b in pairs) / len(pairs))
    assert sum(r.support) == len(pairs)
    assert all(0 <= v <= 1 for v in (r.weighted_precision, r.weighted_recall, r.weighted_f1))


@given(_pairs, st.permutations(range(4)))
def test_metrics_label_permutation(pairs, perm):
    t, p = zip(*pairs)
    a = evaluate(list(t), list(p))
    b = evaluate([perm[x] for x in t], [perm[x] for x in p])
    inv = np.argsort(perm)
    assert np.array_equal(b.confusion.counts[np.ix_(perm, perm)][np.ix_(inv, inv)], b.confusion.counts)
    assert np.array_equal(b.confusion.counts[np.ix_(perm, perm)], a.confusion.counts)
    assert b.weighted_f1 == pytest.approx(a.weighted_f1, abs=1e-12)
    assert b.weighted_precision == pytest.approx(a.weighted_precision, abs=1e-12)


def test_report_round_trip():
    r = evaluate([0, 1, 2, 3, 3], [0, 1, 1, 3, 2])
    assert MetricsReport.from_dict(r.to_dict()) == r


def test_aggregation_means_scalars_and_sums_confusion():
    a = evaluate([0, 0, 1], [0, 0, 1])
    b = evaluate([0, 1, 1, 2], [1, 1, 1, 2])
    agg = aggregate_reports([a, b])
    assert agg.weighted_f1 == pytest.approx((a.weighted_f1 + b.weighted_f1) / 2)
    assert agg.confusion.total == 7
    assert per_label_report([a, a]) == a.per_label_f1


def test_per_label_mean_of_two():
    a = evaluate([0, 0, 1, 1, 0], [0, 1, 1, 1, 0])
    b = evaluate([0, 1], [0, 1])
    m = per_label_report([a, b])
    assert m[1] == pytest.approx((a.per_label_f1[1] + 1.0) / 2)


# cross-validation ----------------------------------------------------------------


def _small():
    return make_synthetic_corpus(120, seed=1)


FAST = dict(features=FeatureConfig(max_features=300, n_components=20), train=TrainConfig(learning_rate=1e-2))


def test_cv_confusion_total_is_corpus_size():
    corpus = _small()
    res = run_cv(corpus, "hybrid", k=3, seed=0, **FAST)
    assert len(res.fold_reports) == 3
    assert res.aggregate.confusion.total == len(corpus)
    meta = res.fold_meta[0]
    assert meta["n_train_raw"] + meta["n_val"] + meta["n_test"] == len(corpus)
    assert set(meta) >= {"train_counts", "n_components", "best_epoch", "history", "truncated_texts"}


def test_cv_deterministic():
    corpus = _small()
    a = run_cv(corpus, "encoder_only", k=3, seed=2, **FAST)
    b = run_cv(corpus, "encoder_only", k=3, seed=2, **FAST)
    assert a.to_dict() == b.to_dict()


def test_cv_never_fits_on_val_or_test(monkeypatch):
    from riskfusion.features import tfidf

    corpus = _small()
    plan = make_folds(corpus, k=3, seed=0)
    seen = []
    orig = tfidf.TfidfVectorizer.fit

    def spy(self, X, y=None):
        seen.append({t.source_id for t in X if t.split == TRAIN})
        assert all(t.split == TRAIN for t in X)
        return orig(self, X, y)

    monkeypatch.setattr(tfidf.TfidfVectorizer, "fit", spy)
    run_cv(corpus, "hybrid", plan=plan, **FAST)
    run_cv(corpus, "baseline:logistic_regression/tfidf/stemming", plan=plan, **FAST)
    assert len(seen) == 6
    for ids, fold in zip(seen, plan.folds * 2):
        assert ids == set(fold.train_ids)


def test_cv_resampling_touches_train_only():
    corpus = _small()
    res = run_cv(corpus, "hybrid", k=3, seed=0, features=FAST["features"],
                 train=TrainConfig(learning_rate=1e-2, max_epochs=2, resample="oversample"))
    for meta, fold in zip(res.fold_meta, res.plan.folds):
        counts = list(meta["train_counts"].values())
        assert len(set(counts)) == 1
        assert meta["n_test"] == len(fold.test_ids)


def test_fold_failure_names_the_fold():
    # too few posts to leave every category in each fold's train split
    corpus = make_synthetic_corpus(12, seed=0)
    with pytest.raises(FoldError, match="fold 0"):
        run_cv(corpus, "hybrid", k=2, seed=0, features=FeatureConfig(max_features=50, n_components=1),
               train=TrainConfig(resample="undersample", max_epochs=1))


def test_unknown_recipe():
    with pytest.raises(ValueError):
        run_cv(_small(), "bert", k=3)
