import math
from collections import Counter
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from riskfusion.corpus import LEVELS, RiskLevel
from riskfusion.exceptions import DomainError, NumericError, ShapeError
from riskfusion.training import (
    AdamW,
    HybridRiskClassifier,
    TrainConfig,
    ce_loss,
    class_weights,
    forward,
    loss_and_grad,
    oversample,
    resample,
    severity_argmax,
    softmax,
    undersample,
    weighted_ce_loss,
)
from riskfusion.validation import TRAIN, VAL, tag

IN, ID, BR, AT = LEVELS


# forward / losses ----------------------------------------------------------------


def test_forward_examples():
    assert np.allclose(forward(np.ones(5), np.zeros((4, 5)), np.zeros(4)), 0.25)
    assert np.allclose(softmax([math.log(2), 0, 0, 0]), [0.4, 0.2, 0.2, 0.2])
    p = softmax([1000.0, 0, 0, 0])
    assert np.all(np.isfinite(p)) and p[0] == pytest.approx(1.0)


def test_forward_errors():
    with pytest.raises(NumericError):
        forward(np.array([np.nan, 0]), np.zeros((4, 2)), np.zeros(4))
    with pytest.raises(ShapeError):
        forward(np.ones(3), np.zeros((4, 2)), np.zeros(4))


@given(arrays(np.float64, st.tuples(st.integers(1, 5), st.just(4)), elements=st.floats(-1e6, 1e6)))
def test_softmax_is_a_distribution(z):
    p = softmax(z)
    assert np.all((p >= 0) & (p <= 1))
    assert np.allclose(p.sum(axis=1), 1.0, atol=1e-6)


def test_ce_loss_examples():
    assert ce_loss(np.eye(4), [0, 1, 2, 3]) == 0.0
    assert ce_loss(np.full((3, 4), 0.25), ["IN", "BR", "AT"]) == pytest.approx(math.log(4))
    assert ce_loss(np.array([[1.0, 0, 0, 0]]), [1]) == pytest.approx(-math.log(1e-12))
    assert ce_loss(np.array([[1.0, 0, 0, 0]]), [1]) == pytest.approx(27.631, abs=1e-3)


def test_weighted_loss_examples():
    p = np.array([[0.5, 0.5, 0, 0]])
    assert weighted_ce_loss(p, [0], [2, 1, 1, 1]) == pytest.approx(2 * math.log(2))
    assert weighted_ce_loss(np.eye(4), [0, 1, 2, 3], [3, 5, 7, 9]) == 0.0


@given(
    arrays(np.float64, st.tuples(st.integers(1, 6), st.just(4)), elements=st.floats(-20, 20)),
    st.floats(0.1, 50),
    st.data(),
)
def test_uniform_weights_scale_ce(z, k, data):
    p = softmax(z)
    y = data.draw(st.lists(st.integers(0, 3), min_size=len(p), max_size=len(p)))
    assert abs(weighted_ce_loss(p, y, [k] * 4) - k * ce_loss(p, y)) <= 1e-12 * max(1, k * ce_loss(p, y))


def test_class_weight_examples():
    w = class_weights({IN: 846, ID: 1358, BR: 539, AT: 256}, 2999)
    assert np.allclose(w, [3.5449, 2.2084, 5.5640, 11.7148], atol=1e-4)
    assert class_weights([5, 5, 5, 5], 20).tolist() == [4, 4, 4, 4]
    assert class_weights([1, 1, 1, 1]).tolist() == [4, 4, 4, 4]
    with pytest.raises(DomainError, match="AT"):
        class_weights([3, 2, 1, 0])


@given(st.integers(0, 10_000), st.integers(1, 6), st.integers(1, 5), st.booleans())
def test_gradient_matches_finite_differences(seed, n, d, weighted):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    y = rng.integers(0, 4, size=n)
    W = rng.normal(size=(4, d))
    b = rng.normal(size=4)
    cw = rng.uniform(0.5, 3, size=4) if weighted else None
    _, dW, db = loss_and_grad(X, y, W, b, cw)
    h = 1e-5

    def f(W_, b_):
        return loss_and_grad(X, y, W_, b_, cw)[0]

    num = np.zeros_like(W)
    for idx in np.ndindex(W.shape):
        Wp, Wm = W.copy(), W.copy()
        Wp[idx] += h
        Wm[idx] -= h
        num[idx] = (f(Wp, b) - f(Wm, b)) / (2 * h)
        rel = abs(num[idx] - dW[idx]) / max(1e-6, abs(num[idx]) + abs(dW[idx]))
        assert rel < 1e-4
    nb = np.array([(f(W, b + h * e) - f(W, b - h * e)) / (2 * h) for e in np.eye(4)])
    assert np.allclose(nb, db, rtol=1e-4, atol=1e-8)


# optimizer -----------------------------------------------------------------------


def test_adamw_decay_is_decoupled():
    p = np.array([1.0])
    opt = AdamW([p], lr=0.1, weight_decay=0.5)
    opt.step([np.zeros(1)])
    # zero gradient: only the decay moves the parameter
    assert p[0] == pytest.approx(1 - 0.1 * 0.5)


def test_adamw_first_step_magnitude():
    p = np.array([0.0, 0.0])
    AdamW([p], lr=0.01, weight_decay=0.0).step([np.array([3.0, -0.5])])
    assert np.allclose(p, [-0.01, 0.01], atol=1e-8)


def test_adamw_rejects_bad_lr():
    with pytest.raises(ValueError):
        AdamW([np.zeros(1)], lr=0)


# resampling ----------------------------------------------------------------------


class S:
    def __init__(self, i, label):
        self.id, self.label = i, label

    def __repr__(self):
        return f"S({self.id})"


def _set(counts):
    out = []
    for lvl, c in zip(LEVELS, counts):
        out += [S(f"{lvl.value}{j}", lvl) for j in range(c)]
    return out


def _counts(samples):
    c = Counter(s.label for s in samples)
    return [c[l] for l in LEVELS]


def test_oversample_examples():
    data = _set([2, 5, 3, 1])
    out = oversample(data, seed=0)
    assert _counts(out) == [5, 5, 5, 5] and len(out) == 20
    assert sum(s.id == "AT0" for s in out) == 5
    bal = _set([2, 2, 2, 2])
    assert sorted(map(id, oversample(bal))) == sorted(map(id, bal))


def test_undersample_examples():
    data = _set([2, 5, 3, 1])
    out = undersample(data, seed=0)
    assert _counts(out) == [1, 1, 1, 1]
    assert [s.id for s in undersample(data, seed=4)] == [s.id for s in undersample(data, seed=4)]
    bal = _set([2, 2, 2, 2])
    assert undersample(bal) == bal


def test_resampling_requires_all_categories():
    with pytest.raises(DomainError):
        oversample(_set([1, 1, 1, 0]))
    with pytest.raises(DomainError):
        undersample(_set([0, 1, 1, 1]))
    with pytest.raises(ValueError):
        resample(_set([1, 1, 1, 1]), "smote")


@given(st.lists(st.integers(1, 7), min_size=4, max_size=4), st.integers(0, 99))
def test_resampling_multiset_properties(counts, seed):
    data = _set(counts)
    over, under = oversample(data, seed), undersample(data, seed)
    assert len(set(_counts(over))) == 1 and len(set(_counts(under))) == 1
    c_in, c_over, c_under = Counter(map(id, data)), Counter(map(id, over)), Counter(map(id, under))
    assert all(c_over[k] >= v for k, v in c_in.items())
    assert all(c_in[k] >= v for k, v in c_under.items())


# classifier ----------------------------------------------------------------------


def test_severity_tie_break():
    assert severity_argmax([0.1, 0.2, 0.3, 0.4]).tolist() == [3]
    assert severity_argmax([0.25] * 4).tolist() == [3]
    assert severity_argmax([[0.4, 0.4, 0.1, 0.1], [0.5, 0.2, 0.2, 0.1]]).tolist() == [1, 0]


def test_train_config_validation():
    for bad in ({"learning_rate": 0}, {"batch_size": 0}, {"early_stop_patience": 0}, {"resample": "x"}):
        with pytest.raises(ValueError):
            TrainConfig(**bad)


def _split(corpus, n_train, n_val):
    tr, va = corpus[:n_train], corpus[n_train : n_train + n_val]
    return (
        tag([s.text for s in tr], TRAIN), [s.label for s in tr],
        tag([s.text for s in va], VAL), [s.label for s in va],
    )


def _fast(**kw):
    return HybridRiskClassifier(max_features=300, n_components=30, learning_rate=1e-2, **kw)


def test_separable_synthetic_reaches_high_val_f1(synthetic_corpus):
    X, y, Xv, yv = _split(synthetic_corpus, 300, 100)
    clf = _fast().fit(X, y, Xv, yv)
    assert max(h["val_score"] for h in clf.history_) >= 0.95
    assert len(clf.history_) <= 20


def test_early_stop_on_worsening_scorer(synthetic_corpus):
    X, y, Xv, yv = _split(synthetic_corpus, 40, 20)
    scores = iter([0.9, 0.8, 0.7, 0.6])
    clf = _fast(patience=1, scorer=lambda a, b: next(scores)).fit(X, y, Xv, yv)
    assert len(clf.history_) == 2 and clf.best_epoch_ == 1

    # epoch-1 parameters are the ones kept
    ref = _fast(patience=1, max_epochs=1).fit(X, y, Xv, yv)
    assert np.array_equal(clf.coef_, ref.coef_)


def test_training_is_deterministic(synthetic_corpus):
    X, y, Xv, yv = _split(synthetic_corpus, 80, 30)
    a = _fast(max_epochs=4).fit(X, y, Xv, yv)
    b = _fast(max_epochs=4).fit(X, y, Xv, yv)
    assert a.history_ == b.history_ and np.array_equal(a.coef_, b.coef_)


def test_predict_outputs(synthetic_corpus):
    X, y, Xv, yv = _split(synthetic_corpus, 80, 30)
    clf = _fast(max_epochs=3).fit(X, y, Xv, yv)
    out = clf.predict_with_proba(Xv[:7])
    assert len(out) == 7
    for (lvl, p), q in zip(out, clf.predict_proba(Xv[:7])):
        assert isinstance(lvl, RiskLevel) and np.array_equal(p, q)
        assert abs(p.sum() - 1) < 1e-6
    assert clf.predict([]).shape == (0,)


def test_weighted_loss_uses_inverse_proportions(synthetic_corpus):
    X, y, Xv, yv = _split(synthetic_corpus, 80, 30)
    clf = HybridRiskClassifier.from_config(
        TrainConfig(resample="weighted_loss", max_epochs=1, learning_rate=1e-2),
        features=None,
    ).set_params(max_features=100, n_components=10)
    clf.fit(X, y, Xv, yv)
    c = Counter(y)
    assert np.allclose(clf.class_weight_, [80 / c[l] for l in LEVELS])


def test_empty_training_set():
    with pytest.raises(DomainError):
        _fast().fit([], [])


def test_save_load_round_trip(tmp_path, synthetic_corpus):
    X, y, Xv, yv = _split(synthetic_corpus, 80, 30)
    clf = _fast(max_epochs=3).fit(X, y, Xv, yv)
    files = clf.save(tmp_path / "m")
    assert set(files) == {"head", "features"}
    back = HybridRiskClassifier.load(tmp_path / "m")
    assert np.array_equal(back.predict_proba(Xv), clf.predict_proba(Xv))


def test_fine_tune_tiny_checkpoint(tmp_path, tiny_checkpoint, synthetic_corpus):
    from riskfusion.features import CheckpointEncoder

    X, y, Xv, yv = _split(synthetic_corpus, 24, 8)
    enc = CheckpointEncoder(tiny_checkpoint).load()
    clf = HybridRiskClassifier(
        encoder=enc, max_features=100, n_components=5, learning_rate=1e-3, max_epochs=2, batch_size=8
    ).fit(X, y, Xv, yv)
    assert 1 <= len(clf.history_) <= 2
    clf.save(tmp_path / "ft")
    assert (tmp_path / "ft" / "encoder").is_dir()
    back = HybridRiskClassifier.load(tmp_path / "ft")
    assert np.allclose(back.predict_proba(Xv), clf.predict_proba(Xv), atol=1e-6)


def test_frozen_checkpoint_trains_head_only(tiny_checkpoint, synthetic_corpus):
    from riskfusion.features import CheckpointEncoder

    X, y, Xv, yv = _split(synthetic_corpus, 24, 8)
    enc = CheckpointEncoder(tiny_checkpoint).load()
    before = {k: v.clone() for k, v in enc.model_.state_dict().items()}
    HybridRiskClassifier(encoder=enc, max_features=100, n_components=5, max_epochs=1, fine_tune_encoder=False).fit(
        X, y, Xv, yv
    )
    after = enc.model_.state_dict()
    assert all((before[k] == after[k]).all() for k in before)
