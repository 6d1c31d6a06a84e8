"""Joint encoder + head training (torch), used when the encoder is trainable."""

from __future__ import annotations

import copy
import logging

import numpy as np

from ..corpus.types import N_LEVELS
from ..exceptions import TrainingError

log = logging.getLogger(__name__)


def _val_predictions(encoder, head, pca_val, texts, batch_size):
    import torch

    from .classifier import severity_argmax

    preds = []
    encoder.model_.eval()
    with torch.no_grad():
        for start in range(0, len(texts), batch_size):
            batch = texts[start : start + batch_size]
            cls = encoder.cls_embeddings(encoder.batch_inputs(batch).to(encoder.device))
            fused = torch.cat([cls, pca_val[start : start + batch_size]], dim=1)
            probs = torch.softmax(head(fused), dim=1).double().cpu().numpy()
            preds.append(severity_argmax(probs))
    return np.concatenate(preds) if preds else np.zeros(0, dtype=int)


def fit_end_to_end(clf, X, y, X_val, y_val):
    """Fine-tune ``clf.featurizer_.encoder_`` together with a fresh linear head.

    Mirrors :meth:`HybridRiskClassifier._fit_head`: AdamW, per-epoch
    validation scoring, patience-based early stopping and restoration of the
    best-scoring parameters. Sets ``coef_``, ``intercept_``, ``history_``.
    """
    import torch

    from .classifier import _default_scorer

    feat = clf.featurizer_
    enc = feat.encoder_.load()
    torch.manual_seed(clf.random_state)
    rng = np.random.default_rng(clf.random_state)
    dev = enc.device

    pca_tr = torch.as_tensor(feat.pca_features(X), dtype=torch.float32, device=dev)
    pca_va = torch.as_tensor(feat.pca_features(X_val), dtype=torch.float32, device=dev) if len(X_val) else None
    d = feat.n_features_out_
    head = torch.nn.Linear(d, N_LEVELS).to(dev)
    weights = torch.as_tensor(clf.class_weight_, dtype=torch.float32, device=dev)
    params = list(enc.model_.parameters()) + list(head.parameters())
    opt = torch.optim.AdamW(params, lr=clf.learning_rate, weight_decay=clf.weight_decay)
    scorer = clf.scorer or _default_scorer
    y_t = torch.as_tensor(y, dtype=torch.long, device=dev)

    best_score, best_state, best_epoch, stale = -np.inf, None, 0, 0
    history = []
    for epoch in range(1, clf.max_epochs + 1):
        enc.model_.train()
        order = rng.permutation(len(X))
        total = 0.0
        for start in range(0, len(X), clf.batch_size):
            idx = order[start : start + clf.batch_size]
            inputs = enc.batch_inputs([X[i] for i in idx]).to(dev)
            fused = torch.cat([enc.cls_embeddings(inputs), pca_tr[idx]], dim=1)
            logp = torch.log_softmax(head(fused), dim=1)
            yb = y_t[idx]
            loss = -(weights[yb] * logp[torch.arange(len(idx)), yb]).sum() / len(idx)
            if not torch.isfinite(loss):
                raise TrainingError(f"non-finite loss at epoch {epoch}, batch starting {start}")
            opt.zero_grad()
            loss.backward()
            opt.step()
            total += loss.item() * len(idx)
        entry = {"epoch": epoch, "train_loss": total / len(X)}
        improved = True
        if pca_va is not None:
            score = float(scorer(y_val, _val_predictions(enc, head, pca_va, X_val, max(clf.batch_size, 8))))
            entry["val_score"] = score
            improved = score > best_score
            if improved:
                best_score = score
        if improved:
            best_state = (copy.deepcopy(enc.model_.state_dict()), copy.deepcopy(head.state_dict()))
            best_epoch, stale = epoch, 0
        else:
            stale += 1
        history.append(entry)
        log.info("fine-tune epoch %d %s", epoch, entry)
        if stale >= clf.patience:
            break

    enc.model_.load_state_dict(best_state[0])
    head.load_state_dict(best_state[1])
    enc.model_.eval()
    enc.invalidate_cache()
    clf.coef_ = head.weight.detach().double().cpu().numpy()
    clf.intercept_ = head.bias.detach().double().cpu().numpy()
    clf.history_ = history
    clf.best_epoch_ = best_epoch
    clf.encoder_finetuned_ = True
    return clf
