"""Sentence encoders producing a 768-wide CLS-style embedding.

Two backends share one contract: ``encode(text) -> (embedding, n_tokens)``,
``transform(texts) -> (n, 768)`` and ``count_tokens(text)``. Inputs longer
than ``max_tokens`` are truncated silently; each distinct truncated text is
counted once in ``truncation_count_``.
"""

from __future__ import annotations

import hashlib
import re
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ..exceptions import EncoderInitError
from ..validation import check_texts

ENCODER_DIM = 768
MAX_ENCODER_TOKENS = 512

_PRETOKEN_RE = re.compile(r"\w+|[^\w\s]")


class _TruncationMixin:
    def reset_metadata(self):
        self.truncated_ = set()
        return self

    @property
    def truncation_count_(self) -> int:
        return len(getattr(self, "truncated_", ()))

    def _note_truncation(self, text):
        if not hasattr(self, "truncated_"):
            self.truncated_ = set()
        self.truncated_.add(hashlib.blake2b(text.encode("utf-8"), digest_size=16).digest())


class StubEncoder(_TruncationMixin, BaseEstimator, TransformerMixin):
    """Deterministic hashing encoder for hermetic runs.

    Lower-cased word/punctuation pre-tokens and their bigrams are hashed
    (BLAKE2b) into ``dim`` signed buckets and the result is L2-normalised.
    The embedding is a pure function of the text bytes.
    """

    trainable = False

    def __init__(self, dim=ENCODER_DIM, max_tokens=MAX_ENCODER_TOKENS, bigram_weight=0.5):
        self.dim = dim
        self.max_tokens = max_tokens
        self.bigram_weight = bigram_weight

    def fit(self, X=None, y=None):
        return self

    def tokenize(self, text: str) -> list[str]:
        return [t.lower() for t in _PRETOKEN_RE.findall(text)]

    def count_tokens(self, text: str) -> int:
        return len(self.tokenize(text))

    def _bucket(self, feature: str):
        h = int.from_bytes(hashlib.blake2b(feature.encode("utf-8"), digest_size=8).digest(), "little")
        return h % self.dim, (1.0 if (h >> 63) & 1 else -1.0)

    def encode(self, text: str):
        toks = self.tokenize(text)
        n = len(toks)
        if n > self.max_tokens:
            self._note_truncation(text)
            toks = toks[: self.max_tokens]
        vec = np.zeros(self.dim)
        for t in toks:
            i, s = self._bucket("u:" + t)
            vec[i] += s
        for a, b in zip(toks, toks[1:]):
            i, s = self._bucket("b:" + a + " " + b)
            vec[i] += s * self.bigram_weight
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec /= norm
        return vec, n

    def transform(self, X):
        X = check_texts(X)
        out = np.zeros((len(X), self.dim))
        for r, text in enumerate(X):
            out[r] = self.encode(text)[0]
        return out


class CheckpointEncoder(_TruncationMixin, BaseEstimator, TransformerMixin):
    """Final-layer CLS embedding of a pretrained RoBERTa-family checkpoint.

    Parameters
    ----------
    checkpoint_path : str or Path
        Local directory loadable by ``transformers.AutoModel``.
    model, tokenizer : optional
        Pre-built objects, bypassing ``checkpoint_path``.
    cache : bool, default=True
        Memoise embeddings by text while the model is frozen.
    """

    trainable = True

    def __init__(
        self,
        checkpoint_path=None,
        max_tokens=MAX_ENCODER_TOKENS,
        batch_size=8,
        device="cpu",
        cache=True,
        model=None,
        tokenizer=None,
    ):
        self.checkpoint_path = checkpoint_path
        self.max_tokens = max_tokens
        self.batch_size = batch_size
        self.device = device
        self.cache = cache
        self.model = model
        self.tokenizer = tokenizer

    def load(self):
        if getattr(self, "model_", None) is not None:
            return self
        if self.model is not None and self.tokenizer is not None:
            self.model_, self.tokenizer_ = self.model, self.tokenizer
        else:
            if not self.checkpoint_path or not Path(self.checkpoint_path).exists():
                raise EncoderInitError(f"encoder checkpoint not found: {self.checkpoint_path!r}")
            try:
                from transformers import AutoModel, AutoTokenizer

                self.tokenizer_ = AutoTokenizer.from_pretrained(str(self.checkpoint_path))
                self.model_ = AutoModel.from_pretrained(str(self.checkpoint_path))
            except Exception as exc:  # corrupt or incompatible checkpoint
                raise EncoderInitError(f"cannot load checkpoint {self.checkpoint_path!r}: {exc}") from exc
        hidden = getattr(getattr(self.model_, "config", None), "hidden_size", ENCODER_DIM)
        if hidden != ENCODER_DIM:
            raise EncoderInitError(f"checkpoint hidden size {hidden} != {ENCODER_DIM}")
        self.model_.to(self.device)
        self.model_.eval()
        self._cache = {}
        return self

    def fit(self, X=None, y=None):
        return self.load()

    def count_tokens(self, text: str) -> int:
        self.load()
        return len(self.tokenizer_(text, add_special_tokens=True, truncation=False, verbose=False)["input_ids"])

    def invalidate_cache(self):
        self._cache = {}

    def batch_inputs(self, texts):
        return self.tokenizer_(
            list(texts),
            truncation=True,
            max_length=self.max_tokens,
            padding=True,
            return_tensors="pt",
        )

    def cls_embeddings(self, inputs):
        """CLS rows of the final hidden layer; keeps the autograd graph."""
        return self.model_(**inputs).last_hidden_state[:, 0, :]

    def transform(self, X):
        import torch

        self.load()
        X = check_texts(X)
        out = np.zeros((len(X), ENCODER_DIM))
        todo = []
        for r, text in enumerate(X):
            hit = self._cache.get(text) if self.cache else None
            if hit is not None:
                out[r] = hit
            else:
                todo.append(r)
        for start in range(0, len(todo), self.batch_size):
            rows = todo[start : start + self.batch_size]
            texts = [X[r] for r in rows]
            for t in texts:
                if self.count_tokens(t) > self.max_tokens:
                    self._note_truncation(t)
            with torch.no_grad():
                emb = self.cls_embeddings(self.batch_inputs(texts).to(self.device))
            emb = emb.detach().cpu().double().numpy()
            for r, e in zip(rows, emb):
                out[r] = e
                if self.cache:
                    self._cache[X[r]] = e
        return out

    def encode(self, text: str):
        return self.transform([text])[0], self.count_tokens(text)


def make_encoder(backend: str = "stub", checkpoint_path=None, **kwargs):
    """Build and eagerly initialise an encoder backend."""
    if backend == "stub":
        return StubEncoder(**kwargs)
    if backend == "checkpoint":
        return CheckpointEncoder(checkpoint_path=checkpoint_path, **kwargs).load()
    raise ValueError(f"unknown encoder backend {backend!r}; expected 'stub' or 'checkpoint'")
