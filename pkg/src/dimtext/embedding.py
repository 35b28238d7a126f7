"""Skip-gram negative-sampling embeddings, one model per contextual dimension.

Plain SGD word2vec in the skip-gram formulation: for a center word c, an
observed context o and noise words n_i,

    loss = -log sigma(v_c . u_o) - sum_i log sigma(-v_c . u_{n_i})

with input vectors v (returned as the model) and output vectors u. Training is
bit-reproducible in single-threaded mode; ``workers > 1`` runs lock-free
hogwild threads over sentence shards and is deterministic only statistically.
"""

from __future__ import annotations

import json
import struct
import threading
from collections import Counter
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import DataError
from .seeds import derive_rng

MAGIC = b"DIMTEXTEMB"
FORMAT_VERSION = 1


@dataclass
class SkipgramParams:
    dim: int = 300
    window: int = 5
    negatives: int = 5
    epochs: int = 15
    lr: float = 0.025
    min_lr: float = 0.0001
    min_count: int = 5
    subsample: float = 1e-4  # 0 disables frequent-token subsampling
    seed: int = 0
    workers: int = 1


@dataclass
class DimensionModel:
    dimension: str
    vocab: dict[str, int]
    vectors: np.ndarray  # float32 [|vocab|, dim]
    training_meta: dict = field(default_factory=dict)

    def lookup(self, token: str) -> np.ndarray | None:
        """Row vector for an exact-match token (phrases included), None if OOV."""
        idx = self.vocab.get(token)
        if idx is None:
            return None
        return self.vectors[idx]

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])


def build_vocab(
    tokens: Sequence[str] | Counter, min_count: int = 1
) -> tuple[dict[str, int], np.ndarray]:
    """Index tokens with count >= min_count and return the unigram noise
    distribution proportional to count^0.75."""
    counts = tokens if isinstance(tokens, Counter) else Counter(tokens)
    kept = [(t, c) for t, c in counts.items() if c >= min_count]
    if not kept:
        raise DataError(f"empty vocabulary at min_count={min_count}")
    # most frequent first, ties lexicographic, so indices are reproducible
    kept.sort(key=lambda tc: (-tc[1], tc[0]))
    vocab = {t: i for i, (t, _) in enumerate(kept)}
    noise = np.array([c for _, c in kept], dtype=np.float64) ** 0.75
    noise /= noise.sum()
    return vocab, noise


def sgns_loss_grad(center, context, negatives):
    """Loss and analytic gradients for one SGNS example.

    Returns (loss, grad_center, grad_context, grad_negatives) where
    grad_negatives has one row per noise vector. Used by the training kernel's
    update rule and checked against finite differences in the test suite.
    """
    center = np.asarray(center, dtype=np.float64)
    context = np.asarray(context, dtype=np.float64)
    negatives = np.atleast_2d(np.asarray(negatives, dtype=np.float64))
    s_pos = _sigmoid(center @ context)
    s_neg = _sigmoid(negatives @ center)
    loss = -np.log(s_pos) - np.log(1.0 - s_neg).sum()
    grad_center = (s_pos - 1.0) * context + s_neg @ negatives
    grad_context = (s_pos - 1.0) * center
    grad_negatives = s_neg[:, None] * center[None, :]
    return loss, grad_center, grad_context, grad_negatives


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def _as_sentences(tokens) -> list[list[str]]:
    tokens = list(tokens)
    if not tokens:
        return []
    if isinstance(tokens[0], str):
        return [tokens]
    return [list(s) for s in tokens]


def train_skipgram(
    tokens, params: SkipgramParams | None = None, dimension: str = ""
) -> DimensionModel:
    """Train an SGNS model on a token stream or a sequence of sentences.

    Windows never cross sentence boundaries. Learning rate decays linearly
    from params.lr to params.min_lr over all epochs.
    """
    params = params or SkipgramParams()
    if params.dim < 1 or params.window < 1 or params.negatives < 1 or params.epochs < 1:
        raise DataError("skipgram params must be positive")
    sentences = _as_sentences(tokens)
    counts = Counter(t for s in sentences for t in s)
    if not counts:
        raise DataError("empty token stream")
    vocab, noise = build_vocab(counts, min_count=params.min_count)
    cum_noise = np.cumsum(noise)
    total_count = sum(counts[t] for t in vocab)

    keep_prob = np.ones(len(vocab), dtype=np.float64)
    if params.subsample > 0:
        for t, i in vocab.items():
            f = counts[t] / total_count
            if f > params.subsample:
                keep_prob[i] = (np.sqrt(f / params.subsample) + 1) * (
                    params.subsample / f
                )

    sent_ids = [
        np.array([vocab[t] for t in s if t in vocab], dtype=np.int32)
        for s in sentences
    ]
    sent_ids = [s for s in sent_ids if len(s) > 0]
    if not sent_ids:
        raise DataError("no in-vocabulary tokens to train on")

    rng = derive_rng(params.seed, "sgns", dimension or "model")
    v = len(vocab)
    w_in = ((rng.random((v, params.dim)) - 0.5) / params.dim).astype(np.float32)
    w_out = np.zeros((v, params.dim), dtype=np.float32)

    n_stream = sum(len(s) for s in sent_ids)
    tokens_total = max(1, params.epochs * n_stream)
    tokens_done = 0
    epoch_losses = []
    for epoch in range(params.epochs):
        ids, bounds = _epoch_stream(sent_ids, keep_prob, rng, params.subsample > 0)
        if len(ids) == 0:
            epoch_losses.append(0.0)
            tokens_done += n_stream
            continue
        loss, pairs, _ = _run_epoch(
            ids, bounds, cum_noise, w_in, w_out, params, rng, tokens_done, tokens_total
        )
        epoch_losses.append(loss / max(1, pairs))
        tokens_done += n_stream

    if not np.all(np.isfinite(w_in)):
        raise DataError("non-finite vectors after training; lower the learning rate")
    meta = asdict(params)
    meta["epoch_losses"] = epoch_losses
    meta["vocab_size"] = v
    return DimensionModel(
        dimension=dimension, vocab=vocab, vectors=w_in, training_meta=meta
    )


def _epoch_stream(sent_ids, keep_prob, rng, subsample):
    """Apply per-occurrence subsampling and build the flat id stream plus
    sentence bounds and reduced windows for one epoch."""
    kept = []
    for s in sent_ids:
        if subsample:
            mask = rng.random(len(s)) < keep_prob[s]
            s = s[mask]
        if len(s):
            kept.append(s)
    if not kept:
        return np.empty(0, np.int32), np.zeros(1, np.int32)
    bounds = np.zeros(len(kept) + 1, dtype=np.int32)
    bounds[1:] = np.cumsum([len(s) for s in kept])
    return np.concatenate(kept), bounds


def _run_epoch(ids, bounds, cum_noise, w_in, w_out, params, rng, done, total):
    windows = rng.integers(1, params.window + 1, size=len(ids)).astype(np.int32)
    n_pairs = _pair_count(ids, bounds, windows)
    draws = rng.random((max(1, n_pairs), params.negatives))
    neg_ids = np.searchsorted(cum_noise, draws).astype(np.int32)

    if params.workers <= 1:
        return _kernels.sgns_epoch(
            ids, bounds, windows, neg_ids, w_in, w_out,
            params.lr, params.min_lr, done, total,
        )

    # hogwild: shard whole sentences across threads, no locks on w_in/w_out
    shards = np.array_split(np.arange(len(bounds) - 1), params.workers)
    results = [None] * len(shards)

    def work(slot, sent_idx):
        if len(sent_idx) == 0:
            results[slot] = (0.0, 0, 0)
            return
        lo, hi = bounds[sent_idx[0]], bounds[sent_idx[-1] + 1]
        sub_bounds = (bounds[sent_idx[0] : sent_idx[-1] + 2] - lo).astype(np.int32)
        sub_windows = windows[lo:hi]
        first_pair = _pair_count(ids[: lo], bounds[: sent_idx[0] + 1], windows[: lo])
        shard_pairs = _pair_count(ids[lo:hi], sub_bounds, sub_windows)
        negs = neg_ids[first_pair : first_pair + max(1, shard_pairs)]
        results[slot] = _kernels.sgns_epoch(
            ids[lo:hi], sub_bounds, sub_windows, negs, w_in, w_out,
            params.lr, params.min_lr, done, total,
        )

    threads = [
        threading.Thread(target=work, args=(i, idx)) for i, idx in enumerate(shards)
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    loss = sum(r[0] for r in results)
    pairs = sum(r[1] for r in results)
    toks = sum(r[2] for r in results)
    return loss, pairs, toks


def _pair_count(ids, bounds, windows) -> int:
    total = 0
    for s in range(len(bounds) - 1):
        lo, hi = int(bounds[s]), int(bounds[s + 1])
        if hi <= lo:
            continue
        i = np.arange(lo, hi)
        b = windows[lo:hi].astype(np.int64)
        left = np.maximum(i - b, lo)
        right = np.minimum(i + b, hi - 1)
        total += int(np.sum((i - left) + (right - i)))
    return total


def save_model(model: DimensionModel, path: str | Path) -> None:
    """Versioned binary dump plus a JSON metadata sidecar at <path>.json."""
    path = Path(path)
    vecs = np.ascontiguousarray(model.vectors, dtype="<f4")
    tokens = sorted(model.vocab, key=model.vocab.get)
    meta_blob = json.dumps(model.training_meta, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", FORMAT_VERSION))
        dim_id = model.dimension.encode("utf-8")
        fh.write(struct.pack("<I", len(dim_id)))
        fh.write(dim_id)
        fh.write(struct.pack("<II", vecs.shape[0], vecs.shape[1]))
        for tok in tokens:
            b = tok.encode("utf-8")
            fh.write(struct.pack("<I", len(b)))
            fh.write(b)
        fh.write(vecs.tobytes(order="C"))
        fh.write(struct.pack("<I", len(meta_blob)))
        fh.write(meta_blob)
    sidecar = {
        "format_version": FORMAT_VERSION,
        "dimension": model.dimension,
        "vocab_size": vecs.shape[0],
        "vector_dim": vecs.shape[1],
        "training_meta": model.training_meta,
    }
    Path(str(path) + ".json").write_text(
        json.dumps(sidecar, sort_keys=True, indent=2), encoding="utf-8"
    )


def load_model(path: str | Path) -> DimensionModel:
    with open(path, "rb") as fh:
        if fh.read(len(MAGIC)) != MAGIC:
            raise DataError(f"{path}: not a dimension model file")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != FORMAT_VERSION:
            raise DataError(f"{path}: unsupported model version {version}")
        (dlen,) = struct.unpack("<I", fh.read(4))
        dimension = fh.read(dlen).decode("utf-8")
        rows, cols = struct.unpack("<II", fh.read(8))
        vocab = {}
        for i in range(rows):
            (tlen,) = struct.unpack("<I", fh.read(4))
            vocab[fh.read(tlen).decode("utf-8")] = i
        vecs = np.frombuffer(fh.read(rows * cols * 4), dtype="<f4").reshape(rows, cols)
        (mlen,) = struct.unpack("<I", fh.read(4))
        meta = json.loads(fh.read(mlen).decode("utf-8"))
    return DimensionModel(
        dimension=dimension, vocab=vocab, vectors=vecs.copy(), training_meta=meta
    )
