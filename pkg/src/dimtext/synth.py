"""Synthetic corpus generator with planted ground truth.

Each contextual dimension gets its own disjoint vocabulary, split into two
themes; the dimension corpus is built from theme-coherent sentences so that
embeddings place same-theme tokens near each other. The class signal is
structural, not lexical: positive-class users draw a balanced mixture of both
themes in every dimension (their mean vectors sit near the theme midpoint),
while negative-class users concentrate on a per-user home theme (vectors near
a theme centroid). Home themes alternate so both classes use every token at
the same aggregate rate, which starves frequency-based baselines while
embedding means stay separable. Each user also samples from a small personal
token pool, keeping exact token overlap between users low.

Planted outliers keep the positive label but behave like negative users;
planted sparse users omit all tokens of their designated dimensions (replaced
by shared-vocabulary tokens). The manifest records every planted fact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from .corpus import NEGATIVE, POSITIVE
from .errors import DataError


@dataclass
class SynthConfig:
    dimensions: tuple[str, ...] = ("rel", "ideo", "hate")
    vocab_size: int = 800  # per dimension, split into two themes
    shared_vocab_size: int = 300
    users_per_class: int = 500
    docs_per_user: int = 20
    tokens_per_doc: int = 12
    mixing: dict | None = None  # label -> {dimension: proportion}; default equal
    shared_fraction: float = 0.3
    home_affinity: float = 0.8  # negative users' concentration on their home theme
    pool_size: int = 40  # personal vocabulary per (dimension, theme)
    outlier_fraction: float = 0.0  # positive-class users with negative behavior
    outlier_affinity: float = 1.0  # planted outliers' home-theme concentration
    sparse_fraction: float = 0.10
    sparse_dims: int = 1  # dimensions omitted per sparse user
    zipf_exponent: float = 1.1
    corpus_sentences: int = 4000  # per dimension corpus
    sentence_len: int = 12
    seed: int = 0


class _Zipf:
    """Cumulative-weight sampler over a token array with Zipf(s) frequencies."""

    def __init__(self, tokens: np.ndarray, s: float, weights: np.ndarray | None = None):
        self.tokens = tokens
        if weights is None:
            weights = 1.0 / np.arange(1, len(tokens) + 1) ** s
        self.weights = weights / weights.sum()
        self.cum = np.cumsum(self.weights)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        idx = np.searchsorted(self.cum, rng.random(size))
        return self.tokens[np.minimum(idx, len(self.tokens) - 1)]

    def subset(self, idx: np.ndarray) -> "_Zipf":
        return _Zipf(self.tokens[idx], 0.0, weights=self.weights[idx])


def _validate(cfg: SynthConfig) -> None:
    if not 0 <= cfg.outlier_fraction < 1 or not 0 <= cfg.sparse_fraction < 1:
        raise DataError("outlier and sparse fractions must be in [0, 1)")
    if not cfg.dimensions:
        raise DataError("need at least one dimension")
    if cfg.sparse_dims >= len(cfg.dimensions) and cfg.sparse_fraction > 0:
        raise DataError("sparse_dims must leave at least one dense dimension")
    if cfg.vocab_size < 2 * cfg.pool_size:
        raise DataError("vocab_size must be at least twice pool_size")
    if not 0.5 <= cfg.home_affinity <= 1.0:
        raise DataError("home_affinity must be in [0.5, 1]")
    if not 0.5 <= cfg.outlier_affinity <= 1.0:
        raise DataError("outlier_affinity must be in [0.5, 1]")
    if cfg.mixing is not None:
        for label, mix in cfg.mixing.items():
            if abs(sum(mix.values()) - 1.0) > 1e-9:
                raise DataError(f"mixing for {label!r} does not sum to 1")
            if set(mix) != set(cfg.dimensions):
                raise DataError(f"mixing for {label!r} must cover all dimensions")


def generate(cfg: SynthConfig, out_dir: str | Path) -> dict:
    """Write dimension corpora, the two labeled user corpora, and the
    ground-truth manifest into out_dir. Returns the manifest."""
    _validate(cfg)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(cfg.seed)
    dims = tuple(cfg.dimensions)

    themes = {}  # dimension -> (theme0 sampler, theme1 sampler)
    for dim in dims:
        vocab = np.array([f"{dim}w{i:04d}" for i in range(cfg.vocab_size)])
        half = cfg.vocab_size // 2
        themes[dim] = (
            _Zipf(vocab[:half], cfg.zipf_exponent),
            _Zipf(vocab[half:], cfg.zipf_exponent),
        )
    shared = _Zipf(
        np.array([f"shw{i:04d}" for i in range(cfg.shared_vocab_size)]),
        cfg.zipf_exponent,
    )

    # dimension corpora: theme-coherent sentences over the full theme slices
    for dim in dims:
        lines = []
        pick = rng.integers(0, 2, size=cfg.corpus_sentences)
        for t in pick:
            lines.append(" ".join(themes[dim][t].sample(rng, cfg.sentence_len)))
        (out / f"dim_{dim}.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    mixing = cfg.mixing or {
        POSITIVE: {d: 1.0 / len(dims) for d in dims},
        NEGATIVE: {d: 1.0 / len(dims) for d in dims},
    }

    manifest_users = []
    for label, prefix in ((POSITIVE, "pos"), (NEGATIVE, "neg")):
        n = cfg.users_per_class
        n_outliers = int(round(cfg.outlier_fraction * n)) if label == POSITIVE else 0
        n_sparse = int(round(cfg.sparse_fraction * n))
        flags = np.zeros(n, dtype=np.int64)  # 1 = outlier, 2 = sparse
        flags[rng.permutation(n)[:n_outliers]] = 1
        eligible = np.nonzero(flags == 0)[0]
        flags[rng.permutation(eligible)[:n_sparse]] = 2
        # home themes alternate so each theme serves half the concentrated
        # users and aggregate token frequencies stay class-symmetric
        homes = np.arange(n) % 2

        records = []
        for i in range(n):
            uid = f"{prefix}{i:04d}"
            is_outlier = flags[i] == 1
            sparse_dims: list[str] = []
            if flags[i] == 2:
                pick = rng.permutation(len(dims))[: cfg.sparse_dims]
                sparse_dims = sorted(dims[j] for j in pick)
            concentrated = label == NEGATIVE or is_outlier
            home = int(homes[i]) if concentrated else None
            mix_label = _other(label) if is_outlier else label
            affinity = cfg.outlier_affinity if is_outlier else cfg.home_affinity
            docs = _user_docs(
                cfg, rng, dims, themes, shared, mixing[mix_label], home,
                affinity, sparse_dims,
            )
            for j, doc in enumerate(docs):
                records.append(
                    {"user_id": uid, "doc_id": f"{uid}-{j:03d}", "text": " ".join(doc)}
                )
            manifest_users.append(
                {
                    "user_id": uid,
                    "label": label,
                    "outlier": bool(is_outlier),
                    "home_theme": home,
                    "sparse_dimensions": sparse_dims,
                }
            )
        path = out / f"corpus_{label}.jsonl"
        path.write_text(
            "".join(json.dumps(r, sort_keys=True) + "\n" for r in records),
            encoding="utf-8",
        )

    manifest = {
        "config": _config_dict(cfg),
        "dimension_corpora": {d: f"dim_{d}.txt" for d in dims},
        "user_corpora": {
            POSITIVE: f"corpus_{POSITIVE}.jsonl",
            NEGATIVE: f"corpus_{NEGATIVE}.jsonl",
        },
        "users": manifest_users,
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2), encoding="utf-8"
    )
    return manifest


def _other(label: str) -> str:
    return NEGATIVE if label == POSITIVE else POSITIVE


def _user_docs(cfg, rng, dims, themes, shared, mix, home, affinity, sparse_dims):
    """All documents of one user, sampled from their personal pools.

    home is None for balanced (positive-style) users, otherwise the theme the
    user concentrates on with the given affinity.
    """
    pools = {}
    for dim in dims:
        for t in (0, 1):
            sampler = themes[dim][t]
            take = min(cfg.pool_size, len(sampler.tokens))
            idx = rng.choice(
                len(sampler.tokens), size=take, replace=False, p=sampler.weights
            )
            pools[dim, t] = sampler.subset(np.sort(idx))

    n_tok = cfg.docs_per_user * cfg.tokens_per_doc
    use_shared = rng.random(n_tok) < cfg.shared_fraction
    dim_probs = np.array([mix[d] for d in dims])
    dim_pick = rng.choice(len(dims), size=n_tok, p=dim_probs)
    p_theme0 = 0.5 if home is None else (affinity if home == 0 else 1 - affinity)
    theme_pick = (rng.random(n_tok) >= p_theme0).astype(np.int64)

    # object dtype: token widths differ across vocabularies
    tokens = shared.sample(rng, n_tok).astype(object)
    for di, dim in enumerate(dims):
        for t in (0, 1):
            mask = ~use_shared & (dim_pick == di) & (theme_pick == t)
            cnt = int(mask.sum())
            if cnt == 0:
                continue
            if dim in sparse_dims:
                tokens[mask] = shared.sample(rng, cnt)  # omit this dimension
            else:
                tokens[mask] = pools[dim, t].sample(rng, cnt)
    return tokens.reshape(cfg.docs_per_user, cfg.tokens_per_doc).tolist()


def _config_dict(cfg: SynthConfig) -> dict:
    d = asdict(cfg)
    d["dimensions"] = list(cfg.dimensions)
    return d
