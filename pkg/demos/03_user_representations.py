"""From token sets to fused user vectors.

A user's token set G is the constituent-excluded union of their unigrams,
bigrams and trigrams; the per-dimension vector averages the embedding rows of
G intersected with that dimension's vocabulary; the fused vector concatenates
dimensions and projects through a truncated SVD basis fitted on training
users only.
"""

import tempfile
from pathlib import Path

import numpy as np

from dimtext import (
    SkipgramParams,
    SynthConfig,
    build_token_set,
    build_user_vectors,
    detect_sparse,
    fit_basis,
    fuse,
    generate,
    ingest,
    merge,
    similarity_matrix,
    train_skipgram,
)
from dimtext.corpus import NEGATIVE, POSITIVE, normalize

out = Path(tempfile.mkdtemp(prefix="dimtext-demo3-"))
cfg = SynthConfig(users_per_class=60, sparse_fraction=0.1, corpus_sentences=1200, seed=5)
generate(cfg, out)
corpus = merge(
    [
        ingest(out / "corpus_positive.jsonl", POSITIVE),
        ingest(out / "corpus_negative.jsonl", NEGATIVE),
    ]
)

uid = corpus.user_ids()[0]
g = build_token_set(corpus.users[uid])
print(f"user {uid}: {len(corpus.users[uid].tokens)} tokens -> |G| = {len(g.members)}")
print("sample members:", sorted(g.members)[:8])

models = {}
for tag in cfg.dimensions:
    sents = [normalize(l) for l in (out / f"dim_{tag}.txt").read_text().splitlines() if l.strip()]
    models[tag] = train_skipgram(
        sents,
        SkipgramParams(dim=24, window=4, epochs=6, min_count=5, subsample=0, seed=1),
        dimension=tag,
    )

vectors = build_user_vectors(corpus, models, tau=1)
sparse = detect_sparse([uv for per in vectors.values() for uv in per.values()])
print(f"\nsparse (user, dimension) pairs detected: {len(sparse)}, e.g. {sparse[:3]}")

# fuse: fit the basis on a training subset, apply everywhere
ids = corpus.user_ids()
train_ids = ids[: int(0.7 * len(ids))]
basis = fit_basis(vectors, train_ids, target_dim=24)
print(f"\nSVD basis: {basis.projection.shape[0]} -> {basis.projection.shape[1]} dims, "
      f"top singular values {np.round(basis.singular_values[:4], 3)}")
fused = {u: fuse({d: vectors[d][u] for d in basis.dimension_order}, basis) for u in ids}

# pairwise cosine structure within and across classes, per dimension
pos = [u for u in ids if corpus.users[u].label == POSITIVE][:30]
neg = [u for u in ids if corpus.users[u].label == NEGATIVE][:30]
for dim in sorted(models):
    grid = similarity_matrix(
        {u: vectors[dim][u].vector for u in pos},
        {u: vectors[dim][u].vector for u in neg},
        dimension=dim,
    )
    print(f"dimension {dim}: mean pos-vs-neg cosine {grid.values.mean():+.3f}")
fg = np.vstack([fused[u].vector for u in pos + neg])
norm = fg / np.maximum(np.linalg.norm(fg, axis=1, keepdims=True), 1e-12)
sims = norm @ norm.T
print(f"fused: mean within-pos {sims[:30, :30].mean():+.3f}, "
      f"pos-vs-neg {sims[:30, 30:].mean():+.3f}")
