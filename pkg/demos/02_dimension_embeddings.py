"""Train a skip-gram model on one dimension corpus and poke at its geometry.

Each contextual dimension gets its own embedding model. Training is plain
SGD over skip-gram pairs with negative sampling; single-threaded runs are
bit-reproducible.
"""

import tempfile
from pathlib import Path

import numpy as np

from dimtext import SkipgramParams, SynthConfig, cosine, generate, load_model, save_model, train_skipgram
from dimtext.corpus import normalize

out = Path(tempfile.mkdtemp(prefix="dimtext-demo2-"))
generate(SynthConfig(corpus_sentences=1500, seed=3), out)

sentences = [
    normalize(line)
    for line in (out / "dim_rel.txt").read_text().splitlines()
    if line.strip()
]
print(f"dimension corpus: {len(sentences)} sentences, "
      f"{sum(len(s) for s in sentences)} tokens")

params = SkipgramParams(
    dim=32, window=4, negatives=5, epochs=8, min_count=5, subsample=0, seed=0
)
model = train_skipgram(sentences, params, dimension="rel")
print(f"vocabulary: {len(model.vocab)} tokens, vectors {model.vectors.shape}")
print("per-epoch average loss:",
      [round(x, 3) for x in model.training_meta["epoch_losses"]])

# theme structure: tokens from the same corpus theme should be closer
vocab_tokens = sorted(t for t in model.vocab if t.startswith("relw"))
theme0 = [t for t in vocab_tokens if int(t[4:]) < 400][:50]
theme1 = [t for t in vocab_tokens if int(t[4:]) >= 400][:50]
within, across = [], []
for a in theme0[:20]:
    for b in theme0[20:40]:
        within.append(cosine(model.lookup(a), model.lookup(b)))
    for b in theme1[:20]:
        across.append(cosine(model.lookup(a), model.lookup(b)))
print(f"mean cosine within theme:  {np.mean(within):.3f}")
print(f"mean cosine across themes: {np.mean(across):.3f}")

# nearest neighbours of one token
probe = theme0[0]
sims = sorted(
    ((cosine(model.lookup(probe), model.lookup(t)), t) for t in vocab_tokens if t != probe),
    reverse=True,
)
print(f"nearest to {probe}: {[t for _, t in sims[:5]]}")

# round-trip through the versioned binary format
path = out / "model_rel.bin"
save_model(model, path)
reloaded = load_model(path)
assert np.array_equal(reloaded.vectors, model.vectors)
print(f"saved + reloaded losslessly from {path.name} "
      f"({path.stat().st_size / 1024:.0f} KiB + JSON sidecar)")
