"""Screen a labeled class for likely mislabeled users.

HDBSCAN (built here from core distances up) splits the positive class into a
majority cluster and everyone else per dimension; a Mann-Whitney U-test on
cosine-to-centroid scalars quantifies the separation; users in the minority
for at least two dimensions are removed. Against the generator's manifest we
can score the screening like a detector.
"""

import json
import tempfile
from pathlib import Path

from dimtext import (
    SkipgramParams,
    SynthConfig,
    build_user_vectors,
    cohen_kappa,
    generate,
    hdbscan,
    ingest,
    mann_whitney_u,
    merge,
    remove_outliers,
    scalarize_for_test,
    split_majority_minority,
    train_skipgram,
)
from dimtext.corpus import NEGATIVE, POSITIVE, normalize
from dimtext.outliers import majority_centroid

out = Path(tempfile.mkdtemp(prefix="dimtext-demo4-"))
cfg = SynthConfig(users_per_class=200, outlier_fraction=0.1, corpus_sentences=2000, seed=11)
manifest = generate(cfg, out)
planted = {u["user_id"] for u in manifest["users"] if u["outlier"]}
corpus = merge(
    [
        ingest(out / "corpus_positive.jsonl", POSITIVE),
        ingest(out / "corpus_negative.jsonl", NEGATIVE),
    ]
)
models = {}
for tag in cfg.dimensions:
    sents = [normalize(l) for l in (out / f"dim_{tag}.txt").read_text().splitlines() if l.strip()]
    models[tag] = train_skipgram(
        sents,
        SkipgramParams(dim=32, window=4, epochs=8, min_count=5, subsample=0, seed=2),
        dimension=tag,
    )
vectors = build_user_vectors(corpus, models, tau=1)

target = [u for u in corpus.user_ids() if corpus.users[u].label == POSITIVE]
minority_sets = {}
for dim in sorted(models):
    user_vecs = {u: vectors[dim][u].vector for u in target}
    # planted clumps are ~10 users per home theme here, so the minimum
    # cluster size must sit below that for the split to surface
    assignments = hdbscan(
        user_vecs, min_cluster_size=8, min_samples=5, dimension=dim
    )
    majority, minority = split_majority_minority(assignments)
    minority_sets[dim] = minority

    if not minority:
        print(f"{dim}: single clean cluster, no minority to test")
        continue
    centroid = majority_centroid(user_vecs, majority)
    scalars = scalarize_for_test(user_vecs, centroid)
    res = mann_whitney_u(
        [scalars[u] for u in sorted(majority)],
        [scalars[u] for u in sorted(minority)],
    )
    print(
        f"{dim}: majority={len(majority)} minority={len(minority)}  "
        f"U={res.u:.0f} z={res.z:.2f} p={res.p:.2e} r={res.effect_size:.2f}"
    )

clean, report = remove_outliers(corpus, minority_sets, min_dimensions=2)
removed = set(report.removed_ids())
tp = len(removed & planted)
print(f"\nremoved {len(removed)} users; planted {len(planted)}")
print(f"precision={tp / max(1, len(removed)):.3f} recall={tp / len(planted):.3f}")
print(f"corpus after removal: {len(clean)} users")

# agreement with the (here: perfect) expert = the manifest itself
system = ["outlier" if u in removed else "member" for u in target]
expert = ["outlier" if u in planted else "member" for u in target]
print(f"kappa vs ground truth: {cohen_kappa(system, expert).kappa:.3f}")
