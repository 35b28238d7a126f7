"""Topic models, sparse-vector imputation, and the dimension ablation.

One LDA per class turns users into topic sets; each sparse (user, dimension)
vector is replaced by the same-class user with maximal topic-set Jaccard.
The ablation then scores every requested dimension combination with and
without imputation against the unigram-count baseline.
"""

import tempfile
from pathlib import Path

from dimtext import (
    AblationConfig,
    RFParams,
    SkipgramParams,
    SynthConfig,
    baseline_model,
    build_user_vectors,
    detect_sparse,
    fit_class_models,
    generate,
    impute,
    ingest,
    merge,
    run_ablation,
    train_skipgram,
    user_topics,
)
from dimtext.corpus import NEGATIVE, POSITIVE, normalize

out = Path(tempfile.mkdtemp(prefix="dimtext-demo5-"))
cfg = SynthConfig(users_per_class=250, sparse_fraction=0.15, corpus_sentences=2500, seed=4)
generate(cfg, out)
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
        SkipgramParams(dim=32, window=4, epochs=8, min_count=5, subsample=0, seed=6),
        dimension=tag,
    )
vectors = build_user_vectors(corpus, models, tau=1)
sparse = detect_sparse([uv for per in vectors.values() for uv in per.values()])
print(f"{len(sparse)} sparse (user, dimension) pairs before imputation")

topic_models = fit_class_models(corpus, n_topics=10, iterations=100, seed=0)
uid = sparse[0][0]
gamma = user_topics(topic_models[corpus.users[uid].label], corpus.users[uid], top_m=5)
print(f"topic set of sparse user {uid}: {sorted(gamma)}")

imputed, records = impute(vectors, corpus, topic_models, top_m=10)
print(f"imputed {len(records)} vectors; first record: {records[0]}")
assert not detect_sparse([uv for per in imputed.values() for uv in per.values()])

acfg = AblationConfig(
    combos=[("rel",), ("ideo",), ("hate",), ("hate", "ideo", "rel")],
    algorithms=("rf",),
    imputation_modes=(True, False),
    n_folds=4,
    n_holdout=0.3,
    target_dim=48,
    lda_topics=10,
    lda_iterations=100,
    rf=RFParams(n_trees=40),
    seed=0,
)
reports = run_ablation(corpus, None, acfg, vectors=vectors, imputed_vectors=imputed)
reports.append(baseline_model(corpus, acfg))

print(f"\n{'configuration':<34} {'P':>6} {'R':>6} {'F1':>6} {'AUC':>6}")
for r in reports:
    print(f"{r.config_id:<34} {r.precision:>6.3f} {r.recall:>6.3f} "
          f"{r.f1:>6.3f} {r.auc:>6.3f}")
