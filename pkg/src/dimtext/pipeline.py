"""Pipeline stages behind the CLI subcommands.

Each stage reads upstream artifacts from the run's output directory, writes
its own artifacts deterministically (stable ordering, shortest-round-trip
float formatting, no timestamps), and returns the list of files it wrote.
Stage logs go to logs/stages.jsonl and are the only non-deterministic output.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from . import corpus as corpus_mod
from . import ngram as ngram_mod
from . import outliers as outliers_mod
from . import topics as topics_mod
from ._svg import bar_chart, line_plot
from .classify import (
    AblationConfig,
    RFParams,
    baseline_model,
    run_ablation,
)
from .config import resolve_paths
from .corpus import NEGATIVE, POSITIVE, load_corpus, save_corpus
from .embedding import SkipgramParams, load_model, save_model, train_skipgram
from .errors import DataError, UsageError
from .imputation import impute
from .representation import (
    UserDimVector,
    build_user_vectors,
    detect_sparse,
    fit_basis,
    fuse,
    project_2d,
)
from .seeds import derive_seed
from .similarity import similarity_matrix
from .synth import SynthConfig, generate

STAGES = (
    "synth",
    "ingest",
    "train-dims",
    "represent",
    "topics",
    "similarity",
    "outliers",
    "impute",
    "classify",
    "report",
)


def _out(cfg) -> Path:
    return Path(cfg["run"]["out_dir"])


def _art(cfg) -> Path:
    return _out(cfg) / "artifacts"


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2), encoding="utf-8")


def _require(path: Path, hint: str) -> Path:
    if not path.exists():
        raise UsageError(f"missing artifact {path}; run `{hint}` first")
    return path


# ---------------------------------------------------------------------------
# artifact round-trips
# ---------------------------------------------------------------------------


def save_vector_table(
    vectors: dict[str, dict[str, UserDimVector]], art: Path, prefix: str
) -> list[Path]:
    written = []
    for dim in sorted(vectors):
        per_user = vectors[dim]
        path = art / f"{prefix}_{dim}.csv"
        width = len(next(iter(per_user.values())).vector) if per_user else 0
        header = ["user_id", "overlap", "sparse"] + [f"v{i}" for i in range(width)]
        rows = [
            [uid, per_user[uid].overlap_count, per_user[uid].sparse]
            + list(per_user[uid].vector)
            for uid in sorted(per_user)
        ]
        _write_csv(path, header, rows)
        written.append(path)
    return written


def load_vector_table(art: Path, dims, prefix: str) -> dict[str, dict[str, UserDimVector]]:
    hint = "dimtext impute" if "imputed" in prefix else "dimtext represent"
    out: dict[str, dict[str, UserDimVector]] = {}
    for dim in sorted(dims):
        path = _require(art / f"{prefix}_{dim}.csv", hint)
        per_user = {}
        with open(path, encoding="utf-8") as fh:
            reader = csv.reader(fh)
            next(reader)
            for row in reader:
                uid, overlap, sparse = row[0], int(row[1]), row[2] == "true"
                per_user[uid] = UserDimVector(
                    user_id=uid,
                    dimension=dim,
                    vector=np.array([float(v) for v in row[3:]]),
                    overlap_count=overlap,
                    sparse=sparse,
                )
        out[dim] = per_user
    return out


# ---------------------------------------------------------------------------
# stages
# ---------------------------------------------------------------------------


def stage_synth(cfg) -> list[Path]:
    s = cfg["synth"]
    scfg = SynthConfig(
        dimensions=tuple(s["dimensions"]),
        vocab_size=s["vocab_size"],
        shared_vocab_size=s["shared_vocab_size"],
        users_per_class=s["users_per_class"],
        docs_per_user=s["docs_per_user"],
        tokens_per_doc=s["tokens_per_doc"],
        shared_fraction=s["shared_fraction"],
        home_affinity=s["home_affinity"],
        outlier_affinity=s["outlier_affinity"],
        pool_size=s["pool_size"],
        outlier_fraction=s["outlier_fraction"],
        sparse_fraction=s["sparse_fraction"],
        sparse_dims=s["sparse_dims"],
        zipf_exponent=s["zipf_exponent"],
        corpus_sentences=s["corpus_sentences"],
        sentence_len=s["sentence_len"],
        seed=derive_seed(cfg["run"]["seed"], "synth"),
    )
    data = _out(cfg) / "data"
    generate(scfg, data)
    return sorted(data.iterdir())


def stage_ingest(cfg) -> list[Path]:
    cfg = resolve_paths(cfg)
    ceiling = cfg["corpus"]["error_rate_ceiling"]
    parts = []
    for key, label in (("positive_path", POSITIVE), ("negative_path", NEGATIVE)):
        path = Path(cfg["corpus"][key])
        if not path.exists():
            raise UsageError(f"corpus.{key}: file not found: {path}")
        parts.append(corpus_mod.ingest(path, label, error_rate_ceiling=ceiling))
    merged = corpus_mod.merge(parts)
    out = _art(cfg) / "corpus.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    save_corpus(merged, out)
    return [out]


def _load_corpus(cfg, name="corpus.json", hint="dimtext ingest"):
    return load_corpus(_require(_art(cfg) / name, hint))


def stage_train_dims(cfg) -> list[Path]:
    cfg = resolve_paths(cfg)
    corpus = _load_corpus(cfg)
    e = cfg["embedding"]
    n = cfg["ngram"]
    inventory: set[str] = set()
    if e["inject_phrases"]:
        inventory = ngram_mod.phrase_inventory(
            corpus, min_count=n["min_count"], npmi_threshold=n["npmi_threshold"]
        )
    written = []
    art = _art(cfg)
    art.mkdir(parents=True, exist_ok=True)
    workers = 1 if cfg["run"]["deterministic"] else e["workers"]
    for tag in sorted(cfg["dimensions"]["tags"]):
        path = Path(cfg["dimensions"]["corpora"][tag])
        if not path.exists():
            raise UsageError(f"dimensions.corpora.{tag}: file not found: {path}")
        sentences = [
            ngram_mod.inject_phrases(corpus_mod.normalize(line), inventory)
            for line in path.read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        params = SkipgramParams(
            dim=e["dim"],
            window=e["window"],
            negatives=e["negatives"],
            epochs=e["epochs"],
            lr=e["lr"],
            min_lr=e["min_lr"],
            min_count=e["min_count"],
            subsample=e["subsample"],
            seed=derive_seed(cfg["run"]["seed"], "embedding", tag),
            workers=workers,
        )
        model = train_skipgram(sentences, params, dimension=tag)
        model_path = art / f"model_{tag}.bin"
        save_model(model, model_path)
        written.extend([model_path, Path(str(model_path) + ".json")])
    phrases = art / "phrases.txt"
    phrases.write_text("".join(p + "\n" for p in sorted(inventory)), encoding="utf-8")
    written.append(phrases)
    return written


def _load_models(cfg):
    models = {}
    for tag in sorted(cfg["dimensions"]["tags"]):
        models[tag] = load_model(
            _require(_art(cfg) / f"model_{tag}.bin", "dimtext train-dims")
        )
    return models


def stage_represent(cfg) -> list[Path]:
    corpus = _load_corpus(cfg)
    models = _load_models(cfg)
    vectors = build_user_vectors(
        corpus,
        models,
        tau=cfg["representation"]["tau"],
        ngram_min_count=cfg["ngram"]["min_count"],
        npmi_threshold=cfg["ngram"]["npmi_threshold"],
    )
    art = _art(cfg)
    written = save_vector_table(vectors, art, "vectors")
    flat = [uv for per_user in vectors.values() for uv in per_user.values()]
    sparse_path = art / "sparse.json"
    _write_json(sparse_path, [list(p) for p in detect_sparse(flat)])
    written.append(sparse_path)

    # inspection-only fused export (basis fitted on all users; the classify
    # stage refits its own train-only bases per combination)
    ids = corpus.user_ids()
    basis = fit_basis(vectors, ids, cfg["representation"]["target_dim"])
    fused_path = art / "vectors_fused.csv"
    width = basis.projection.shape[1]
    rows = []
    for uid in ids:
        fused = fuse({d: vectors[d][uid] for d in basis.dimension_order}, basis)
        rows.append([uid] + list(fused.vector))
    _write_csv(fused_path, ["user_id"] + [f"v{i}" for i in range(width)], rows)
    written.append(fused_path)
    return written


def stage_topics(cfg) -> list[Path]:
    corpus = _load_corpus(cfg)
    t = cfg["topics"]
    seed = cfg["run"]["seed"]
    alpha = t["alpha"] or None
    art = _art(cfg)
    art.mkdir(parents=True, exist_ok=True)
    written = []

    models = topics_mod.fit_class_models(
        corpus,
        n_topics=t["n_topics"],
        alpha=alpha,
        beta=t["beta"],
        iterations=t["iterations"],
        seed=derive_seed(seed, "topics-eda"),
    )
    rows = []
    for label in sorted(models):
        model = models[label]
        for k in range(model.n_topics):
            rows.append([label, k] + model.top_words(k, t["top_words"]))
    path = art / "topic_top_words.csv"
    _write_csv(
        path,
        ["class", "topic"] + [f"word{i}" for i in range(t["top_words"])],
        rows,
    )
    written.append(path)

    if t["select_k"]:
        by_label: dict[str, list[list[str]]] = {}
        for uid in corpus.user_ids():
            ud = corpus.users[uid]
            by_label.setdefault(ud.label, []).append(ud.tokens)
        curve_rows = []
        for label in sorted(by_label):
            curve = topics_mod.select_k(
                by_label[label],
                t["k_grid"],
                seed=derive_seed(seed, "select-k", label),
                alpha=alpha,
                beta=t["beta"],
                iterations=t["iterations"],
            )
            for k, perp in curve.points:
                curve_rows.append([label, k, perp, k == curve.selected_k])
        path = art / "perplexity_curve.csv"
        _write_csv(path, ["class", "k", "perplexity", "selected"], curve_rows)
        written.append(path)

    if t["hdp_docs_path"]:
        docs_path = Path(t["hdp_docs_path"])
        if not docs_path.exists():
            raise UsageError(f"topics.hdp_docs_path: file not found: {docs_path}")
        doc_ids, docs = [], []
        for i, line in enumerate(docs_path.read_text(encoding="utf-8").splitlines()):
            if not line.strip():
                continue
            rec = json.loads(line)
            doc_ids.append(str(rec.get("doc_id", i)))
            docs.append(corpus_mod.normalize(rec["text"]))
        clusters = topics_mod.fit_hdp(
            docs,
            max_topics=t["hdp_max_topics"],
            iterations=t["hdp_iterations"],
            seed=derive_seed(seed, "hdp"),
            doc_ids=doc_ids,
            sub_topics=t["hdp_sub_topics"],
        )
        picked = topics_mod.sample_clusters(
            clusters, t["n_pseudo_users"], seed=derive_seed(seed, "hdp-sample")
        )
        text_by_id = {}
        for i, line in enumerate(docs_path.read_text(encoding="utf-8").splitlines()):
            if line.strip():
                rec = json.loads(line)
                text_by_id[str(rec.get("doc_id", i))] = rec["text"]
        path = art / "pseudo_users.jsonl"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for i, members in enumerate(picked.clusters):
                uid = f"pseudo{i:04d}"
                for did in members:
                    fh.write(
                        json.dumps(
                            {"user_id": uid, "doc_id": did, "text": text_by_id[did]},
                            sort_keys=True,
                        )
                        + "\n"
                    )
        meta = art / "pseudo_user_clusters.json"
        _write_json(
            meta,
            [
                {"cluster": i, "doc_ids": members, **picked.metadata[i]}
                for i, members in enumerate(picked.clusters)
            ],
        )
        written.extend([path, meta])
    return written


def stage_similarity(cfg) -> list[Path]:
    if not cfg["similarity"]["enabled"]:
        return []
    corpus = _load_corpus(cfg)
    dims = sorted(cfg["dimensions"]["tags"])
    vectors = load_vector_table(_art(cfg), dims, "vectors")
    groups = {
        POSITIVE: [u for u in corpus.user_ids() if corpus.users[u].label == POSITIVE],
        NEGATIVE: [u for u in corpus.user_ids() if corpus.users[u].label == NEGATIVE],
    }
    pairs = [
        ("pos_neg", POSITIVE, NEGATIVE),
        ("pos_pos", POSITIVE, POSITIVE),
        ("neg_neg", NEGATIVE, NEGATIVE),
    ]
    written = []
    for dim in dims:
        for name, la, lb in pairs:
            va = {u: vectors[dim][u].vector for u in groups[la]}
            vb = {u: vectors[dim][u].vector for u in groups[lb]}
            if not va or not vb:
                continue
            sim = similarity_matrix(va, vb, dimension=dim)
            path = _art(cfg) / f"similarity_{dim}_{name}.csv"
            rows = [
                [rid] + list(sim.values[i])
                for i, rid in enumerate(sim.row_ids)
            ]
            _write_csv(path, ["user_id"] + sim.col_ids, rows)
            written.append(path)
            if cfg["similarity"]["write_pairs"]:
                pairs_path = _art(cfg) / f"similarity_{dim}_{name}_pairs.csv"
                _write_csv(
                    pairs_path,
                    ["row_id", "col_id", "value"],
                    [
                        [rid, cid, sim.values[i, j]]
                        for i, rid in enumerate(sim.row_ids)
                        for j, cid in enumerate(sim.col_ids)
                    ],
                )
                written.append(pairs_path)
    return written


def stage_outliers(cfg) -> list[Path]:
    corpus = _load_corpus(cfg)
    o = cfg["outliers"]
    dims = sorted(cfg["dimensions"]["tags"])
    vectors = load_vector_table(_art(cfg), dims, "vectors")
    target = [
        u for u in corpus.user_ids() if corpus.users[u].label == o["target_class"]
    ]
    if not target:
        raise DataError(f"no users with label {o['target_class']!r}")
    art = _art(cfg)
    written = []
    minority_sets: dict[str, set[str]] = {}
    utest_rows = []
    for dim in dims:
        user_vecs = {u: vectors[dim][u].vector for u in target}
        assignments = outliers_mod.hdbscan(
            user_vecs,
            min_cluster_size=o["min_cluster_size"] or None,
            min_samples=o["min_samples"],
            dimension=dim,
            allow_single_cluster=o["allow_single_cluster"],
        )
        path = art / f"clusters_{dim}.csv"
        _write_csv(
            path,
            ["user_id", "cluster_id"],
            [[a.user_id, a.cluster_id] for a in assignments],
        )
        written.append(path)

        coords = project_2d(np.vstack([user_vecs[u] for u in sorted(user_vecs)]))
        proj = art / f"projection_2d_{dim}.csv"
        _write_csv(
            proj,
            ["user_id", "x", "y"],
            [[u, coords[i, 0], coords[i, 1]] for i, u in enumerate(sorted(user_vecs))],
        )
        written.append(proj)

        try:
            majority, minority = outliers_mod.split_majority_minority(assignments)
        except DataError:
            minority_sets[dim] = set()  # all noise: no usable outlier signal
            utest_rows.append([dim, 0, len(target), "", "", "", ""])
            continue
        minority_sets[dim] = minority
        if majority and minority:
            centroid = outliers_mod.majority_centroid(user_vecs, majority)
            try:
                scalars = outliers_mod.scalarize_for_test(user_vecs, centroid)
                res = outliers_mod.mann_whitney_u(
                    [scalars[u] for u in sorted(majority)],
                    [scalars[u] for u in sorted(minority)],
                )
                utest_rows.append(
                    [dim, len(majority), len(minority), res.u, res.z, res.p,
                     res.effect_size]
                )
            except DataError:
                utest_rows.append([dim, len(majority), len(minority), "", "", "", ""])
        else:
            utest_rows.append([dim, len(majority), len(minority), "", "", "", ""])

    utest_path = art / "utest.csv"
    _write_csv(
        utest_path,
        ["dimension", "n_majority", "n_minority", "u", "z", "p", "effect_size"],
        utest_rows,
    )
    written.append(utest_path)

    confirmed = None
    expert_path = o["expert_labels_path"]
    if expert_path:
        expert = _read_expert_labels(Path(expert_path))
        system = {
            u: "outlier"
            if sum(u in minority_sets[d] for d in dims) >= o["min_dimensions"]
            else "member"
            for u in target
        }
        common = sorted(set(expert) & set(system))
        if common:
            ka = outliers_mod.cohen_kappa(
                [system[u] for u in common], [expert[u] for u in common]
            )
            kappa_path = art / "kappa.json"
            _write_json(
                kappa_path,
                {
                    "kappa": ka.kappa,
                    "observed_agreement": ka.observed_agreement,
                    "expected_agreement": ka.expected_agreement,
                    "n": ka.n,
                },
            )
            written.append(kappa_path)
        confirmed = [u for u, lab in expert.items() if lab == "outlier"]

    clean, report = outliers_mod.remove_outliers(
        corpus,
        minority_sets,
        policy=o["policy"],
        min_dimensions=o["min_dimensions"],
        confirmed=confirmed,
    )
    removal_json = art / "removal.json"
    _write_json(removal_json, {"policy": report.policy, "removed": report.removed})
    removal_csv = art / "removal.csv"
    _write_csv(
        removal_csv,
        ["user_id", "dimensions"],
        [[r["user_id"], "|".join(r["dimensions"])] for r in report.removed],
    )
    clean_path = art / "corpus_clean.json"
    save_corpus(clean, clean_path)
    written.extend([removal_json, removal_csv, clean_path])
    return written


def _read_expert_labels(path: Path) -> dict[str, str]:
    if not path.exists():
        raise UsageError(f"outliers.expert_labels_path: file not found: {path}")
    out = {}
    with open(path, encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["user_id", "label"]:
            raise DataError(f"{path}: expected header user_id,label")
        for row in reader:
            if row[1] not in ("outlier", "member"):
                raise DataError(f"{path}: label must be outlier|member, got {row[1]!r}")
            out[row[0]] = row[1]
    return out


def stage_impute(cfg) -> list[Path]:
    clean = _load_corpus(cfg, "corpus_clean.json", "dimtext outliers")
    dims = sorted(cfg["dimensions"]["tags"])
    vectors = load_vector_table(_art(cfg), dims, "vectors")
    vectors = {
        dim: {u: uv for u, uv in per_user.items() if u in clean.users}
        for dim, per_user in vectors.items()
    }
    t = cfg["topics"]
    models = topics_mod.fit_class_models(
        clean,
        n_topics=t["n_topics"],
        alpha=t["alpha"] or None,
        beta=t["beta"],
        iterations=t["iterations"],
        seed=derive_seed(cfg["run"]["seed"], "impute-lda"),
    )
    imputed, records = impute(
        vectors, clean, models, top_m=cfg["imputation"]["top_m"]
    )
    art = _art(cfg)
    written = save_vector_table(imputed, art, "vectors_imputed")
    rec_path = art / "imputation_records.csv"
    _write_csv(
        rec_path,
        ["user_id", "dimension", "donor_id", "jaccard", "fallback"],
        [[r.user_id, r.dimension, r.donor_id, r.jaccard, r.fallback] for r in records],
    )
    return written + [rec_path]


def _ablation_config(cfg) -> AblationConfig:
    c = cfg["classify"]
    modes = tuple(m == "with" for m in c["imputation_modes"])
    combos = [tuple(sorted(combo)) for combo in c["combos"]] or None
    return AblationConfig(
        combos=combos,
        algorithms=tuple(c["algorithms"]),
        imputation_modes=modes,
        n_folds=c["n_folds"],
        n_holdout=c["n_holdout"],
        target_dim=cfg["representation"]["target_dim"],
        tau=cfg["representation"]["tau"],
        ngram_min_count=cfg["ngram"]["min_count"],
        npmi_threshold=cfg["ngram"]["npmi_threshold"],
        lda_topics=cfg["topics"]["n_topics"],
        lda_alpha=cfg["topics"]["alpha"] or None,
        lda_beta=cfg["topics"]["beta"],
        lda_iterations=cfg["topics"]["iterations"],
        top_m=cfg["imputation"]["top_m"],
        rf=RFParams(
            n_trees=c["rf_trees"],
            max_depth=c["rf_max_depth"] or None,
            mtry=c["rf_mtry"],
            min_leaf=c["rf_min_leaf"],
        ),
        seed=derive_seed(cfg["run"]["seed"], "classify"),
    )


def stage_classify(cfg) -> list[Path]:
    clean = _load_corpus(cfg, "corpus_clean.json", "dimtext outliers")
    dims = sorted(cfg["dimensions"]["tags"])
    art = _art(cfg)
    vectors = load_vector_table(art, dims, "vectors")
    vectors = {
        dim: {u: uv for u, uv in per_user.items() if u in clean.users}
        for dim, per_user in vectors.items()
    }
    acfg = _ablation_config(cfg)
    imputed = None
    if True in acfg.imputation_modes:
        imputed = load_vector_table(art, dims, "vectors_imputed")
    reports = run_ablation(
        clean, None, acfg, vectors=vectors, imputed_vectors=imputed
    )
    if cfg["classify"]["baseline"]:
        reports.append(baseline_model(clean, acfg))

    json_path = art / "eval_reports.json"
    _write_json(json_path, [r.to_dict() for r in reports])
    csv_path = art / "eval_reports.csv"
    _write_csv(
        csv_path,
        [
            "config_id", "dimensions", "algorithm", "imputed",
            "precision", "recall", "f1", "auc",
            "cv_f1_mean", "cv_f1_std", "n_train", "n_holdout",
        ],
        [
            [
                r.config_id, "+".join(r.dimensions), r.algorithm, r.imputed,
                r.precision, r.recall, r.f1, r.auc,
                r.cv["f1"]["mean"], r.cv["f1"]["std"], r.n_train, r.n_holdout,
            ]
            for r in reports
        ],
    )
    roc_path = art / "roc_points.csv"
    _write_csv(
        roc_path,
        ["config_id", "fpr", "tpr"],
        [[r.config_id, p[0], p[1]] for r in reports for p in r.roc_points],
    )
    return [json_path, csv_path, roc_path]


def stage_report(cfg) -> list[Path]:
    art = _art(cfg)
    rep = _out(cfg) / "report"
    rep.mkdir(parents=True, exist_ok=True)
    reports = json.loads(
        _require(art / "eval_reports.json", "dimtext classify").read_text("utf-8")
    )
    written = []

    by_key = {}
    for r in reports:
        key = ("+".join(r["dimensions"]) or "baseline", r["algorithm"])
        by_key.setdefault(key, {})[r["imputed"]] = r
    table_rows = []
    for (dims, algo), variants in sorted(by_key.items()):
        without = variants.get(False, {})
        with_ = variants.get(True, {})
        table_rows.append(
            [
                dims, algo,
                without.get("precision", ""), with_.get("precision", ""),
                without.get("recall", ""), with_.get("recall", ""),
                without.get("f1", ""), with_.get("f1", ""),
                without.get("auc", ""), with_.get("auc", ""),
            ]
        )
    table = rep / "results_table.csv"
    _write_csv(
        table,
        [
            "dimensions", "algorithm",
            "precision_without_imputation", "precision_with_imputation",
            "recall_without_imputation", "recall_with_imputation",
            "f1_without_imputation", "f1_with_imputation",
            "auc_without_imputation", "auc_with_imputation",
        ],
        table_rows,
    )
    written.append(table)

    corpus_path = art / "corpus.json"
    if corpus_path.exists():
        corpus = load_corpus(corpus_path)
        k = cfg["ngram"]["top_k"]
        for n, name in ((1, "unigrams"), (2, "bigrams"), (3, "trigrams")):
            ranked = ngram_mod.top_k_by_class(corpus, k, n)
            path = rep / f"top_{name}.csv"
            _write_csv(
                path,
                ["class", "rank", "ngram", "doc_freq"],
                [
                    [label, i + 1, gram, count]
                    for label in sorted(ranked)
                    for i, (gram, count) in enumerate(ranked[label])
                ],
            )
            written.append(path)

        counts_path = rep / "ngram_counts.csv"
        rows = []
        by_label = {}
        for uid in corpus.user_ids():
            ud = corpus.users[uid]
            table = ngram_mod.user_ngram_table(ud, max_n=3)
            agg = by_label.setdefault(ud.label, {})
            for gram, count in table.counts.items():
                agg[gram] = agg.get(gram, 0) + count
        for label in sorted(by_label):
            for gram in sorted(by_label[label]):
                rows.append([label, gram.count("_") + 1, gram, by_label[label][gram]])
        _write_csv(counts_path, ["class", "n", "ngram", "count"], rows)
        written.append(counts_path)

    if cfg["report"]["svg"]:
        series = [
            (r["config_id"], [tuple(p) for p in r["roc_points"]])
            for r in sorted(reports, key=lambda r: r["config_id"])
            if r["imputed"] or not r["dimensions"]
        ]
        roc_svg = rep / "roc_curves.svg"
        roc_svg.write_text(
            line_plot(series, "Hold-out ROC (with imputation)",
                      "false positive rate", "true positive rate"),
            encoding="utf-8",
        )
        written.append(roc_svg)
        for metric in ("precision", "recall"):
            groups = []
            for (dims, algo), variants in sorted(by_key.items()):
                if algo != "rf":
                    continue
                groups.append(
                    (
                        dims,
                        {
                            "with imputation": variants.get(True, {}).get(metric, 0.0),
                            "without imputation": variants.get(False, {}).get(metric, 0.0),
                        },
                    )
                )
            if groups:
                path = rep / f"{metric}_bars.svg"
                path.write_text(
                    bar_chart(groups, f"Random forest {metric} by dimension combination", metric),
                    encoding="utf-8",
                )
                written.append(path)
    return written


STAGE_FUNCS = {
    "synth": stage_synth,
    "ingest": stage_ingest,
    "train-dims": stage_train_dims,
    "represent": stage_represent,
    "topics": stage_topics,
    "similarity": stage_similarity,
    "outliers": stage_outliers,
    "impute": stage_impute,
    "classify": stage_classify,
    "report": stage_report,
}
