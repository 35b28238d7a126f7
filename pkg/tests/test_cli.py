import hashlib
import json
from pathlib import Path

from dimtext.cli import main

SMALL_CONFIG = """
[run]
seed = 13

[synth]
users_per_class = 40
docs_per_user = 6
tokens_per_doc = 8
vocab_size = 160
shared_vocab_size = 60
pool_size = 20
corpus_sentences = 250
sentence_len = 8
outlier_fraction = 0.1
sparse_fraction = 0.1

[embedding]
dim = 12
window = 3
epochs = 4
min_count = 2
subsample = 0.0

[representation]
target_dim = 16

[topics]
n_topics = 6
iterations = 40

[outliers]
min_cluster_size = 6
min_samples = 4

[classify]
n_holdout = 0.25
n_folds = 2
rf_trees = 8
combos = [["rel"], ["rel", "ideo", "hate"]]
"""


def _config(tmp_path, extra="") -> Path:
    cfg = tmp_path / "run.toml"
    cfg.write_text(SMALL_CONFIG + extra)
    return cfg


def _tree_digest(out: Path) -> dict[str, str]:
    digests = {}
    for path in sorted(out.rglob("*")):
        if path.is_file() and "logs" not in path.parts:
            digests[str(path.relative_to(out))] = hashlib.sha256(
                path.read_bytes()
            ).hexdigest()
    return digests


class TestCli:
    def test_full_pipeline_runs(self, tmp_path, capsys):
        cfg = _config(tmp_path)
        rc = main(["run", "--config", str(cfg), "--out", str(tmp_path / "out")])
        assert rc == 0
        out = tmp_path / "out"
        for artifact in (
            "artifacts/corpus.json",
            "artifacts/model_rel.bin",
            "artifacts/vectors_rel.csv",
            "artifacts/vectors_fused.csv",
            "artifacts/similarity_rel_pos_neg.csv",
            "artifacts/similarity_rel_pos_neg_pairs.csv",
            "artifacts/clusters_rel.csv",
            "artifacts/utest.csv",
            "artifacts/corpus_clean.json",
            "artifacts/vectors_imputed_rel.csv",
            "artifacts/imputation_records.csv",
            "artifacts/eval_reports.json",
            "report/results_table.csv",
            "report/ngram_counts.csv",
            "report/top_bigrams.csv",
            "report/roc_curves.svg",
            "report/precision_bars.svg",
        ):
            assert (out / artifact).exists(), artifact
        reports = json.loads((out / "artifacts/eval_reports.json").read_text())
        ids = {r["config_id"] for r in reports}
        assert "baseline/nb/counts" in ids
        assert any("rf" in i for i in ids)

    def test_missing_corpus_path_names_key(self, tmp_path, capsys):
        cfg = tmp_path / "bad.toml"
        cfg.write_text('[corpus]\npositive_path = "/nope/missing.jsonl"\n')
        rc = main(["ingest", "--config", str(cfg), "--out", str(tmp_path / "o")])
        assert rc == 1
        err = capsys.readouterr().err
        assert "corpus.positive_path" in err

    def test_unknown_config_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "bad.toml"
        cfg.write_text("[corpus]\ntypo_key = 1\n")
        rc = main(["ingest", "--config", str(cfg)])
        assert rc == 1
        assert "corpus.typo_key" in capsys.readouterr().err

    def test_stage_out_of_order_exits_one(self, tmp_path, capsys):
        cfg = _config(tmp_path)
        rc = main(["represent", "--config", str(cfg), "--out", str(tmp_path / "out2")])
        assert rc == 1
        assert "ingest" in capsys.readouterr().err

    def test_identical_reruns_byte_identical(self, tmp_path):
        cfg = _config(tmp_path)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["run", "--config", str(cfg), "--out", str(out_a), "--deterministic"]) == 0
        assert main(["run", "--config", str(cfg), "--out", str(out_b), "--deterministic"]) == 0
        da, db = _tree_digest(out_a), _tree_digest(out_b)
        assert da == db and len(da) > 10

    def test_stage_isolation_downstream_rerun(self, tmp_path):
        cfg = _config(tmp_path)
        out = tmp_path / "iso"
        assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
        before = _tree_digest(out)
        # wipe downstream artifacts and rerun only those stages
        for name in ("eval_reports.json", "eval_reports.csv", "roc_points.csv"):
            (out / "artifacts" / name).unlink()
        for path in (out / "report").iterdir():
            path.unlink()
        assert main(["classify", "--config", str(cfg), "--out", str(out)]) == 0
        assert main(["report", "--config", str(cfg), "--out", str(out)]) == 0
        assert _tree_digest(out) == before
