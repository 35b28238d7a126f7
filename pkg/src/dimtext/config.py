"""Run configuration: one TOML file with a section per module.

Every tunable lives in DEFAULTS; a user config overrides keys and any unknown
key is rejected by name so typos fail loudly. Numeric sentinels: 0 means
"auto" where noted.
"""

from __future__ import annotations

import copy
import sys
from pathlib import Path

from .errors import UsageError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DEFAULTS: dict = {
    "run": {
        "seed": 0,
        "out_dir": "out",
        "deterministic": False,
    },
    "synth": {
        "dimensions": ["rel", "ideo", "hate"],
        "vocab_size": 800,
        "shared_vocab_size": 300,
        "users_per_class": 500,
        "docs_per_user": 20,
        "tokens_per_doc": 12,
        "shared_fraction": 0.3,
        "home_affinity": 0.8,
        "outlier_affinity": 1.0,
        "pool_size": 40,
        "outlier_fraction": 0.0,
        "sparse_fraction": 0.10,
        "sparse_dims": 1,
        "zipf_exponent": 1.1,
        "corpus_sentences": 4000,
        "sentence_len": 12,
    },
    "corpus": {
        # empty paths resolve to the synth stage's outputs under out_dir/data
        "positive_path": "",
        "negative_path": "",
        "error_rate_ceiling": 0.01,
    },
    "dimensions": {
        "tags": ["rel", "ideo", "hate"],
        # tag -> corpus file; empty table resolves to synth outputs
        "corpora": {},
    },
    "ngram": {
        "min_count": 2,
        "npmi_threshold": 0.3,
        "top_k": 20,
    },
    "embedding": {
        "dim": 300,
        "window": 5,
        "negatives": 5,
        "epochs": 15,
        "lr": 0.025,
        "min_lr": 0.0001,
        "min_count": 5,
        "subsample": 0.0,  # word2vec 1e-4 starves desk-scale corpora
        "workers": 1,
        "inject_phrases": True,
    },
    "representation": {
        "target_dim": 300,
        "tau": 1,
    },
    "topics": {
        "n_topics": 20,
        "alpha": 0.0,  # 0 = auto (50 / n_topics)
        "beta": 0.01,
        "iterations": 200,
        "select_k": False,
        "k_grid": [10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 110, 120, 130, 140, 150],
        "top_words": 10,
        "hdp_docs_path": "",  # optional raw JSONL to cluster into pseudo-users
        "hdp_max_topics": 20,
        "hdp_sub_topics": 30,
        "hdp_iterations": 200,
        "n_pseudo_users": 600,
    },
    "similarity": {
        "enabled": True,
        "write_pairs": True,  # (row id, col id, value) triplets besides the grid
    },
    "outliers": {
        "target_class": "positive",
        "min_cluster_size": 0,  # 0 = auto: max(15, 3% of points)
        "min_samples": 5,
        "allow_single_cluster": False,
        "policy": "min-dimensions",
        "min_dimensions": 2,
        "expert_labels_path": "",  # optional CSV: user_id,label(outlier|member)
    },
    "imputation": {
        "top_m": 10,
    },
    "classify": {
        "algorithms": ["rf", "nb"],
        "combos": [],  # [] = all non-empty dimension subsets
        "imputation_modes": ["with", "without"],
        "n_folds": 6,
        "n_holdout": 300,
        "rf_trees": 300,
        "rf_max_depth": 0,  # 0 = unbounded
        "rf_mtry": "sqrt",
        "rf_min_leaf": 1,
        "baseline": True,
    },
    "report": {
        "svg": True,
    },
}


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        here = f"{path}.{key}" if path else key
        if key not in base:
            # dimension corpora tables carry user-defined tags
            if path == "dimensions.corpora":
                out[key] = value
                continue
            raise UsageError(f"unknown configuration key: {here}")
        if isinstance(base[key], dict) and isinstance(value, dict):
            out[key] = _merge(base[key], value, here)
        elif isinstance(base[key], dict) != isinstance(value, dict):
            raise UsageError(f"configuration key {here} has the wrong shape")
        else:
            out[key] = value
    return out


def load_config(path: str | Path | None = None) -> dict:
    """Defaults overlaid with the TOML file at path (if given)."""
    if path is None:
        return copy.deepcopy(DEFAULTS)
    path = Path(path)
    if not path.exists():
        raise UsageError(f"config file not found: {path}")
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"cannot parse {path}: {exc}") from exc
    return _merge(DEFAULTS, raw)


def resolve_paths(cfg: dict) -> dict:
    """Fill empty corpus/dimension paths with the synth stage's conventional
    outputs under out_dir/data."""
    cfg = copy.deepcopy(cfg)
    data = Path(cfg["run"]["out_dir"]) / "data"
    if not cfg["corpus"]["positive_path"]:
        cfg["corpus"]["positive_path"] = str(data / "corpus_positive.jsonl")
    if not cfg["corpus"]["negative_path"]:
        cfg["corpus"]["negative_path"] = str(data / "corpus_negative.jsonl")
    tags = list(cfg["dimensions"]["tags"])
    corpora = dict(cfg["dimensions"]["corpora"])
    for tag in tags:
        if tag not in corpora or not corpora[tag]:
            corpora[tag] = str(data / f"dim_{tag}.txt")
    cfg["dimensions"]["corpora"] = corpora
    return cfg
