"""Supervised classification over fused user representations.

Random forest (CART trees, Gini splits, bootstrap + random feature subsets)
and naive Bayes (gaussian over embeddings, multinomial over counts) built
directly on numpy, plus the evaluation harness: stratified k-fold CV,
stratified hold-out, precision/recall/F1, ROC/AUC, the dimension-combination
ablation, and the frequency-based NB baseline.

Labels fed to the estimators are binary 0/1 with 1 the positive class.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .corpus import Corpus
from .errors import DataError
from .imputation import impute
from .representation import build_user_vectors, concat_matrix, fit_basis
from .seeds import derive_rng
from .topics import fit_class_models

POSITIVE_LABEL = "positive"


# ---------------------------------------------------------------------------
# random forest
# ---------------------------------------------------------------------------


@dataclass
class RFParams:
    n_trees: int = 300
    max_depth: int | None = None
    mtry: int | str = "sqrt"  # int, "sqrt", or "all"
    min_leaf: int = 1
    bootstrap: bool = True
    seed: int = 0


class _Tree:
    """CART tree in flat arrays; leaves keep class counts."""

    __slots__ = ("feature", "threshold", "left", "right", "pos", "total")

    def __init__(self):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.pos: list[int] = []
        self.total: list[int] = []

    def add_node(self, n_pos: int, n_total: int) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.pos.append(n_pos)
        self.total.append(n_total)
        return len(self.feature) - 1

    def vote(self, x_row: np.ndarray) -> int:
        node = 0
        while self.feature[node] >= 0:
            if x_row[self.feature[node]] <= self.threshold[node]:
                node = self.left[node]
            else:
                node = self.right[node]
        pos, neg = self.pos[node], self.total[node] - self.pos[node]
        return 1 if pos > neg else 0  # tie goes to the lower class

    def votes(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros(len(x), dtype=np.int64)
        stack = [(0, np.arange(len(x)))]
        while stack:
            node, idx = stack.pop()
            if len(idx) == 0:
                continue
            f = self.feature[node]
            if f < 0:
                pos, neg = self.pos[node], self.total[node] - self.pos[node]
                out[idx] = 1 if pos > neg else 0
                continue
            go_left = x[idx, f] <= self.threshold[node]
            stack.append((self.left[node], idx[go_left]))
            stack.append((self.right[node], idx[~go_left]))
        return out


@dataclass
class ForestModel:
    trees: list[_Tree]
    params: RFParams
    n_features: int


def _gini_best_split(x, y, idx, feats, min_leaf):
    """Exhaustive Gini scan over candidate thresholds of the given features.
    Returns (weighted_gini, feature, threshold) or None."""
    n = len(idx)
    yi = y[idx]
    best = (np.inf, -1, 0.0)
    for f in feats:
        v = x[idx, f]
        order = np.argsort(v, kind="stable")
        vs = v[order]
        if vs[0] == vs[-1]:
            continue
        cpos = np.cumsum(yi[order])
        tot_pos = cpos[-1]
        cut = np.nonzero(vs[:-1] < vs[1:])[0]  # left block is [0..i]
        cut = cut[(cut + 1 >= min_leaf) & (n - cut - 1 >= min_leaf)]
        if len(cut) == 0:
            continue
        nl = (cut + 1).astype(np.float64)
        nr = n - nl
        pl = cpos[cut] / nl
        pr = (tot_pos - cpos[cut]) / nr
        weighted = nl * 2 * pl * (1 - pl) + nr * 2 * pr * (1 - pr)
        k = int(np.argmin(weighted))
        if weighted[k] < best[0]:
            best = (float(weighted[k]), int(f), float((vs[cut[k]] + vs[cut[k] + 1]) / 2))
    return None if best[1] < 0 else best


def _grow_tree(x, y, rng, params: RFParams) -> _Tree:
    n, n_feat = x.shape
    if params.bootstrap:
        sample = rng.integers(0, n, size=n)
    else:
        sample = np.arange(n)
    if params.mtry == "sqrt":
        mtry = max(1, int(round(math.sqrt(n_feat))))
    elif params.mtry == "all" or params.mtry is None:
        mtry = n_feat
    else:
        mtry = max(1, min(int(params.mtry), n_feat))

    tree = _Tree()
    root = tree.add_node(int(y[sample].sum()), len(sample))
    stack = [(root, sample, 0)]
    while stack:
        node, idx, depth = stack.pop()
        n_pos = int(y[idx].sum())
        n_tot = len(idx)
        tree.pos[node], tree.total[node] = n_pos, n_tot
        if (
            n_pos == 0
            or n_pos == n_tot
            or n_tot < 2 * params.min_leaf
            or (params.max_depth is not None and depth >= params.max_depth)
        ):
            continue
        feats = rng.choice(n_feat, size=mtry, replace=False)
        found = _gini_best_split(x, y, idx, feats, params.min_leaf)
        if found is None:
            continue
        weighted, f, threshold = found
        p = n_pos / n_tot
        if weighted >= n_tot * 2 * p * (1 - p) - 1e-12:  # no impurity reduction
            continue
        go_left = x[idx, f] <= threshold
        left = tree.add_node(0, 0)
        right = tree.add_node(0, 0)
        tree.feature[node], tree.threshold[node] = f, threshold
        tree.left[node], tree.right[node] = left, right
        stack.append((left, idx[go_left], depth + 1))
        stack.append((right, idx[~go_left], depth + 1))
    return tree


def train_rf(x, y, params: RFParams | None = None) -> ForestModel:
    """Random forest of CART trees; each tree gets its own seed derived from
    the master seed, so any parallel training schedule gives the sequential
    result."""
    params = params or RFParams()
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if x.ndim != 2 or len(x) != len(y):
        raise DataError("X must be 2-D with one label per row")
    if len(np.unique(y)) < 2:
        raise DataError("training labels contain a single class")
    if not set(np.unique(y)) <= {0, 1}:
        raise DataError("labels must be binary 0/1 with 1 the positive class")
    trees = []
    for i in range(params.n_trees):
        rng = derive_rng(params.seed, "rf-tree", str(i))
        trees.append(_grow_tree(x, y, rng, params))
    return ForestModel(trees=trees, params=params, n_features=x.shape[1])


# ---------------------------------------------------------------------------
# naive Bayes
# ---------------------------------------------------------------------------

_VAR_FLOOR = 1e-9


@dataclass
class NaiveBayesModel:
    variant: str  # "gaussian" | "multinomial"
    priors: np.ndarray  # [2], classes 0/1
    n_features: int
    means: np.ndarray | None = None  # gaussian [2, F]
    variances: np.ndarray | None = None  # gaussian [2, F]
    log_probs: np.ndarray | None = None  # multinomial [2, F]


def train_nb(x, y, variant: str = "gaussian") -> NaiveBayesModel:
    """Gaussian NB (per-class feature means/variances, floored) or
    multinomial NB (add-1 smoothed counts) with priors from class
    frequencies."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if len(np.unique(y)) < 2:
        raise DataError("training labels contain a single class")
    if not set(np.unique(y)) <= {0, 1}:
        raise DataError("labels must be binary 0/1 with 1 the positive class")
    priors = np.array([(y == 0).mean(), (y == 1).mean()])
    if variant == "gaussian":
        means = np.vstack([x[y == c].mean(axis=0) for c in (0, 1)])
        variances = np.vstack([x[y == c].var(axis=0) for c in (0, 1)])
        variances = np.maximum(variances, _VAR_FLOOR)
        return NaiveBayesModel(
            variant=variant, priors=priors, n_features=x.shape[1],
            means=means, variances=variances,
        )
    if variant == "multinomial":
        if np.any(x < 0):
            raise DataError("multinomial NB needs non-negative features")
        counts = np.vstack([x[y == c].sum(axis=0) for c in (0, 1)])
        smoothed = counts + 1.0
        log_probs = np.log(smoothed / smoothed.sum(axis=1, keepdims=True))
        return NaiveBayesModel(
            variant=variant, priors=priors, n_features=x.shape[1],
            log_probs=log_probs,
        )
    raise DataError(f"unknown NB variant {variant!r}")


def _nb_log_joint(model: NaiveBayesModel, x: np.ndarray) -> np.ndarray:
    log_prior = np.log(model.priors)
    if model.variant == "gaussian":
        out = np.empty((len(x), 2))
        for c in (0, 1):
            var = model.variances[c]
            out[:, c] = (
                -0.5 * np.sum(np.log(2 * np.pi * var))
                - 0.5 * np.sum((x - model.means[c]) ** 2 / var, axis=1)
                + log_prior[c]
            )
        return out
    return x @ model.log_probs.T + log_prior


# ---------------------------------------------------------------------------
# prediction
# ---------------------------------------------------------------------------


def predict_proba(model, x) -> np.ndarray:
    """Positive-class score per row: fraction of tree votes for a forest,
    normalized posterior for naive Bayes."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise DataError("X must be 2-D")
    if len(x) == 0:
        return np.zeros(0)
    if x.shape[1] != model.n_features:
        raise DataError(
            f"feature width {x.shape[1]} does not match model width {model.n_features}"
        )
    if isinstance(model, ForestModel):
        votes = np.zeros(len(x))
        for tree in model.trees:
            votes += tree.votes(x)
        return votes / len(model.trees)
    if isinstance(model, NaiveBayesModel):
        lj = _nb_log_joint(model, x)
        lj -= lj.max(axis=1, keepdims=True)
        p = np.exp(lj)
        return p[:, 1] / p.sum(axis=1)
    raise DataError(f"unknown model type {type(model).__name__}")


def predict(model, x) -> np.ndarray:
    """Hard labels. Forests take the majority of tree votes (ties to the
    lower class); NB takes the larger posterior with ties broken by the
    larger prior, then the lower class."""
    scores = predict_proba(model, x)
    if isinstance(model, NaiveBayesModel):
        out = np.where(scores > 0.5, 1, 0)
        tie = scores == 0.5
        if np.any(tie):
            out[tie] = 1 if model.priors[1] > model.priors[0] else 0
        return out
    return (scores > 0.5).astype(np.int64)


# ---------------------------------------------------------------------------
# evaluation harness
# ---------------------------------------------------------------------------


def stratified_kfold(y, k: int, seed: int = 0) -> list[np.ndarray]:
    """k validation folds; per-class counts differ by at most one across
    folds; every index lands in exactly one fold."""
    y = np.asarray(y)
    if k < 2:
        raise DataError(f"k must be >= 2, got {k}")
    rng = derive_rng(seed, "cv-folds")
    folds: list[list[int]] = [[] for _ in range(k)]
    for cls in sorted(np.unique(y).tolist()):
        cls_idx = np.nonzero(y == cls)[0]
        if len(cls_idx) < k:
            raise DataError(f"class {cls!r} has {len(cls_idx)} members, fewer than k={k}")
        perm = rng.permutation(cls_idx)
        for pos, ix in enumerate(perm):
            folds[pos % k].append(int(ix))
    return [np.array(sorted(f), dtype=np.int64) for f in folds]


def holdout_split(
    labels: Mapping[str, str], n_holdout: int | float, seed: int = 0
) -> tuple[list[str], list[str]]:
    """Stratified hold-out of exactly n_holdout users, class ratio preserved
    within one user (largest-remainder rounding). A float in (0, 1) is read
    as a fraction of the users."""
    ids = sorted(labels)
    if isinstance(n_holdout, float) and 0.0 < n_holdout < 1.0:
        n_holdout = int(round(n_holdout * len(ids)))
    n_holdout = int(n_holdout)
    if n_holdout >= len(ids):
        raise DataError(f"n_holdout={n_holdout} must be smaller than {len(ids)} users")
    if n_holdout < 0:
        raise DataError("n_holdout must be >= 0")
    if n_holdout == 0:
        return ids, []
    by_class: dict[str, list[str]] = {}
    for uid in ids:
        by_class.setdefault(labels[uid], []).append(uid)
    total = len(ids)
    quotas = {c: n_holdout * len(m) / total for c, m in by_class.items()}
    base = {c: int(math.floor(q)) for c, q in quotas.items()}
    short = n_holdout - sum(base.values())
    for c in sorted(quotas, key=lambda c: (-(quotas[c] - base[c]), c))[:short]:
        base[c] += 1
    rng = derive_rng(seed, "holdout")
    holdout: list[str] = []
    for c in sorted(by_class):
        perm = rng.permutation(by_class[c])
        holdout.extend(perm[: base[c]].tolist())
    holdout = sorted(holdout)
    train = [u for u in ids if u not in set(holdout)]
    return train, holdout


def metrics(y_true, y_pred, positive=1) -> dict:
    """Positive-class precision/recall/F1 and the confusion counts; undefined
    ratios are 0 by convention."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if len(y_true) != len(y_pred):
        raise DataError("y_true and y_pred differ in length")
    tp = int(np.sum((y_true == positive) & (y_pred == positive)))
    fp = int(np.sum((y_true != positive) & (y_pred == positive)))
    fn = int(np.sum((y_true == positive) & (y_pred != positive)))
    tn = int(np.sum((y_true != positive) & (y_pred != positive)))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {
        "precision": precision,
        "recall": recall,
        "f1": f1,
        "confusion": {"tp": tp, "fp": fp, "tn": tn, "fn": fn},
    }


def roc_auc(y_true, scores) -> tuple[float, list[tuple[float, float]]]:
    """Threshold sweep over distinct scores (ties grouped), trapezoidal AUC.
    Numerically identical to the Mann-Whitney U / (n1*n2) identity."""
    y = np.asarray(y_true)
    s = np.asarray(scores, dtype=np.float64)
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise DataError("ROC needs both classes present")
    order = np.argsort(-s, kind="stable")
    ys = y[order]
    ss = s[order]
    points = [(0.0, 0.0)]
    tp = fp = 0
    auc = 0.0
    i = 0
    n = len(ss)
    while i < n:
        j = i
        while j + 1 < n and ss[j + 1] == ss[i]:
            j += 1
        d_tp = int(np.sum(ys[i : j + 1] == 1))
        d_fp = (j - i + 1) - d_tp
        prev_fpr, prev_tpr = points[-1]
        tp += d_tp
        fp += d_fp
        fpr, tpr = fp / n_neg, tp / n_pos
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0
        points.append((fpr, tpr))
        i = j + 1
    return auc, points


# ---------------------------------------------------------------------------
# ablation over dimension combinations
# ---------------------------------------------------------------------------


@dataclass
class AblationConfig:
    combos: list[tuple[str, ...]] | None = None  # default: all non-empty subsets
    algorithms: tuple[str, ...] = ("rf", "nb")
    imputation_modes: tuple[bool, ...] = (True, False)
    n_folds: int = 6
    n_holdout: int | float = 300  # absolute count, or fraction in (0, 1)
    target_dim: int = 300
    tau: int = 1
    ngram_min_count: int = 2
    npmi_threshold: float = 0.3
    lda_topics: int = 20
    lda_alpha: float | None = None
    lda_beta: float = 0.01
    lda_iterations: int = 200
    top_m: int = 10
    rf: RFParams = field(default_factory=RFParams)
    seed: int = 0


@dataclass
class EvalReport:
    config_id: str
    dimensions: tuple[str, ...]
    algorithm: str
    imputed: bool
    precision: float
    recall: float
    f1: float
    auc: float
    roc_points: list[tuple[float, float]]
    confusion: dict
    cv: dict
    n_train: int
    n_holdout: int
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config_id": self.config_id,
            "dimensions": list(self.dimensions),
            "algorithm": self.algorithm,
            "imputed": self.imputed,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "auc": self.auc,
            "roc_points": [list(p) for p in self.roc_points],
            "confusion": self.confusion,
            "cv": self.cv,
            "n_train": self.n_train,
            "n_holdout": self.n_holdout,
            "params": self.params,
        }


def _binary_labels(corpus: Corpus, user_ids: Sequence[str]) -> np.ndarray:
    return np.array(
        [1 if corpus.users[u].label == POSITIVE_LABEL else 0 for u in user_ids],
        dtype=np.int64,
    )


def _fit_predict(algorithm, x_train, y_train, x_eval, rf_params, seed):
    if algorithm == "rf":
        params = RFParams(**{**rf_params.__dict__, "seed": seed})
        model = train_rf(x_train, y_train, params)
    elif algorithm == "nb":
        model = train_nb(x_train, y_train, variant="gaussian")
    else:
        raise DataError(f"unknown algorithm {algorithm!r}")
    return predict(model, x_eval), predict_proba(model, x_eval)


def _evaluate(
    x, y, train_ix, hold_ix, algorithm, cfg: AblationConfig, seed_tag: str
) -> tuple[dict, dict]:
    """CV on the train rows, final fit on all train rows, metrics on the
    hold-out rows."""
    y_train = y[train_ix]
    folds = stratified_kfold(y_train, cfg.n_folds, seed=derive_rng(cfg.seed, "cv", seed_tag).integers(2**31))
    per_fold = {"precision": [], "recall": [], "f1": []}
    for f, val in enumerate(folds):
        mask = np.ones(len(train_ix), dtype=bool)
        mask[val] = False
        tr = train_ix[mask]
        va = train_ix[val]
        y_hat, _ = _fit_predict(
            algorithm, x[tr], y[tr], x[va], cfg.rf,
            derive_rng(cfg.seed, "fit", seed_tag, f"fold{f}").integers(2**31),
        )
        m = metrics(y[va], y_hat)
        for key in per_fold:
            per_fold[key].append(m[key])
    cv = {
        key: {
            "folds": vals,
            "mean": float(np.mean(vals)),
            "std": float(np.std(vals)),
        }
        for key, vals in per_fold.items()
    }
    y_hat, scores = _fit_predict(
        algorithm, x[train_ix], y[train_ix], x[hold_ix], cfg.rf,
        derive_rng(cfg.seed, "fit", seed_tag, "final").integers(2**31),
    )
    final = metrics(y[hold_ix], y_hat)
    auc, points = roc_auc(y[hold_ix], scores)
    final["auc"] = auc
    final["roc_points"] = points
    return final, cv


def run_ablation(
    corpus: Corpus,
    models: Mapping[str, "DimensionModel"],
    cfg: AblationConfig | None = None,
    vectors=None,
    imputed_vectors=None,
) -> list[EvalReport]:
    """Every dimension combination x algorithm x imputation mode, evaluated
    with stratified CV on the train split and reported on the hold-out split.

    Non-imputed runs drop users with a sparse representation in any
    configured dimension. SVD fusion is refit per combination on training
    users only; uni-dimensional combinations skip SVD.
    """
    cfg = cfg or AblationConfig()
    if vectors is None:
        if models is None:
            raise DataError("run_ablation needs dimension models or prebuilt vectors")
        vectors = build_user_vectors(
            corpus, models, tau=cfg.tau,
            ngram_min_count=cfg.ngram_min_count, npmi_threshold=cfg.npmi_threshold,
        )
    dims = tuple(sorted(vectors))
    combos = cfg.combos or _all_combos(dims)
    for combo in combos:
        if len(combo) >= 2 and len(dims) < 2:
            raise DataError("bi/tri-dimensional combos need >= 2 configured dimensions")

    sparse_users = {
        uid for dim in dims for uid, uv in vectors[dim].items() if uv.sparse
    }
    if True in cfg.imputation_modes and imputed_vectors is None:
        topic_models = fit_class_models(
            corpus, n_topics=cfg.lda_topics, alpha=cfg.lda_alpha, beta=cfg.lda_beta,
            iterations=cfg.lda_iterations, seed=derive_rng(cfg.seed, "impute-lda").integers(2**31),
        )
        imputed_vectors, _ = impute(vectors, corpus, topic_models, top_m=cfg.top_m)

    reports: list[EvalReport] = []
    for mode in cfg.imputation_modes:
        vecs = imputed_vectors if mode else vectors
        if mode:
            ids = corpus.user_ids()
        else:
            ids = [u for u in corpus.user_ids() if u not in sparse_users]
        labels = {u: corpus.users[u].label for u in ids}
        train_ids, hold_ids = holdout_split(
            labels, cfg.n_holdout,
            seed=derive_rng(cfg.seed, "holdout", f"imputed={mode}").integers(2**31),
        )
        all_ids = train_ids + hold_ids
        y = _binary_labels(corpus, all_ids)
        train_ix = np.arange(len(train_ids))
        hold_ix = np.arange(len(train_ids), len(all_ids))

        for combo in combos:
            x = _combo_matrix(vecs, combo, train_ids, all_ids, cfg.target_dim)
            for algorithm in cfg.algorithms:
                tag = f"{'+'.join(combo)}/{algorithm}/imputed={mode}"
                final, cv = _evaluate(x, y, train_ix, hold_ix, algorithm, cfg, tag)
                reports.append(
                    EvalReport(
                        config_id=tag,
                        dimensions=combo,
                        algorithm=algorithm,
                        imputed=mode,
                        precision=final["precision"],
                        recall=final["recall"],
                        f1=final["f1"],
                        auc=final["auc"],
                        roc_points=final["roc_points"],
                        confusion=final["confusion"],
                        cv=cv,
                        n_train=len(train_ids),
                        n_holdout=len(hold_ids),
                        params=_echo_params(cfg),
                    )
                )
    return reports


def _all_combos(dims: tuple[str, ...]) -> list[tuple[str, ...]]:
    out: list[tuple[str, ...]] = []
    for mask in range(1, 2 ** len(dims)):
        out.append(tuple(d for i, d in enumerate(dims) if mask >> i & 1))
    out.sort(key=lambda c: (len(c), c))
    return out


def _combo_matrix(vecs, combo, train_ids, all_ids, target_dim) -> np.ndarray:
    if len(combo) == 1:
        dim = combo[0]
        return np.vstack([vecs[dim][u].vector for u in all_ids])
    basis = fit_basis(vecs, train_ids, target_dim, dims=combo)
    matrix, _ = concat_matrix(vecs, all_ids, dims=combo)
    return matrix @ basis.projection


def _echo_params(cfg: AblationConfig) -> dict:
    d = {k: v for k, v in cfg.__dict__.items() if k != "rf"}
    d["combos"] = [list(c) for c in (d["combos"] or [])] or None
    d["rf"] = dict(cfg.rf.__dict__)
    return d


def baseline_model(corpus: Corpus, cfg: AblationConfig | None = None) -> EvalReport:
    """The frequency baseline: unigram count features over the training
    vocabulary and a multinomial NB, under the same split protocol as the
    ablation's imputed runs."""
    cfg = cfg or AblationConfig()
    ids = corpus.user_ids()
    labels = {u: corpus.users[u].label for u in ids}
    train_ids, hold_ids = holdout_split(
        labels, cfg.n_holdout,
        seed=derive_rng(cfg.seed, "holdout", "imputed=True").integers(2**31),
    )
    vocab: dict[str, int] = {}
    for u in train_ids:
        for tok in corpus.users[u].tokens:
            if tok not in vocab:
                vocab[tok] = len(vocab)
    all_ids = train_ids + hold_ids
    x = np.zeros((len(all_ids), len(vocab)), dtype=np.float64)
    for i, u in enumerate(all_ids):
        for tok, cnt in Counter(corpus.users[u].tokens).items():
            j = vocab.get(tok)
            if j is not None:
                x[i, j] = cnt
    y = _binary_labels(corpus, all_ids)
    train_ix = np.arange(len(train_ids))
    hold_ix = np.arange(len(train_ids), len(all_ids))

    y_train = y[train_ix]
    folds = stratified_kfold(
        y_train, cfg.n_folds, seed=derive_rng(cfg.seed, "cv", "baseline").integers(2**31)
    )
    per_fold = {"precision": [], "recall": [], "f1": []}
    for val in folds:
        mask = np.ones(len(train_ix), dtype=bool)
        mask[val] = False
        model = train_nb(x[train_ix[mask]], y_train[mask], variant="multinomial")
        m = metrics(y_train[val], predict(model, x[train_ix[val]]))
        for key in per_fold:
            per_fold[key].append(m[key])
    cv = {
        key: {"folds": vals, "mean": float(np.mean(vals)), "std": float(np.std(vals))}
        for key, vals in per_fold.items()
    }
    model = train_nb(x[train_ix], y_train, variant="multinomial")
    final = metrics(y[hold_ix], predict(model, x[hold_ix]))
    auc, points = roc_auc(y[hold_ix], predict_proba(model, x[hold_ix]))
    return EvalReport(
        config_id="baseline/nb/counts",
        dimensions=(),
        algorithm="nb",
        imputed=False,
        precision=final["precision"],
        recall=final["recall"],
        f1=final["f1"],
        auc=auc,
        roc_points=points,
        confusion=final["confusion"],
        cv=cv,
        n_train=len(train_ids),
        n_holdout=len(hold_ids),
        params={"features": len(vocab)},
    )
