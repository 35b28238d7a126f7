"""Topic models: collapsed-Gibbs LDA, perplexity-driven K selection, and a
truncated HDP sampler used to build pseudo-users from topically coherent
document clusters.

The HDP is a truncated direct-assignment sampler: document-level topic priors
are alpha0 * b where the global weights b are resampled each sweep from table
counts drawn by the Chinese-restaurant construction. At the truncation limit
this behaves like the exact sampler for corpora whose topic count is well
below the truncation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._kernels import fold_in_sweep, gibbs_sweep
from .corpus import UserDoc
from .errors import DataError, InvariantError
from .seeds import derive_rng


@dataclass
class TopicModel:
    n_topics: int
    phi: np.ndarray  # [K, V] topic-word distributions, rows sum to 1
    theta: np.ndarray  # [D, K] doc-topic distributions, rows sum to 1
    alpha: float
    beta: float
    seed: int
    vocab: dict[str, int]
    doc_ids: list[str] = field(default_factory=list)
    topic_word_counts: np.ndarray | None = None
    doc_topic_counts: np.ndarray | None = None

    def doc_index(self, doc_id: str) -> int | None:
        try:
            return self.doc_ids.index(doc_id)
        except ValueError:
            return None

    def top_words(self, topic: int, n: int = 10) -> list[str]:
        inv = sorted(self.vocab, key=self.vocab.get)
        order = np.argsort(-self.phi[topic], kind="stable")[:n]
        return [inv[i] for i in order]


@dataclass
class PerplexityCurve:
    points: list[tuple[int, float]]  # sorted by K
    selected_k: int


@dataclass
class PseudoUserClusters:
    clusters: list[list[str]]  # document ids per leaf cluster
    metadata: list[dict]  # {"topic": int, "subtopic": int} per leaf


def _encode(docs: Sequence[Sequence[str]], vocab: dict[str, int] | None = None):
    if vocab is None:
        vocab = {}
        for doc in docs:
            for tok in doc:
                if tok not in vocab:
                    vocab[tok] = len(vocab)
    words, doc_ix = [], []
    for d, doc in enumerate(docs):
        for tok in doc:
            idx = vocab.get(tok)
            if idx is not None:
                words.append(idx)
                doc_ix.append(d)
    return (
        vocab,
        np.array(words, dtype=np.int32),
        np.array(doc_ix, dtype=np.int32),
    )


def fit_lda(
    docs: Sequence[Sequence[str]],
    n_topics: int,
    alpha: float | None = None,
    beta: float = 0.01,
    iterations: int = 1000,
    seed: int = 0,
    doc_ids: Sequence[str] | None = None,
) -> TopicModel:
    """Collapsed Gibbs LDA with a fixed sweep budget.

    alpha defaults to 50 / n_topics. phi and theta are point estimates from
    the final counts with Dirichlet smoothing.
    """
    if n_topics < 1:
        raise DataError(f"n_topics must be >= 1, got {n_topics}")
    if not docs:
        raise DataError("no documents")
    if alpha is None:
        alpha = 50.0 / n_topics
    vocab, words, doc_ix = _encode(docs)
    if not vocab:
        raise DataError("empty vocabulary")
    n_docs = len(docs)
    rng = derive_rng(seed, "lda", str(n_topics))
    z = rng.integers(0, n_topics, size=len(words)).astype(np.int32)

    ndk = np.zeros((n_docs, n_topics), dtype=np.int64)
    nkw = np.zeros((n_topics, len(vocab)), dtype=np.int64)
    nk = np.zeros(n_topics, dtype=np.int64)
    np.add.at(ndk, (doc_ix, z), 1)
    np.add.at(nkw, (z, words), 1)
    np.add.at(nk, z, 1)

    alpha_vec = np.full(n_topics, alpha, dtype=np.float64)
    for _ in range(iterations):
        gibbs_sweep(words, doc_ix, z, ndk, nkw, nk, alpha_vec, beta, rng.random(len(words)))

    if nkw.sum() != len(words) or nk.sum() != len(words):
        raise InvariantError("Gibbs counts out of sync with token count")

    phi = (nkw + beta) / (nk[:, None] + len(vocab) * beta)
    theta = (ndk + alpha) / (ndk.sum(axis=1, keepdims=True) + n_topics * alpha)
    return TopicModel(
        n_topics=n_topics,
        phi=phi,
        theta=theta,
        alpha=alpha,
        beta=beta,
        seed=seed,
        vocab=vocab,
        doc_ids=list(doc_ids) if doc_ids is not None else [],
        topic_word_counts=nkw,
        doc_topic_counts=ndk,
    )


def _fold_in(
    model: TopicModel, tokens: Sequence[str], rng, iterations: int = 50
) -> np.ndarray | None:
    """Estimate a doc-topic row for unseen tokens against fixed phi.

    Returns None when no token is in the model vocabulary. The estimate
    averages the smoothed counts over the last quarter of the sweeps.
    """
    ids = np.array(
        [model.vocab[t] for t in tokens if t in model.vocab], dtype=np.int32
    )
    if len(ids) == 0:
        return None
    k = model.n_topics
    z = rng.integers(0, k, size=len(ids)).astype(np.int32)
    dk = np.bincount(z, minlength=k).astype(np.int64)
    theta_acc = np.zeros(k, dtype=np.float64)
    tail = max(1, iterations // 4)
    for sweep in range(iterations):
        fold_in_sweep(ids, z, dk, model.phi, model.alpha, rng.random(len(ids)))
        if sweep >= iterations - tail:
            theta_acc += (dk + model.alpha) / (len(ids) + k * model.alpha)
    return theta_acc / tail


def perplexity(
    model: TopicModel,
    docs: Sequence[Sequence[str]],
    fold_iterations: int = 50,
) -> float:
    """Document-completion perplexity exp(-sum log p(w|d) / sum N_d).

    Doc-topic weights are folded in by Gibbs against the fixed topics using
    the even-indexed in-vocabulary tokens; p(w|d) = sum_k theta_dk phi_kw is
    evaluated on the odd-indexed tokens. Estimating theta on the scored
    tokens themselves would reward arbitrarily large K. Single-token
    documents are folded and scored on that token. Documents with no
    in-vocabulary tokens are skipped; if all are skipped a DataError is
    raised.
    """
    log_lik = 0.0
    n_tokens = 0
    scored = 0
    for i, doc in enumerate(docs):
        ids = [t for t in doc if t in model.vocab]
        if not ids:
            continue
        estimate = ids[0::2]
        evaluate = ids[1::2] if len(ids) > 1 else ids
        rng = derive_rng(model.seed, "foldin", str(i))
        theta_d = _fold_in(model, estimate, rng, iterations=fold_iterations)
        eval_ix = [model.vocab[t] for t in evaluate]
        p_w = theta_d @ model.phi[:, eval_ix]
        log_lik += float(np.log(np.maximum(p_w, 1e-300)).sum())
        n_tokens += len(eval_ix)
        scored += 1
    if scored == 0:
        raise DataError("no held-out document has in-vocabulary tokens")
    return float(np.exp(-log_lik / n_tokens))


def select_k(
    docs: Sequence[Sequence[str]],
    k_grid: Sequence[int],
    seed: int = 0,
    alpha: float | None = None,
    beta: float = 0.01,
    iterations: int = 200,
    val_fraction: float = 0.1,
) -> PerplexityCurve:
    """Fit one LDA per candidate K on a train split and pick the K with the
    lowest held-out perplexity on the validation split.

    The full curve is returned so a human can override the automatic choice.
    """
    grid = sorted(set(int(k) for k in k_grid))
    if not grid:
        raise DataError("empty k_grid")
    if len(docs) < 2:
        raise DataError("need at least 2 documents to split")
    rng = derive_rng(seed, "select-k", "split")
    order = rng.permutation(len(docs))
    n_val = max(1, int(round(val_fraction * len(docs))))
    val_ix = set(order[:n_val].tolist())
    train = [docs[i] for i in range(len(docs)) if i not in val_ix]
    val = [docs[i] for i in range(len(docs)) if i in val_ix]

    points = []
    for k in grid:
        model = fit_lda(
            train, k, alpha=alpha, beta=beta, iterations=iterations,
            seed=int(derive_rng(seed, "select-k", str(k)).integers(2**31)),
        )
        points.append((k, perplexity(model, val)))
    best = min(points, key=lambda kv: (kv[1], kv[0]))
    return PerplexityCurve(points=points, selected_k=best[0])


def doc_topic_row(model: TopicModel, user: UserDoc) -> np.ndarray:
    """The user's doc-topic distribution: the stored theta row when the user
    was a training document, otherwise folded in against the fixed topics.
    Uniform when the user has no in-vocabulary tokens."""
    idx = model.doc_index(user.user_id) if model.doc_ids else None
    if idx is not None:
        return model.theta[idx]
    rng = derive_rng(model.seed, "user-topics", user.user_id)
    folded = _fold_in(model, user.tokens, rng)
    if folded is None:
        return np.full(model.n_topics, 1.0 / model.n_topics)
    return folded


def user_topics(model: TopicModel, user: UserDoc, top_m: int = 10) -> set[int]:
    """The user's topic set: the top_m topics of their doc-topic row, ties
    broken by topic id. Users with no in-vocabulary tokens get an empty set.
    """
    if not any(t in model.vocab for t in user.tokens):
        return set()
    row = doc_topic_row(model, user)
    order = sorted(range(model.n_topics), key=lambda k: (-row[k], k))
    return set(order[: max(0, top_m)])


def fit_class_models(
    corpus,
    n_topics: int = 20,
    alpha: float | None = None,
    beta: float = 0.01,
    iterations: int = 200,
    seed: int = 0,
) -> dict[str, "TopicModel"]:
    """One LDA per class label, each user's stream being one document, so
    imputation can compare users against same-class topics."""
    by_label: dict[str, list[str]] = {}
    for uid in corpus.user_ids():
        by_label.setdefault(corpus.users[uid].label, []).append(uid)
    models = {}
    for label in sorted(by_label):
        uids = by_label[label]
        docs = [corpus.users[u].tokens for u in uids]
        models[label] = fit_lda(
            docs,
            n_topics,
            alpha=alpha,
            beta=beta,
            iterations=iterations,
            seed=derive_rng(seed, "class-lda", label).integers(2**31),
            doc_ids=uids,
        )
    return models


def fit_hdp(
    docs: Sequence[Sequence[str]],
    gamma: float = 1.0,
    alpha0: float = 1.0,
    max_topics: int = 20,
    iterations: int = 200,
    seed: int = 0,
    doc_ids: Sequence[str] | None = None,
    sub_topics: int = 30,
    sub_iterations: int = 100,
) -> PseudoUserClusters:
    """Two-level topical clustering of documents into pseudo-user leaf groups.

    Level 1 groups documents by dominant topic under a truncated HDP; level 2
    refits within each group (truncation sub_topics) and splits by dominant
    subtopic. Leaves partition the documents.
    """
    if not docs:
        raise DataError("no documents")
    doc_ids = list(doc_ids) if doc_ids is not None else [str(i) for i in range(len(docs))]
    if len(doc_ids) != len(docs):
        raise DataError("doc_ids length mismatch")

    top = _hdp_dominant(docs, gamma, alpha0, max_topics, iterations, seed)
    groups: dict[int, list[int]] = {}
    for i, t in enumerate(top):
        groups.setdefault(int(t), []).append(i)

    clusters: list[list[str]] = []
    metadata: list[dict] = []
    for t in sorted(groups):
        members = groups[t]
        if len(members) == 1:
            clusters.append([doc_ids[members[0]]])
            metadata.append({"topic": t, "subtopic": 0})
            continue
        sub_docs = [docs[i] for i in members]
        sub = _hdp_dominant(
            sub_docs, gamma, alpha0, sub_topics, sub_iterations,
            int(derive_rng(seed, "hdp-sub", str(t)).integers(2**31)),
        )
        sub_groups: dict[int, list[int]] = {}
        for local, s in enumerate(sub):
            sub_groups.setdefault(int(s), []).append(members[local])
        for s in sorted(sub_groups):
            clusters.append([doc_ids[i] for i in sub_groups[s]])
            metadata.append({"topic": t, "subtopic": s})
    return PseudoUserClusters(clusters=clusters, metadata=metadata)


def _hdp_dominant(docs, gamma, alpha0, max_topics, iterations, seed):
    """Dominant topic per document under the truncated direct-assignment
    sampler. Warns when every truncation slot stays occupied (mass pushed
    against the truncation boundary)."""
    vocab, words, doc_ix = _encode(docs)
    if not vocab:
        raise DataError("empty vocabulary")
    n_docs = len(docs)
    k = max_topics
    rng = derive_rng(seed, "hdp", str(k))
    # start from a single occupied topic; the sampler opens further topics
    # only when the data demands them, mirroring the Chinese restaurant's
    # rich-get-richer growth and avoiding fragmented duplicate topics
    z = np.zeros(len(words), dtype=np.int32)
    ndk = np.zeros((n_docs, k), dtype=np.int64)
    nkw = np.zeros((k, len(vocab)), dtype=np.int64)
    nk = np.zeros(k, dtype=np.int64)
    np.add.at(ndk, (doc_ix, z), 1)
    np.add.at(nkw, (z, words), 1)
    np.add.at(nk, z, 1)
    beta_word = 0.01
    b = np.full(k, 1.0 / k)

    for _ in range(iterations):
        gibbs_sweep(
            words, doc_ix, z, ndk, nkw, nk, alpha0 * b, beta_word, rng.random(len(words))
        )
        m = _table_counts(ndk, alpha0 * b, rng)
        b = rng.dirichlet(m + gamma / k)

    if np.all(nk > 0) and k > 1:
        warnings.warn(
            f"all {k} truncation slots occupied; raise max_topics", stacklevel=2
        )
    return np.argmax(ndk, axis=1)


def _table_counts(ndk, alpha_b, rng) -> np.ndarray:
    """Sample Chinese-restaurant table counts m_k given customer counts n_dk:
    the i-th customer of (d, k) opens a table with probability
    alpha_b[k] / (alpha_b[k] + i)."""
    k = ndk.shape[1]
    m = np.zeros(k, dtype=np.float64)
    rows, cols = np.nonzero(ndk)
    for d, kk in zip(rows, cols):
        n = ndk[d, kk]
        i = np.arange(n, dtype=np.float64)
        m[kk] += 1 + np.sum(rng.random(n - 1) < (alpha_b[kk] / (alpha_b[kk] + i[1:])))
    return m


def sample_clusters(
    clusters: PseudoUserClusters, n: int, seed: int = 0
) -> PseudoUserClusters:
    """Sample at most n leaf clusters without replacement (all when n is
    larger than the number of leaves)."""
    total = len(clusters.clusters)
    if n >= total:
        return clusters
    rng = derive_rng(seed, "pseudo-users", "sample")
    pick = sorted(rng.choice(total, size=n, replace=False).tolist())
    return PseudoUserClusters(
        clusters=[clusters.clusters[i] for i in pick],
        metadata=[clusters.metadata[i] for i in pick],
    )
