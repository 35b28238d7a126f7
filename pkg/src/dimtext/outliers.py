"""Density-based outlier screening inside a labeled class, with statistical
validation.

The clustering is the full HDBSCAN pipeline built from first principles: core
distances, mutual reachability, a minimum spanning tree, the single-linkage
dendrogram, condensation by minimum cluster size, and stability-based flat
extraction. Points in no stable cluster are NOISE. The majority cluster is
read as the likely-correctly-labeled set, everything else as likely outliers;
a Mann-Whitney U-test on cosine-to-centroid scalars quantifies the separation
and Cohen's kappa scores agreement with an expert list.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import Corpus, subset
from .errors import DataError
from .similarity import cosine

NOISE = -1

_MIN_DIST = 1e-12  # duplicate points produce zero MST edges; clamp for 1/dist


@dataclass
class ClusterAssignment:
    user_id: str
    cluster_id: int  # NOISE (-1) or contiguous id from 0
    dimension: str = ""


@dataclass
class UTestResult:
    u: float
    z: float
    p: float
    effect_size: float  # r = |z| / sqrt(n1 + n2)


@dataclass
class KappaResult:
    kappa: float
    observed_agreement: float
    expected_agreement: float
    n: int


@dataclass
class RemovalReport:
    policy: str
    removed: list[dict] = field(default_factory=list)  # {user_id, dimensions}

    def removed_ids(self) -> list[str]:
        return [r["user_id"] for r in self.removed]


# ---------------------------------------------------------------------------
# HDBSCAN
# ---------------------------------------------------------------------------


def core_distances(points: np.ndarray, min_samples: int) -> np.ndarray:
    """Distance to the min_samples-th nearest neighbor, the point itself
    counting as its own first neighbor."""
    points = np.asarray(points, dtype=np.float64)
    n = len(points)
    if min_samples < 1 or min_samples > n:
        raise DataError(f"min_samples must be in [1, {n}], got {min_samples}")
    d = _pairwise(points)
    return np.sort(d, axis=1)[:, min_samples - 1]


def mutual_reachability(points: np.ndarray, min_samples: int) -> np.ndarray:
    """max(core(a), core(b), d(a, b)) for every pair; zero diagonal."""
    points = np.asarray(points, dtype=np.float64)
    d = _pairwise(points)
    core = np.sort(d, axis=1)[:, min_samples - 1]
    mr = np.maximum(d, np.maximum(core[:, None], core[None, :]))
    np.fill_diagonal(mr, 0.0)
    return mr


def _pairwise(points: np.ndarray) -> np.ndarray:
    sq = np.sum(points**2, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (points @ points.T)
    np.maximum(d2, 0.0, out=d2)
    d = np.sqrt(d2)
    np.fill_diagonal(d, 0.0)
    return d


def minimum_spanning_tree(weights: np.ndarray) -> list[tuple[int, int, float]]:
    """Prim's MST over a dense symmetric weight matrix; edges (i, j, w) with
    i < j, in insertion order."""
    n = weights.shape[0]
    in_tree = np.zeros(n, dtype=bool)
    best = weights[0].astype(np.float64).copy()
    best_from = np.zeros(n, dtype=np.int64)
    in_tree[0] = True
    best[0] = np.inf
    edges = []
    for _ in range(n - 1):
        j = int(np.argmin(best))
        i = int(best_from[j])
        edges.append((min(i, j), max(i, j), float(best[j])))
        in_tree[j] = True
        closer = ~in_tree & (weights[j] < best)
        best[closer] = weights[j][closer]
        best_from[closer] = j
        best[j] = np.inf
    return edges


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        self.parent[self.find(a)] = self.find(b)


def _single_linkage(edges, n):
    """Dendrogram rows (left, right, dist, size) from MST edges; internal node
    ids start at n, the root is 2n - 2."""
    order = sorted(edges, key=lambda e: (e[2], e[0], e[1]))
    uf = _UnionFind(2 * n - 1)
    node_of = list(range(n))  # current dendrogram node per component root
    size = [1] * n + [0] * (n - 1)
    rows = []
    nxt = n
    for i, j, w in order:
        ra, rb = uf.find(i), uf.find(j)
        na, nb = node_of[ra], node_of[rb]
        size[nxt] = size[na] + size[nb]
        rows.append((na, nb, w, size[nxt]))
        uf.union(ra, rb)
        node_of[uf.find(ra)] = nxt
        nxt += 1
    return rows


def _condense(rows, n, min_cluster_size):
    """Condensed tree: per cluster its birth lambda and parent, plus point
    fallout entries (cluster, point, lambda)."""
    n_nodes = 2 * n - 1
    left = [-1] * n_nodes
    right = [-1] * n_nodes
    dist = [0.0] * n_nodes
    for k, (a, b, w, _) in enumerate(rows):
        left[n + k], right[n + k], dist[n + k] = a, b, w

    def leaves(node):
        out, stack = [], [node]
        while stack:
            x = stack.pop()
            if x < n:
                out.append(x)
            else:
                stack.extend((left[x], right[x]))
        return out

    def node_size(x):
        return 1 if x < n else rows[x - n][3]

    birth = {0: 0.0}
    parent_cluster = {0: -1}
    fallout = []  # (cluster, point, lambda)
    children: dict[int, list[int]] = {0: []}
    next_cluster = 1
    root = n_nodes - 1
    stack = [(root, 0)]
    while stack:
        node, cluster = stack.pop()
        if node < n:
            fallout.append((cluster, node, np.inf))  # lone point cluster end
            continue
        lam = 1.0 / max(dist[node], _MIN_DIST)
        a, b = left[node], right[node]
        big_a = node_size(a) >= min_cluster_size
        big_b = node_size(b) >= min_cluster_size
        if big_a and big_b:
            for child in (a, b):
                cid = next_cluster
                next_cluster += 1
                birth[cid] = lam
                parent_cluster[cid] = cluster
                children.setdefault(cluster, []).append(cid)
                children.setdefault(cid, [])
                stack.append((child, cid))
        elif big_a or big_b:
            keep, drop = (a, b) if big_a else (b, a)
            for p in leaves(drop):
                fallout.append((cluster, p, lam))
            stack.append((keep, cluster))
        else:
            for p in leaves(node):
                fallout.append((cluster, p, lam))
    return birth, parent_cluster, children, fallout


def hdbscan_labels(
    points: np.ndarray,
    min_cluster_size: int,
    min_samples: int,
    allow_single_cluster: bool = False,
) -> np.ndarray:
    """Cluster labels (NOISE = -1, clusters contiguous from 0) for row
    vectors, by the full HDBSCAN pipeline.

    When allow_single_cluster is set and condensation yields only the root
    cluster, the root is selected at its most stable flat cut: the lambda
    maximizing lambda * (points still attached), points detaching earlier
    being labeled noise.
    """
    points = np.asarray(points, dtype=np.float64)
    n = len(points)
    if n < min_samples:
        raise DataError(f"need at least min_samples={min_samples} points, got {n}")
    if n < min_cluster_size:
        raise DataError(
            f"need at least min_cluster_size={min_cluster_size} points, got {n}"
        )
    if min_cluster_size < 2:
        raise DataError("min_cluster_size must be >= 2")
    mr = mutual_reachability(points, min_samples)
    edges = minimum_spanning_tree(mr)
    rows = _single_linkage(edges, n)
    birth, parent_cluster, children, fallout = _condense(rows, n, min_cluster_size)

    # lambda at which each point finally detaches, capped for stability sums
    lam_cap = max((1.0 / max(e[2], _MIN_DIST)) for e in edges)
    stability: dict[int, float] = {c: 0.0 for c in birth}
    points_of: dict[int, list[tuple[int, float]]] = {c: [] for c in birth}
    for cluster, point, lam in fallout:
        lam = min(lam, lam_cap)
        stability[cluster] += lam - birth[cluster]
        points_of[cluster].append((point, lam))
    for cid, b in birth.items():
        if cid == 0:
            continue
        # child clusters contribute their size at the split level
        stability[parent_cluster[cid]] += _cluster_size(cid, children, points_of) * (
            b - birth[parent_cluster[cid]]
        )

    selected = _select_clusters(stability, children, allow_single_cluster)

    labels = np.full(n, NOISE, dtype=np.int64)
    if not selected:
        return labels
    final = []
    for c in sorted(selected):
        member_points = []
        stack = [c]
        while stack:
            x = stack.pop()
            member_points.extend(points_of[x])
            stack.extend(children[x])
        if c == 0 and len(selected) == 1 and allow_single_cluster and not children[0]:
            member_points = _root_stable_cut(member_points, min_cluster_size)
        final.append((-len(member_points), min(p for p, _ in member_points), member_points))
    final.sort()
    for label, (_, _, member_points) in enumerate(final):
        for p, _ in member_points:
            labels[p] = label
    return labels


def _cluster_size(cid, children, points_of) -> int:
    total, stack = 0, [cid]
    while stack:
        x = stack.pop()
        total += len(points_of[x])
        stack.extend(children[x])
    return total


def _select_clusters(stability, children, allow_single_cluster):
    chosen = {}
    best = {}
    for c in sorted(stability, reverse=True):
        child_sum = sum(best[d] for d in children[c])
        if c == 0 and not allow_single_cluster:
            best[c] = child_sum
            chosen[c] = False
            continue
        if not children[c] or stability[c] > child_sum:
            best[c] = stability[c]
            chosen[c] = True
        else:
            best[c] = child_sum
            chosen[c] = False
    selected = []
    stack = [0]
    while stack:
        c = stack.pop()
        if chosen[c]:
            selected.append(c)
        else:
            stack.extend(children[c])
    return selected


_ROOT_GAP = 2.0  # density ratio that separates stray fallout from the body


def _root_stable_cut(member_points, min_cluster_size):
    """Trim early root fallout in single-cluster mode.

    Points are dropped as noise only when their detachment density is
    separated from the cluster body by the largest multiplicative gap in the
    sorted lambdas and that gap is at least _ROOT_GAP; a plain blob with a
    continuous density profile keeps all its points."""
    lams = np.array(sorted(lam for _, lam in member_points))
    n = len(lams)
    ratios = lams[1:] / np.maximum(lams[:-1], _MIN_DIST)
    keep_sizes = n - np.arange(1, n)  # members if we cut before index i+1
    ratios[keep_sizes < min_cluster_size] = -np.inf
    if len(ratios) == 0 or np.max(ratios) < _ROOT_GAP:
        return member_points
    cut = int(np.argmax(ratios)) + 1
    lam_star = lams[cut]
    return [(p, lam) for p, lam in member_points if lam >= lam_star]


def hdbscan(
    vectors: Mapping[str, np.ndarray],
    min_cluster_size: int | None = None,
    min_samples: int = 5,
    dimension: str = "",
    allow_single_cluster: bool = False,
) -> list[ClusterAssignment]:
    """HDBSCAN over per-user vectors for one dimension.

    min_cluster_size defaults to max(15, 3% of the points).
    """
    ids = sorted(vectors)
    x = np.vstack([np.asarray(vectors[u], dtype=np.float64) for u in ids])
    if min_cluster_size is None:
        min_cluster_size = max(15, int(math.ceil(0.03 * len(ids))))
    labels = hdbscan_labels(
        x, min_cluster_size, min_samples, allow_single_cluster=allow_single_cluster
    )
    return [
        ClusterAssignment(user_id=u, cluster_id=int(l), dimension=dimension)
        for u, l in zip(ids, labels)
    ]


def split_majority_minority(
    assignments: Sequence[ClusterAssignment],
) -> tuple[set[str], set[str]]:
    """Largest cluster vs everyone else (smaller clusters and NOISE); size
    ties go to the lower cluster id."""
    sizes = Counter(a.cluster_id for a in assignments if a.cluster_id != NOISE)
    if not sizes:
        raise DataError("no clusters to split")
    majority_id = min(sizes, key=lambda c: (-sizes[c], c))
    majority = {a.user_id for a in assignments if a.cluster_id == majority_id}
    minority = {a.user_id for a in assignments if a.cluster_id != majority_id}
    return majority, minority


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------


def mann_whitney_u(sample_a: Sequence[float], sample_b: Sequence[float]) -> UTestResult:
    """Rank-sum U of the first sample, with midrank ties, a tie-corrected
    normal approximation with continuity correction, two-sided p, and effect
    size r = |z| / sqrt(n1 + n2)."""
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    n1, n2 = len(a), len(b)
    if n1 == 0 or n2 == 0:
        raise DataError("both samples must be non-empty")
    pooled = np.concatenate([a, b])
    ranks = _midranks(pooled)
    u = float(np.sum(ranks[:n1]) - n1 * (n1 + 1) / 2.0)

    n = n1 + n2
    _, tie_counts = np.unique(pooled, return_counts=True)
    tie_term = float(np.sum(tie_counts**3 - tie_counts))
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if var <= 0.0:
        raise DataError("zero-variance samples: all pooled values identical")
    mean = n1 * n2 / 2.0
    diff = u - mean
    cc = 0.5 if diff > 0 else (-0.5 if diff < 0 else 0.0)
    z = (diff - cc) / math.sqrt(var)
    p = min(1.0, max(math.erfc(abs(z) / math.sqrt(2.0)), 5e-324))
    return UTestResult(u=u, z=z, p=p, effect_size=abs(z) / math.sqrt(n))


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def auc_from_u(u: float, n1: int, n2: int) -> float:
    """The U/(n1*n2) identity linking the rank statistic to ROC AUC."""
    return u / (n1 * n2)


def scalarize_for_test(
    user_vectors: Mapping[str, np.ndarray], centroid: np.ndarray
) -> dict[str, float]:
    """Per-user cosine similarity to a cluster centroid: the 1-D quantity the
    majority/minority U-test runs on."""
    centroid = np.asarray(centroid, dtype=np.float64)
    if np.linalg.norm(centroid) == 0.0:
        raise DataError("zero centroid")
    return {u: cosine(v, centroid) for u, v in sorted(user_vectors.items())}


def majority_centroid(
    user_vectors: Mapping[str, np.ndarray], majority: Iterable[str]
) -> np.ndarray:
    ids = sorted(majority)
    if not ids:
        raise DataError("empty majority set")
    return np.mean([np.asarray(user_vectors[u], dtype=np.float64) for u in ids], axis=0)


def cohen_kappa(labels_a: Sequence, labels_b: Sequence) -> KappaResult:
    """Cohen's kappa from the confusion matrix of two label sequences."""
    if len(labels_a) != len(labels_b):
        raise DataError("label sequences differ in length")
    n = len(labels_a)
    if n == 0:
        raise DataError("empty label sequences")
    cats = sorted(set(labels_a) | set(labels_b))
    if len(cats) < 2:
        raise DataError("need at least 2 categories overall")
    index = {c: i for i, c in enumerate(cats)}
    m = np.zeros((len(cats), len(cats)), dtype=np.float64)
    for x, y in zip(labels_a, labels_b):
        m[index[x], index[y]] += 1
    p_o = float(np.trace(m)) / n
    p_e = float(np.sum(m.sum(axis=1) * m.sum(axis=0))) / (n * n)
    if p_e >= 1.0:
        raise DataError("degenerate marginals: expected agreement is 1")
    kappa = (p_o - p_e) / (1.0 - p_e)
    return KappaResult(kappa=kappa, observed_agreement=p_o, expected_agreement=p_e, n=n)


def remove_outliers(
    corpus: Corpus,
    minority_sets: Mapping[str, Iterable[str]],
    policy: str = "min-dimensions",
    min_dimensions: int = 2,
    confirmed: Iterable[str] | None = None,
) -> tuple[Corpus, RemovalReport]:
    """Drop users flagged as minority according to the policy.

    Policies: 'min-dimensions' removes users in the minority set for at least
    min_dimensions dimensions; 'any' for at least one; 'confirmed-list'
    removes exactly the given expert-confirmed ids.
    """
    by_user: dict[str, list[str]] = {}
    for dim in sorted(minority_sets):
        for uid in minority_sets[dim]:
            by_user.setdefault(uid, []).append(dim)

    if policy == "min-dimensions":
        removed = {u for u, dims in by_user.items() if len(dims) >= min_dimensions}
    elif policy == "any":
        removed = set(by_user)
    elif policy == "confirmed-list":
        if confirmed is None:
            raise DataError("policy 'confirmed-list' needs a confirmed id list")
        removed = set(confirmed)
    else:
        raise DataError(f"unknown removal policy {policy!r}")

    report = RemovalReport(
        policy=policy,
        removed=[
            {"user_id": u, "dimensions": sorted(by_user.get(u, []))}
            for u in sorted(removed)
        ],
    )
    kept = [u for u in corpus.user_ids() if u not in removed]
    return subset(corpus, kept), report
