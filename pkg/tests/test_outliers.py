import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dimtext.corpus import Corpus, Document, POSITIVE
from dimtext.errors import DataError
from dimtext.outliers import (
    NOISE,
    ClusterAssignment,
    cohen_kappa,
    core_distances,
    hdbscan,
    hdbscan_labels,
    majority_centroid,
    mann_whitney_u,
    minimum_spanning_tree,
    mutual_reachability,
    remove_outliers,
    scalarize_for_test,
    split_majority_minority,
)


# Generic 8-point fixture with distinct pairwise distances.
EIGHT_POINTS = np.array(
    [
        [0.0, 0.0],
        [1.1, 0.2],
        [0.3, 1.7],
        [2.9, 0.8],
        [4.1, 3.0],
        [5.2, 0.6],
        [0.9, 4.3],
        [3.4, 4.8],
    ]
)


def _brute_mutual_reachability(points, min_samples):
    """Independent O(n^2) construction from definitions."""
    n = len(points)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            d[i, j] = math.dist(points[i], points[j])
    core = np.array([sorted(d[i])[min_samples - 1] for i in range(n)])
    mr = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                mr[i, j] = max(core[i], core[j], d[i, j])
    return mr


def _kruskal_mst(weights):
    """Independent MST via Kruskal's algorithm with union-find."""
    n = weights.shape[0]
    edges = sorted(
        ((weights[i, j], i, j) for i in range(n) for j in range(i + 1, n))
    )
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    out = []
    for w, i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            out.append((i, j, w))
    return out


class TestHdbscanPipeline:
    def test_mutual_reachability_matches_brute_force(self):
        got = mutual_reachability(EIGHT_POINTS, min_samples=3)
        want = _brute_mutual_reachability(EIGHT_POINTS, 3)
        assert np.abs(got - want).max() <= 1e-12

    def test_core_distances_definition(self):
        got = core_distances(EIGHT_POINTS, min_samples=3)
        d = np.sqrt(((EIGHT_POINTS[:, None] - EIGHT_POINTS[None]) ** 2).sum(-1))
        for i in range(len(EIGHT_POINTS)):
            assert got[i] == pytest.approx(sorted(d[i])[2], abs=1e-12)

    def test_mst_matches_kruskal_edge_for_edge(self):
        mr = mutual_reachability(EIGHT_POINTS, min_samples=3)
        got = {(i, j, round(w, 10)) for i, j, w in minimum_spanning_tree(mr)}
        want = {(i, j, round(w, 10)) for i, j, w in _kruskal_mst(mr)}
        assert got == want
        assert len(got) == len(EIGHT_POINTS) - 1

    def test_two_separated_blobs(self):
        rng = np.random.default_rng(3)
        a = rng.normal(0.0, 0.1, size=(50, 2))
        b = rng.normal(0.0, 0.1, size=(50, 2)) + 10.0
        labels = hdbscan_labels(np.vstack([a, b]), min_cluster_size=10, min_samples=5)
        assert sorted(set(labels.tolist())) == [0, 1]
        assert (labels == NOISE).sum() == 0
        assert len(set(labels[:50])) == 1 and len(set(labels[50:])) == 1

    def test_blob_plus_scattered_points(self):
        rng = np.random.default_rng(7)
        blob = rng.normal(0.0, 0.1, size=(50, 2))
        scattered = rng.uniform(5, 50, size=(5, 2)) * rng.choice([-1, 1], size=(5, 2))
        labels = hdbscan_labels(
            np.vstack([blob, scattered]),
            min_cluster_size=10,
            min_samples=5,
            allow_single_cluster=True,
        )
        majority = np.argmax(np.bincount(labels[labels != NOISE] + 1))
        for lab in labels[50:]:
            assert lab == NOISE or lab != majority - 1

    def test_permutation_invariance(self):
        rng = np.random.default_rng(11)
        a = rng.normal(0.0, 0.2, size=(30, 3))
        b = rng.normal(0.0, 0.2, size=(30, 3)) + 5.0
        x = np.vstack([a, b])
        base = hdbscan_labels(x, min_cluster_size=8, min_samples=4)
        perm = rng.permutation(len(x))
        permuted = hdbscan_labels(x[perm], min_cluster_size=8, min_samples=4)
        # same partition up to relabeling
        mapping = {}
        for orig, new in zip(base[perm], permuted):
            mapping.setdefault(orig, new)
            assert mapping[orig] == new
        assert len(set(mapping.values())) == len(mapping)

    def test_too_few_points(self):
        with pytest.raises(DataError):
            hdbscan_labels(np.zeros((3, 2)), min_cluster_size=2, min_samples=5)

    def test_user_id_interface_and_auto_mcs(self):
        rng = np.random.default_rng(5)
        vectors = {f"u{i:03d}": rng.normal(size=2) for i in range(40)}
        assignments = hdbscan(vectors, min_samples=4, allow_single_cluster=True)
        assert [a.user_id for a in assignments] == sorted(vectors)


class TestSplitMajorityMinority:
    def _assign(self, sizes, noise=0):
        out = []
        uid = 0
        for cid, size in enumerate(sizes):
            for _ in range(size):
                out.append(ClusterAssignment(f"u{uid:04d}", cid))
                uid += 1
        for _ in range(noise):
            out.append(ClusterAssignment(f"u{uid:04d}", NOISE))
            uid += 1
        return out

    def test_majority_versus_minority_sizes(self):
        majority, minority = split_majority_minority(self._assign([400, 99]))
        assert len(majority) == 400 and len(minority) == 99

    def test_single_cluster_empty_minority(self):
        majority, minority = split_majority_minority(self._assign([25]))
        assert len(majority) == 25 and minority == set()

    def test_tie_goes_to_lower_cluster_id(self):
        majority, _ = split_majority_minority(self._assign([5, 5]))
        assert majority == {f"u{i:04d}" for i in range(5)}

    def test_noise_joins_minority(self):
        _, minority = split_majority_minority(self._assign([10, 3], noise=2))
        assert len(minority) == 5

    def test_all_noise_is_an_error(self):
        with pytest.raises(DataError):
            split_majority_minority(self._assign([], noise=4))


def _exact_u(a, b):
    """Exhaustive pair counting with half credit for ties."""
    u = 0.0
    for x in a:
        for y in b:
            u += 1.0 if x > y else (0.5 if x == y else 0.0)
    return u


class TestMannWhitney:
    def test_identical_samples_null_case(self):
        res = mann_whitney_u([1, 2, 3], [1, 2, 3])
        assert res.u == pytest.approx(4.5)
        assert res.z == pytest.approx(0.0, abs=1e-12)
        assert res.p == pytest.approx(1.0)

    def test_fully_separated(self):
        res = mann_whitney_u([1, 2], [3, 4])
        assert res.u == 0.0
        res = mann_whitney_u([3, 4], [1, 2])
        assert res.u == 4.0

    def test_matches_exhaustive_enumeration_on_seeded_grid(self):
        rng = np.random.default_rng(99)
        for _ in range(60):
            n1 = int(rng.integers(1, 9))
            n2 = int(rng.integers(1, 9))
            a = rng.integers(0, 6, size=n1).astype(float)
            b = rng.integers(0, 6, size=n2).astype(float)
            pooled = np.concatenate([a, b])
            if np.all(pooled == pooled[0]):
                continue
            res = mann_whitney_u(a, b)
            assert res.u == pytest.approx(_exact_u(a, b), abs=1e-12)
            assert 0.0 <= res.u <= n1 * n2
            assert 0.0 < res.p <= 1.0
            assert res.effect_size == pytest.approx(abs(res.z) / math.sqrt(n1 + n2))

    @given(
        st.lists(st.integers(0, 9), min_size=2, max_size=10),
        st.lists(st.integers(0, 9), min_size=2, max_size=10),
    )
    @settings(max_examples=60)
    def test_swap_symmetry(self, a, b):
        pooled = a + b
        if all(v == pooled[0] for v in pooled):
            return
        r1 = mann_whitney_u(a, b)
        r2 = mann_whitney_u(b, a)
        assert r1.u + r2.u == pytest.approx(len(a) * len(b))
        assert r1.z == pytest.approx(-r2.z, abs=1e-12)
        assert r1.p == pytest.approx(r2.p, abs=1e-12)

    def test_zero_variance_is_an_error(self):
        with pytest.raises(DataError, match="variance"):
            mann_whitney_u([2.0, 2.0], [2.0, 2.0, 2.0])

    def test_empty_sample_is_an_error(self):
        with pytest.raises(DataError):
            mann_whitney_u([], [1.0])

    def test_effect_size_formula_at_survey_scale(self):
        # r = |z| / sqrt(n) exactly, at realistic sample sizes
        rng = np.random.default_rng(1)
        a = rng.normal(1.0, 0.3, size=439)
        b = rng.normal(0.0, 0.3, size=99)
        res = mann_whitney_u(a.tolist(), b.tolist())
        assert res.effect_size == pytest.approx(abs(res.z) / math.sqrt(538), abs=1e-12)


class TestScalarize:
    def test_user_at_centroid_scores_one(self):
        c = np.array([1.0, 2.0])
        out = scalarize_for_test({"u": c.copy()}, c)
        assert out["u"] == pytest.approx(1.0)

    def test_orthogonal_scores_zero(self):
        out = scalarize_for_test({"u": np.array([0.0, 5.0])}, np.array([3.0, 0.0]))
        assert out["u"] == pytest.approx(0.0)

    def test_matches_cosine_oracle(self):
        from dimtext.similarity import cosine

        rng = np.random.default_rng(2)
        vecs = {f"u{i}": rng.normal(size=4) for i in range(3)}
        c = rng.normal(size=4)
        out = scalarize_for_test(vecs, c)
        for u, v in vecs.items():
            assert out[u] == pytest.approx(cosine(v, c), abs=1e-12)

    def test_zero_centroid_rejected(self):
        with pytest.raises(DataError):
            scalarize_for_test({"u": np.ones(2)}, np.zeros(2))

    def test_majority_centroid(self):
        vecs = {"a": np.array([1.0, 0.0]), "b": np.array([3.0, 2.0]), "c": np.ones(2)}
        assert majority_centroid(vecs, ["a", "b"]) == pytest.approx([2.0, 1.0])


class TestCohenKappa:
    def test_perfect_agreement(self):
        res = cohen_kappa(["x", "y", "x"], ["x", "y", "x"])
        assert res.kappa == pytest.approx(1.0)

    def test_chance_level_agreement(self):
        # independent marginals: agreement exactly at expectation
        a = ["p", "p", "n", "n"]
        b = ["p", "n", "p", "n"]
        res = cohen_kappa(a, b)
        assert res.kappa == pytest.approx(0.0, abs=1e-12)

    def test_hand_computed_confusion(self):
        # [[20, 5], [10, 15]] -> (0.7 - 0.5) / 0.5 = 0.4
        a = ["A"] * 25 + ["B"] * 25
        b = ["A"] * 20 + ["B"] * 5 + ["A"] * 10 + ["B"] * 15
        res = cohen_kappa(a, b)
        assert res.kappa == pytest.approx(0.4, abs=1e-12)
        assert res.observed_agreement == pytest.approx(0.7)
        assert res.expected_agreement == pytest.approx(0.5)

    def test_relabeling_invariance(self):
        a = ["A"] * 25 + ["B"] * 25
        b = ["A"] * 20 + ["B"] * 5 + ["A"] * 10 + ["B"] * 15
        swap = {"A": "Z", "B": "Q"}
        res1 = cohen_kappa(a, b)
        res2 = cohen_kappa([swap[x] for x in a], [swap[x] for x in b])
        assert res1.kappa == pytest.approx(res2.kappa, abs=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(DataError):
            cohen_kappa(["a"], ["a", "b"])


def _corpus(uids):
    c = Corpus()
    for u in uids:
        c.add(Document(u, u, "hello world", POSITIVE))
    return c


class TestRemoveOutliers:
    def test_two_dimension_rule(self):
        corpus = _corpus(["u1", "u2", "u3"])
        minority = {"R": {"u1"}, "I": {"u2"}, "H": {"u1"}}
        clean, report = remove_outliers(corpus, minority, min_dimensions=2)
        assert report.removed_ids() == ["u1"]
        assert clean.user_ids() == ["u2", "u3"]
        assert report.removed[0]["dimensions"] == ["H", "R"]

    def test_single_dimension_kept_by_default(self):
        corpus = _corpus(["u1", "u2"])
        clean, report = remove_outliers(corpus, {"I": {"u1"}}, min_dimensions=2)
        assert report.removed == []
        assert len(clean) == 2

    def test_any_policy(self):
        corpus = _corpus(["u1", "u2"])
        _, report = remove_outliers(corpus, {"I": {"u1"}}, policy="any")
        assert report.removed_ids() == ["u1"]

    def test_confirmed_list_policy(self):
        corpus = _corpus(["u1", "u2", "u3"])
        clean, report = remove_outliers(
            corpus, {}, policy="confirmed-list", confirmed=["u3"]
        )
        assert report.removed_ids() == ["u3"]
        assert clean.user_ids() == ["u1", "u2"]

    def test_planted_multidimension_outliers_recovered(self):
        # 538 users; planted outliers sit far away in every dimension, so the
        # minority sets agree on exactly the planted set
        rng = np.random.default_rng(0)
        n, n_out = 538, 49
        uids = [f"u{i:04d}" for i in range(n)]
        planted = set(rng.choice(uids, size=n_out, replace=False).tolist())
        minority_sets = {}
        for dim in ("R", "I", "H"):
            vectors = {}
            for u in uids:
                center = 8.0 if u in planted else 0.0
                vectors[u] = rng.normal(center, 0.3, size=3)
            assignments = hdbscan(vectors, min_cluster_size=15, min_samples=5, dimension=dim)
            _, minority = split_majority_minority(assignments)
            minority_sets[dim] = minority
        corpus = _corpus(uids)
        clean, report = remove_outliers(corpus, minority_sets, min_dimensions=2)
        assert set(report.removed_ids()) == planted
        assert len(clean) == n - n_out

    def test_unknown_policy(self):
        with pytest.raises(DataError):
            remove_outliers(_corpus(["u"]), {}, policy="whatever")
