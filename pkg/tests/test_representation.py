import numpy as np
import pytest
from hypothesis import given, strategies as st

from dimtext.embedding import DimensionModel
from dimtext.errors import DataError
from dimtext.ngram import TokenSetG
from dimtext.representation import (
    SvdBasis,
    concat_matrix,
    detect_sparse,
    fit_basis,
    fit_svd,
    fuse,
    project_2d,
    user_dim_vector,
)


def _model(rows: dict[str, list[float]], dimension="d") -> DimensionModel:
    vocab = {t: i for i, t in enumerate(sorted(rows))}
    vectors = np.array([rows[t] for t in sorted(rows)], dtype=np.float32)
    return DimensionModel(dimension=dimension, vocab=vocab, vectors=vectors)


class TestUserDimVector:
    def test_single_member_mean_is_the_row(self):
        m = _model({"w1": [1.0, 2.0, 3.0], "w2": [9.0, 9.0, 9.0]})
        g = TokenSetG("u", {"w1", "oov"})
        uv = user_dim_vector(g, m, tau=1)
        assert uv.vector == pytest.approx([1.0, 2.0, 3.0])
        assert uv.overlap_count == 1
        assert not uv.sparse

    def test_empty_intersection_zero_vector(self):
        m = _model({"w1": [1.0, 2.0]})
        uv = user_dim_vector(TokenSetG("u", {"zzz"}), m, tau=1)
        assert np.all(uv.vector == 0.0)
        assert uv.overlap_count == 0
        assert uv.sparse

    def test_two_member_average(self):
        # hand arithmetic: mean([1,2],[3,6]) = [2,4]
        m = _model({"a": [1.0, 2.0], "b": [3.0, 6.0]})
        uv = user_dim_vector(TokenSetG("u", {"a", "b"}), m, tau=1)
        assert uv.vector == pytest.approx([2.0, 4.0], abs=1e-12)

    def test_average_not_sum(self):
        # tokens with identical rows: any number of them leaves the mean fixed
        m = _model({"a": [2.0, 4.0], "b": [2.0, 4.0], "c": [2.0, 4.0]})
        one = user_dim_vector(TokenSetG("u", {"a"}), m, tau=1).vector
        three = user_dim_vector(TokenSetG("u", {"a", "b", "c"}), m, tau=1).vector
        assert one == pytest.approx(three.tolist(), abs=1e-12)

    def test_tau_threshold(self):
        m = _model({f"w{i}": [float(i), 0.0] for i in range(4)})
        g = TokenSetG("u", {"w0", "w1", "w2", "w3"})
        assert not user_dim_vector(g, m, tau=4).sparse
        assert user_dim_vector(g, m, tau=5).sparse


class TestDetectSparse:
    def test_flags_in_order(self):
        m_a = _model({"x": [1.0]}, "a")
        m_b = _model({"x": [1.0]}, "b")
        flagged = user_dim_vector(TokenSetG("u2", {"zz"}), m_b, tau=1)
        dense = user_dim_vector(TokenSetG("u1", {"x"}), m_a, tau=1)
        other = user_dim_vector(TokenSetG("u1", {"zz"}), m_b, tau=1)
        assert detect_sparse([flagged, dense, other]) == [("u1", "b"), ("u2", "b")]

    def test_planted_disjoint_users_exactly_flagged(self):
        rng = np.random.default_rng(0)
        m = _model({f"w{i}": rng.normal(size=3).tolist() for i in range(50)})
        vectors = []
        planted = set()
        for u in range(30):
            uid = f"u{u:02d}"
            if u % 10 == 0:  # 10 percent-ish: vocabulary-disjoint users
                members = {f"x{u}a", f"x{u}b"}
                planted.add(uid)
            else:
                members = {f"w{(u * 7) % 50}", f"w{(u * 3) % 50}"}
            vectors.append(user_dim_vector(TokenSetG(uid, members), m, tau=1))
        assert {u for u, _ in detect_sparse(vectors)} == planted


class TestFitSvd:
    def test_rank_one_matrix(self):
        u = np.array([1.0, 2.0, 3.0])
        v = np.array([2.0, 0.0, 1.0, 1.0])
        basis = fit_svd(np.outer(u, v), target_dim=3)
        assert basis.projection.shape == (4, 1)
        assert len(basis.singular_values) == 1

    def test_best_rank_r_error_matches_full_decomposition_oracle(self):
        rng = np.random.default_rng(123)
        x = rng.normal(size=(10, 12))
        _, s_full, _ = np.linalg.svd(x, full_matrices=False)
        for r in (1, 3, 5):
            basis = fit_svd(x, target_dim=r)
            recon = x @ basis.projection @ basis.projection.T
            err = np.linalg.norm(x - recon)
            best = np.sqrt(np.sum(s_full[r:] ** 2))  # Eckart-Young optimum
            assert abs(err - best) <= 1e-8

    def test_identity_like(self):
        basis = fit_svd(np.eye(4), target_dim=4)
        assert basis.singular_values == pytest.approx([1.0] * 4)
        gram = basis.projection.T @ basis.projection
        assert np.abs(gram - np.eye(4)).max() <= 1e-10

    def test_orthonormal_columns(self):
        rng = np.random.default_rng(7)
        basis = fit_svd(rng.normal(size=(20, 9)), target_dim=5)
        gram = basis.projection.T @ basis.projection
        assert np.abs(gram - np.eye(5)).max() <= 1e-10

    def test_sign_convention_deterministic(self):
        rng = np.random.default_rng(9)
        x = rng.normal(size=(8, 6))
        b1 = fit_svd(x, 4)
        b2 = fit_svd(x.copy(), 4)
        assert np.array_equal(b1.projection, b2.projection)
        for j in range(b1.projection.shape[1]):
            col = b1.projection[:, j]
            assert col[np.argmax(np.abs(col))] > 0

    def test_rejects_non_finite(self):
        with pytest.raises(DataError):
            fit_svd(np.array([[1.0, np.nan]]), 1)


def _uv(uid, dim, vec):
    from dimtext.representation import UserDimVector

    return UserDimVector(uid, dim, np.asarray(vec, dtype=np.float64), 1, False)


class TestFuse:
    def test_identity_basis_returns_concatenation(self):
        basis = SvdBasis(
            projection=np.eye(4),
            singular_values=np.ones(4),
            fitted_on=4,
            dimension_order=("a", "b"),
        )
        fused = fuse({"a": _uv("u", "a", [1, 2]), "b": _uv("u", "b", [3, 4])}, basis)
        assert fused.vector == pytest.approx([1, 2, 3, 4])
        assert fused.source_dims == ("a", "b")

    def test_zero_in_zero_out(self):
        rng = np.random.default_rng(1)
        proj = fit_svd(rng.normal(size=(6, 4)), 2)
        proj.dimension_order = ("a", "b")
        fused = fuse({"a": _uv("u", "a", [0, 0]), "b": _uv("u", "b", [0, 0])}, proj)
        assert fused.vector == pytest.approx([0.0, 0.0], abs=0)

    def test_matches_hand_svd_on_3x4(self):
        vectors = {
            "a": {
                "u1": _uv("u1", "a", [1.0, 0.0]),
                "u2": _uv("u2", "a", [0.0, 1.0]),
                "u3": _uv("u3", "a", [1.0, 1.0]),
            },
            "b": {
                "u1": _uv("u1", "b", [2.0, 0.0]),
                "u2": _uv("u2", "b", [0.0, 2.0]),
                "u3": _uv("u3", "b", [1.0, 0.0]),
            },
        }
        ids = ["u1", "u2", "u3"]
        basis = fit_basis(vectors, ids, target_dim=2)
        matrix, order = concat_matrix(vectors, ids)
        assert order == ("a", "b")
        _, _, vt = np.linalg.svd(matrix, full_matrices=False)
        expect = matrix @ vt[:2].T  # up to column sign
        for i, uid in enumerate(ids):
            fused = fuse({d: vectors[d][uid] for d in order}, basis)
            assert np.abs(np.abs(fused.vector) - np.abs(expect[i])).max() < 1e-10

    def test_missing_dimension_rejected(self):
        basis = SvdBasis(np.eye(4), np.ones(4), 1, dimension_order=("a", "b"))
        with pytest.raises(DataError, match="missing"):
            fuse({"a": _uv("u", "a", [1, 2])}, basis)

    def test_width_mismatch_rejected(self):
        basis = SvdBasis(np.eye(4), np.ones(4), 1, dimension_order=("a", "b"))
        with pytest.raises(DataError, match="width"):
            fuse({"a": _uv("u", "a", [1]), "b": _uv("u", "b", [2])}, basis)

    @given(st.floats(min_value=-50, max_value=50, allow_nan=False))
    def test_linear_in_input(self, alpha):
        basis = SvdBasis(
            projection=fit_svd(np.arange(12.0).reshape(4, 3) + 1, 2).projection,
            singular_values=np.ones(2),
            fitted_on=4,
            dimension_order=("a",),
        )
        base = fuse({"a": _uv("u", "a", [1.0, -2.0, 0.5])}, basis).vector
        scaled = fuse({"a": _uv("u", "a", [alpha * 1.0, alpha * -2.0, alpha * 0.5])}, basis).vector
        assert scaled == pytest.approx((alpha * base).tolist(), abs=1e-9 * (1 + abs(alpha)))


class TestProject2d:
    def test_shape_and_rank1_padding(self):
        rng = np.random.default_rng(5)
        coords = project_2d(rng.normal(size=(10, 6)))
        assert coords.shape == (10, 2)
        rank1 = np.outer(np.arange(1.0, 5.0), [1.0, 2.0])
        coords = project_2d(rank1)
        assert coords.shape == (4, 2)
        assert coords[:, 1] == pytest.approx([0.0] * 4)
