import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dimtext.errors import DataError
from dimtext.similarity import cosine, similarity_matrix


class TestCosine:
    def test_identical(self):
        assert cosine([1.0, 2.0], [1.0, 2.0]) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine([1.0, 0.0], [0.0, 3.0]) == 0.0

    def test_hand_value(self):
        # 32 / (sqrt(14) * sqrt(77))
        assert cosine([1, 2, 3], [4, 5, 6]) == pytest.approx(
            32.0 / math.sqrt(14 * 77), abs=1e-12
        )

    def test_zero_vector_convention(self):
        assert cosine([0.0, 0.0], [1.0, 2.0]) == 0.0

    @given(
        st.floats(min_value=1e-3, max_value=1e3),
        st.lists(st.floats(min_value=-10, max_value=10), min_size=2, max_size=6),
    )
    def test_scale_invariance(self, alpha, vec):
        other = [1.0] * len(vec)
        base = cosine(vec, other)
        assert cosine([alpha * v for v in vec], other) == pytest.approx(base, abs=1e-9)


class TestSimilarityMatrix:
    def test_self_similarity_symmetric_unit_diagonal(self):
        rng = np.random.default_rng(0)
        group = {f"u{i}": rng.normal(size=4) for i in range(6)}
        sim = similarity_matrix(group, group, dimension="d")
        assert np.abs(sim.values - sim.values.T).max() <= 1e-12
        assert np.abs(np.diag(sim.values) - 1.0).max() <= 1e-12
        assert sim.row_ids == sorted(group)

    def test_zero_vectors_give_zero_rows(self):
        group = {"a": np.zeros(3), "b": np.array([1.0, 0.0, 0.0])}
        sim = similarity_matrix(group, group)
        assert sim.values[0].tolist() == [0.0, 0.0]
        assert sim.values[:, 0].tolist() == [0.0, 0.0]

    def test_matches_elementwise_oracle(self):
        rng = np.random.default_rng(1)
        a = {f"a{i}": rng.normal(size=5) for i in range(3)}
        b = {f"b{i}": rng.normal(size=5) for i in range(2)}
        sim = similarity_matrix(a, b)
        for i, ra in enumerate(sim.row_ids):
            for j, cb in enumerate(sim.col_ids):
                assert sim.values[i, j] == pytest.approx(cosine(a[ra], b[cb]), abs=1e-12)

    def test_empty_group_rejected(self):
        with pytest.raises(DataError):
            similarity_matrix({}, {"a": np.ones(2)})
