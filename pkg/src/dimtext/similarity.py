"""Cosine similarity and pairwise user similarity matrices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DataError


@dataclass
class SimilarityMatrix:
    row_ids: list[str]
    col_ids: list[str]
    values: np.ndarray  # [rows, cols] in [-1, 1]
    dimension: str = ""


def cosine(a, b) -> float:
    """Cosine of two vectors; 0 by convention when either norm is zero, so
    sparse users read as dissimilar instead of NaN."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def similarity_matrix(
    group_a: Mapping[str, np.ndarray],
    group_b: Mapping[str, np.ndarray],
    dimension: str = "",
) -> SimilarityMatrix:
    """Full pairwise cosine matrix between two user groups.

    Ids are ordered lexicographically; zero vectors produce zero rows/columns.
    """
    row_ids = sorted(group_a)
    col_ids = sorted(group_b)
    if not row_ids or not col_ids:
        raise DataError("similarity_matrix needs non-empty groups")
    a = np.vstack([np.asarray(group_a[u], dtype=np.float64) for u in row_ids])
    b = np.vstack([np.asarray(group_b[u], dtype=np.float64) for u in col_ids])
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    na[na == 0.0] = np.inf  # zero vectors divide to 0
    nb[nb == 0.0] = np.inf
    values = (a / na[:, None]) @ (b / nb[:, None]).T
    np.clip(values, -1.0, 1.0, out=values)
    return SimilarityMatrix(
        row_ids=row_ids, col_ids=col_ids, values=values, dimension=dimension
    )
