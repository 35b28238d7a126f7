"""Per-dimension user vectors, sparsity detection, and SVD fusion.

A user's vector for one dimension is the plain average of the embedding rows
of the tokens shared between their token set G and that dimension's
vocabulary; the fused vector concatenates the per-dimension vectors in a fixed
order and projects them through a truncated SVD basis fitted on training users
only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .embedding import DimensionModel
from .errors import DataError
from .ngram import TokenSetG


@dataclass
class UserDimVector:
    user_id: str
    dimension: str
    vector: np.ndarray  # float64 [k]
    overlap_count: int
    sparse: bool


@dataclass
class SvdBasis:
    projection: np.ndarray  # [sum of dim widths, r], columns orthonormal
    singular_values: np.ndarray  # [r], non-increasing
    fitted_on: int  # number of rows the basis was fitted on
    dimension_order: tuple[str, ...] = ()


@dataclass
class FusedUserVector:
    user_id: str
    vector: np.ndarray  # [r]
    source_dims: tuple[str, ...] = ()


def user_dim_vector(
    g: TokenSetG, model: DimensionModel, tau: int = 1
) -> UserDimVector:
    """Average the model rows over G intersected with the model vocabulary.

    Empty intersection yields the zero vector; overlap below tau marks the
    representation sparse. Summation runs in sorted token order so results are
    reproducible bit-for-bit.
    """
    shared = sorted(t for t in g.members if t in model.vocab)
    vec = np.zeros(model.dim, dtype=np.float64)
    for tok in shared:
        vec += model.vectors[model.vocab[tok]]
    if shared:
        vec /= len(shared)
    return UserDimVector(
        user_id=g.user_id,
        dimension=model.dimension,
        vector=vec,
        overlap_count=len(shared),
        sparse=len(shared) < tau,
    )


def detect_sparse(
    vectors: Sequence[UserDimVector],
) -> list[tuple[str, str]]:
    """All (user_id, dimension) pairs flagged sparse, in deterministic order."""
    return sorted((v.user_id, v.dimension) for v in vectors if v.sparse)


def fit_svd(matrix: np.ndarray, target_dim: int) -> SvdBasis:
    """Truncated SVD of the uncentered matrix, keeping r = min(target_dim,
    numerical rank) right singular vectors.

    Column signs are fixed by making each column's largest-magnitude entry
    positive, so the basis is fully deterministic.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.size == 0:
        raise DataError("cannot fit SVD on an empty matrix")
    if not np.all(np.isfinite(matrix)):
        raise DataError("non-finite entries in SVD input")
    if target_dim < 1:
        raise DataError(f"target_dim must be >= 1, got {target_dim}")
    _, s, vt = np.linalg.svd(matrix, full_matrices=False)
    tol = max(matrix.shape) * np.finfo(np.float64).eps * (s[0] if len(s) else 0.0)
    rank = int(np.sum(s > tol))
    r = max(1, min(target_dim, rank))
    v = vt[:r].T.copy()
    for j in range(r):
        pivot = np.argmax(np.abs(v[:, j]))
        if v[pivot, j] < 0:
            v[:, j] = -v[:, j]
    return SvdBasis(projection=v, singular_values=s[:r].copy(), fitted_on=matrix.shape[0])


def fuse(
    user_vectors: Mapping[str, UserDimVector] | Mapping[str, np.ndarray],
    basis: SvdBasis,
) -> FusedUserVector:
    """Concatenate one user's per-dimension vectors in the basis's dimension
    order and project them through the basis."""
    order = basis.dimension_order or tuple(sorted(user_vectors))
    parts = []
    user_id = ""
    for dim in order:
        if dim not in user_vectors:
            raise DataError(f"user vector missing for dimension {dim!r}")
        uv = user_vectors[dim]
        if isinstance(uv, UserDimVector):
            user_id = uv.user_id
            parts.append(uv.vector)
        else:
            parts.append(np.asarray(uv, dtype=np.float64))
    stacked = np.concatenate(parts)
    if stacked.shape[0] != basis.projection.shape[0]:
        raise DataError(
            f"concatenated width {stacked.shape[0]} does not match basis input "
            f"width {basis.projection.shape[0]}"
        )
    return FusedUserVector(
        user_id=user_id, vector=stacked @ basis.projection, source_dims=order
    )


def concat_matrix(
    vectors: Mapping[str, Mapping[str, UserDimVector]],
    user_ids: Sequence[str],
    dims: Sequence[str] | None = None,
) -> tuple[np.ndarray, tuple[str, ...]]:
    """Users-by-(sum of widths) matrix in lexicographic dimension order.

    ``vectors`` maps dimension -> user_id -> UserDimVector.
    """
    order = tuple(sorted(dims if dims is not None else vectors))
    rows = []
    for uid in user_ids:
        parts = []
        for dim in order:
            try:
                parts.append(vectors[dim][uid].vector)
            except KeyError:
                raise DataError(f"user {uid!r} has no vector for dimension {dim!r}")
        rows.append(np.concatenate(parts))
    return np.vstack(rows), order


def fit_basis(
    vectors: Mapping[str, Mapping[str, UserDimVector]],
    train_ids: Sequence[str],
    target_dim: int,
    dims: Sequence[str] | None = None,
) -> SvdBasis:
    """Fit a fusion basis on training users only (never refit downstream)."""
    matrix, order = concat_matrix(vectors, train_ids, dims)
    basis = fit_svd(matrix, target_dim)
    basis.dimension_order = order
    return basis


def build_user_vectors(
    corpus,
    models: Mapping[str, DimensionModel],
    tau: int = 1,
    ngram_min_count: int = 2,
    npmi_threshold: float = 0.3,
) -> dict[str, dict[str, UserDimVector]]:
    """Per-dimension vectors for every user in the corpus: G built from the
    user's own n-gram statistics, then averaged against each dimension model.
    Returns dimension -> user_id -> UserDimVector."""
    from .ngram import build_token_set

    out: dict[str, dict[str, UserDimVector]] = {d: {} for d in sorted(models)}
    for uid in corpus.user_ids():
        g = build_token_set(
            corpus.users[uid], min_count=ngram_min_count, npmi_threshold=npmi_threshold
        )
        for dim in sorted(models):
            out[dim][uid] = user_dim_vector(g, models[dim], tau=tau)
    return out


def project_2d(matrix: np.ndarray) -> np.ndarray:
    """Two-dimensional SVD projection of row vectors, for plotting exports."""
    basis = fit_svd(matrix, 2)
    coords = np.asarray(matrix, dtype=np.float64) @ basis.projection
    if coords.shape[1] < 2:  # rank-1 input: pad a zero second coordinate
        coords = np.hstack([coords, np.zeros((coords.shape[0], 1))])
    return coords
