"""Topical imputation of sparse per-dimension user vectors.

A sparse user's vector for a dimension is replaced by the vector of the
same-class user whose topic set has maximal Jaccard overlap with theirs.
Donors are never drawn across class labels, non-sparse dimensions are left
untouched, and every replacement is recorded for audit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .corpus import Corpus
from .errors import DataError
from .representation import UserDimVector
from .topics import TopicModel, doc_topic_row, user_topics


@dataclass
class ImputationRecord:
    user_id: str
    dimension: str
    donor_id: str
    jaccard: float
    fallback: bool = False  # donor chosen by topic-mass dot product


def jaccard(a: set, b: set) -> float:
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


def impute(
    vectors: Mapping[str, Mapping[str, UserDimVector]],
    corpus: Corpus,
    topic_models: Mapping[str, TopicModel],
    top_m: int = 10,
) -> tuple[dict[str, dict[str, UserDimVector]], list[ImputationRecord]]:
    """Replace every sparse (user, dimension) vector with its donor's vector.

    ``vectors`` maps dimension -> user_id -> UserDimVector; ``topic_models``
    maps class label -> fitted TopicModel for that class. Returns a new
    vectors mapping (sparse entries replaced, everything else the same
    objects) plus the audit records.

    Ties on Jaccard go to the lexicographically smaller donor id. A sparse
    user with an empty topic set falls back to the donor whose doc-topic row
    has the largest dot product with theirs; the record flags the fallback.
    """
    topic_cache: dict[str, set[int]] = {}
    row_cache: dict[str, np.ndarray] = {}

    def topics_of(uid: str) -> set[int]:
        if uid not in topic_cache:
            ud = corpus.users[uid]
            model = topic_models.get(ud.label)
            if model is None:
                raise DataError(f"no topic model for class {ud.label!r}")
            topic_cache[uid] = user_topics(model, ud, top_m=top_m)
        return topic_cache[uid]

    def row_of(uid: str) -> np.ndarray:
        if uid not in row_cache:
            ud = corpus.users[uid]
            row_cache[uid] = doc_topic_row(topic_models[ud.label], ud)
        return row_cache[uid]

    out: dict[str, dict[str, UserDimVector]] = {}
    records: list[ImputationRecord] = []
    for dim in sorted(vectors):
        per_user = vectors[dim]
        out[dim] = dict(per_user)
        donors_by_class: dict[str, list[str]] = {}
        for uid in sorted(per_user):
            if not per_user[uid].sparse and uid in corpus.users:
                donors_by_class.setdefault(corpus.users[uid].label, []).append(uid)

        for uid in sorted(per_user):
            uv = per_user[uid]
            if not uv.sparse:
                continue
            label = corpus.users[uid].label
            donors = donors_by_class.get(label, [])
            if not donors:
                raise DataError(
                    f"no dense same-class donor for user {uid!r} in dimension {dim!r}"
                )
            gamma_u = topics_of(uid)
            fallback = not gamma_u
            best, best_score = None, -np.inf
            for donor in donors:  # sorted, so strict > keeps the smaller id on ties
                score = (
                    float(row_of(donor) @ row_of(uid))
                    if fallback
                    else jaccard(topics_of(donor), gamma_u)
                )
                if score > best_score:
                    best, best_score = donor, score
            donor_vec = per_user[best]
            out[dim][uid] = UserDimVector(
                user_id=uid,
                dimension=dim,
                vector=donor_vec.vector.copy(),
                overlap_count=donor_vec.overlap_count,
                sparse=False,
            )
            records.append(
                ImputationRecord(
                    user_id=uid,
                    dimension=dim,
                    donor_id=best,
                    jaccard=0.0 if fallback else best_score,
                    fallback=fallback,
                )
            )
    return out, records
