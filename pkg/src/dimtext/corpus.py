"""Corpus ingestion: JSONL document streams, normalization, per-user aggregation."""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import DataError

POSITIVE = "positive"
NEGATIVE = "negative"
UNLABELED = "unlabeled"
LABELS = (POSITIVE, NEGATIVE, UNLABELED)

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)


def normalize(text: str) -> list[str]:
    """Normalize raw text into a token sequence.

    Rules (fixed for reproducibility): lowercase; URLs and @-mentions removed;
    hashtags kept with '#' stripped; punctuation stripped from token edges
    (interior punctuation such as hyphens is kept); tokens split on Unicode
    whitespace; empty tokens dropped. Idempotent on its own joined output.
    """
    text = _URL_RE.sub(" ", text.lower())
    tokens = []
    for raw in text.split():
        if raw.startswith("@"):
            continue
        tok = raw.lstrip("#")
        tok = _strip_edge_punct(tok)
        if tok:
            tokens.append(tok)
    return tokens


def _strip_edge_punct(tok: str) -> str:
    start, end = 0, len(tok)
    while start < end and _is_punct(tok[start]):
        start += 1
    while end > start and _is_punct(tok[end - 1]):
        end -= 1
    return tok[start:end]


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith(("P", "S"))


@dataclass
class Document:
    doc_id: str
    user_id: str
    text: str
    label: str = UNLABELED


@dataclass
class UserDoc:
    """All of one user's documents, normalized and concatenated in ingestion order.

    ``doc_offsets[i]`` is the index in ``tokens`` where document i starts, so
    per-document token runs can be recovered from the flat stream.
    """

    user_id: str
    label: str
    tokens: list[str] = field(default_factory=list)
    doc_count: int = 0
    doc_offsets: list[int] = field(default_factory=list)

    def segments(self) -> list[list[str]]:
        """Per-document token runs; the whole stream if offsets are absent."""
        if not self.doc_offsets:
            return [self.tokens] if self.tokens else []
        bounds = self.doc_offsets + [len(self.tokens)]
        return [self.tokens[a:b] for a, b in zip(bounds, bounds[1:])]


@dataclass
class Corpus:
    users: dict[str, UserDoc] = field(default_factory=dict)
    class_counts: dict[str, int] = field(default_factory=dict)
    malformed_count: int = 0

    def add(self, doc: Document) -> None:
        ud = self.users.get(doc.user_id)
        if ud is None:
            ud = UserDoc(user_id=doc.user_id, label=doc.label)
            self.users[doc.user_id] = ud
            self.class_counts[doc.label] = self.class_counts.get(doc.label, 0) + 1
        ud.doc_offsets.append(len(ud.tokens))
        ud.tokens.extend(normalize(doc.text))
        ud.doc_count += 1

    def user_ids(self) -> list[str]:
        return sorted(self.users)

    def labels(self) -> dict[str, str]:
        return {uid: self.users[uid].label for uid in self.users}

    def __len__(self) -> int:
        return len(self.users)


def ingest(path: str | Path, label: str, error_rate_ceiling: float = 0.01) -> Corpus:
    """Read a JSONL file of {user_id, text, [doc_id], [timestamp]} records.

    Malformed lines (bad JSON, missing/empty user_id or text) are counted and
    tolerated up to ``error_rate_ceiling`` of all non-blank lines; beyond that
    the file is considered corrupt and a DataError is raised.
    """
    if label not in LABELS:
        raise DataError(f"unknown label {label!r}; expected one of {LABELS}")
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    corpus = Corpus()
    total = 0
    malformed = 0
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        total += 1
        try:
            rec = json.loads(line)
            user_id = str(rec["user_id"])
            text = rec["text"]
            if not isinstance(text, str) or not user_id or not text.strip():
                raise ValueError("empty user_id or text")
        except (ValueError, KeyError, TypeError):
            malformed += 1
            continue
        doc_id = str(rec.get("doc_id", f"{path.name}:{i}"))
        corpus.add(Document(doc_id=doc_id, user_id=user_id, text=text, label=label))

    if total == 0:
        raise DataError(f"no records in {path}")
    if total > 0 and malformed / total > error_rate_ceiling:
        raise DataError(
            f"{malformed}/{total} malformed lines in {path} exceeds "
            f"error-rate ceiling {error_rate_ceiling:.2%}"
        )
    corpus.malformed_count = malformed
    return corpus


def merge(corpora: Iterable[Corpus]) -> Corpus:
    """Combine per-class corpora into one. User ids must not collide."""
    out = Corpus()
    for c in corpora:
        for uid, ud in c.users.items():
            if uid in out.users:
                raise DataError(f"duplicate user_id {uid!r} across corpora")
            out.users[uid] = ud
            out.class_counts[ud.label] = out.class_counts.get(ud.label, 0) + 1
        out.malformed_count += c.malformed_count
    return out


def subset(corpus: Corpus, user_ids: Iterable[str]) -> Corpus:
    """New corpus restricted to the given users (shared UserDoc objects)."""
    out = Corpus(malformed_count=corpus.malformed_count)
    for uid in user_ids:
        ud = corpus.users[uid]
        out.users[uid] = ud
        out.class_counts[ud.label] = out.class_counts.get(ud.label, 0) + 1
    return out


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    payload = {
        "users": {
            uid: {
                "label": ud.label,
                "doc_count": ud.doc_count,
                "tokens": ud.tokens,
                "doc_offsets": ud.doc_offsets,
            }
            for uid, ud in sorted(corpus.users.items())
        },
        "class_counts": dict(sorted(corpus.class_counts.items())),
        "malformed_count": corpus.malformed_count,
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")


def load_corpus(path: str | Path) -> Corpus:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    corpus = Corpus(malformed_count=payload.get("malformed_count", 0))
    for uid, rec in payload["users"].items():
        corpus.users[uid] = UserDoc(
            user_id=uid,
            label=rec["label"],
            tokens=list(rec["tokens"]),
            doc_count=rec["doc_count"],
            doc_offsets=list(rec.get("doc_offsets", [])),
        )
    corpus.class_counts = dict(payload["class_counts"])
    return corpus
