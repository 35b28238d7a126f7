"""N-gram extraction, NPMI collocation scoring, and per-user token sets.

A user's token set G is the union of their unigrams, bigrams, and trigrams
under a constituent-exclusion rule: no retained gram may be a word-level
constituent (multiset of words contained in) a longer retained gram. The rule
exists so a phrase and its parts are never both averaged into one vector.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .corpus import Corpus, UserDoc
from .errors import DataError

JOIN = "_"


@dataclass
class NgramTable:
    counts: Counter = field(default_factory=Counter)
    n_range: tuple[int, ...] = (1, 2, 3)
    total_per_n: dict[int, int] = field(default_factory=dict)

    def count(self, gram: str) -> int:
        return self.counts.get(gram, 0)


@dataclass
class TokenSetG:
    user_id: str
    members: set[str] = field(default_factory=set)


def _count_ngrams(tokens: Sequence[str], max_n: int, counts: Counter) -> None:
    n = len(tokens)
    for i in range(n):
        counts[tokens[i]] += 1
        if max_n >= 2:
            if i + 1 < n:
                counts[tokens[i] + JOIN + tokens[i + 1]] += 1
            if i + 2 < n:
                counts[tokens[i] + JOIN + tokens[i + 2]] += 1  # skip-1
        if max_n >= 3 and i + 2 < n:
            counts[JOIN.join(tokens[i : i + 3])] += 1


def _finish(table: NgramTable) -> NgramTable:
    table.total_per_n = {
        m: sum(c for g, c in table.counts.items() if g.count(JOIN) == m - 1)
        for m in table.n_range
    }
    return table


def extract_ngrams(tokens: Sequence[str], max_n: int = 3) -> NgramTable:
    """Count contiguous n-grams for n <= max_n plus skip-1 bigrams.

    Skip-1 bigrams (one intervening token skipped) are folded into the bigram
    counts, so 'a b c' contributes a_b, b_c and a_c.
    """
    if max_n not in (1, 2, 3):
        raise DataError(f"max_n must be 1, 2 or 3, got {max_n}")
    table = NgramTable(n_range=tuple(range(1, max_n + 1)))
    _count_ngrams(tokens, max_n, table.counts)
    return _finish(table)


def user_ngram_table(user: UserDoc, max_n: int = 3) -> NgramTable:
    """N-gram table over a user's documents; grams never cross document
    boundaries."""
    if max_n not in (1, 2, 3):
        raise DataError(f"max_n must be 1, 2 or 3, got {max_n}")
    table = NgramTable(n_range=tuple(range(1, max_n + 1)))
    for seg in user.segments():
        _count_ngrams(seg, max_n, table.counts)
    return _finish(table)


def npmi(table: NgramTable, pair: str) -> float:
    """Normalized PMI of a bigram 'x_y', in [-1, 1].

    Joint and marginal probabilities share the unigram total as denominator,
    so a pair that always co-occurs scores exactly +1 and an independent pair
    scores 0. The pair count is symmetrized over both orders.
    """
    words = pair.split(JOIN)
    if len(words) != 2:
        raise DataError(f"npmi expects a bigram, got {pair!r}")
    x, y = words
    c_x = table.count(x)
    c_y = table.count(y)
    if x == y:
        c_xy = table.count(pair)
    else:
        c_xy = table.count(x + JOIN + y) + table.count(y + JOIN + x)
    if c_xy == 0:
        raise DataError(f"pair {pair!r} never observed")
    n1 = table.total_per_n.get(1, 0)
    if c_x == 0 or c_y == 0 or n1 == 0:
        raise DataError(f"constituents of {pair!r} not observed as unigrams")
    p_x = c_x / n1
    p_y = c_y / n1
    p_xy = c_xy / n1
    if p_xy >= 1.0:
        return 1.0
    score = math.log(p_xy / (p_x * p_y)) / -math.log(p_xy)
    return max(-1.0, min(1.0, score))


def _words(gram: str) -> tuple[str, ...]:
    return tuple(gram.split(JOIN))


def is_constituent(shorter: str, longer: str) -> bool:
    """True when `shorter` has strictly fewer words and every one of them
    fits inside `longer` (multiset containment)."""
    a = Counter(_words(shorter))
    b = Counter(_words(longer))
    if sum(a.values()) >= sum(b.values()):
        return False
    return all(b[w] >= c for w, c in a.items())


def build_token_set(
    user: UserDoc, min_count: int = 2, npmi_threshold: float = 0.3
) -> TokenSetG:
    """Build the user's token set G from their own n-gram statistics.

    Retention: trigrams with count >= min_count; bigrams with count >=
    min_count and NPMI >= threshold that are not constituents of a retained
    trigram; unigrams that are not constituents of any retained bigram or
    trigram. Grams are counted within document boundaries.
    """
    table = user_ngram_table(user, max_n=3)
    trigrams = {
        g
        for g, c in table.counts.items()
        if g.count(JOIN) == 2 and c >= min_count
    }
    bigrams = set()
    for g, c in table.counts.items():
        if g.count(JOIN) != 1 or c < min_count:
            continue
        if npmi(table, g) < npmi_threshold:
            continue
        if any(is_constituent(g, t) for t in trigrams):
            continue
        bigrams.add(g)
    longer = trigrams | bigrams
    unigrams = {
        g
        for g, c in table.counts.items()
        if JOIN not in g and not any(is_constituent(g, h) for h in longer)
    }
    return TokenSetG(user_id=user.user_id, members=unigrams | bigrams | trigrams)


def retained_phrases(
    user: UserDoc, min_count: int = 2, npmi_threshold: float = 0.3
) -> set[str]:
    """The user's retained bigrams/trigrams (G members with n > 1)."""
    g = build_token_set(user, min_count=min_count, npmi_threshold=npmi_threshold)
    return {m for m in g.members if JOIN in m}


def phrase_inventory(
    corpus: Corpus, min_count: int = 2, npmi_threshold: float = 0.3
) -> set[str]:
    """Union over users of retained phrases; the inventory injected into
    dimension corpora so phrase members of G can match embedding vocabularies."""
    inventory: set[str] = set()
    for uid in corpus.user_ids():
        inventory |= retained_phrases(
            corpus.users[uid], min_count=min_count, npmi_threshold=npmi_threshold
        )
    return inventory


def inject_phrases(tokens: Sequence[str], inventory: set[str]) -> list[str]:
    """Greedy left-to-right longest-match replacement of inventory phrases
    with single underscore-joined tokens."""
    if not inventory:
        return list(tokens)
    out: list[str] = []
    i = 0
    n = len(tokens)
    while i < n:
        replaced = False
        for width in (3, 2):
            if i + width <= n:
                cand = JOIN.join(tokens[i : i + width])
                if cand in inventory:
                    out.append(cand)
                    i += width
                    replaced = True
                    break
        if not replaced:
            out.append(tokens[i])
            i += 1
    return out


def top_k_by_class(
    corpus: Corpus, k: int, n: int
) -> dict[str, list[tuple[str, int]]]:
    """Top-k n-grams per class label, ranked by user-level document frequency
    (number of users in the class whose stream contains the gram), ties broken
    lexicographically."""
    if k < 1:
        raise DataError(f"k must be >= 1, got {k}")
    doc_freq: dict[str, Counter] = {}
    for uid in corpus.user_ids():
        ud = corpus.users[uid]
        table = user_ngram_table(ud, max_n=max(1, min(n, 3)))
        grams = {g for g in table.counts if g.count(JOIN) == n - 1}
        df = doc_freq.setdefault(ud.label, Counter())
        for g in grams:
            df[g] += 1
    ranked = {}
    for label, df in sorted(doc_freq.items()):
        order = sorted(df.items(), key=lambda kv: (-kv[1], kv[0]))
        ranked[label] = order[:k]
    return ranked
