import json

import pytest
from hypothesis import given, strategies as st

from dimtext.corpus import (
    NEGATIVE,
    POSITIVE,
    Corpus,
    Document,
    ingest,
    load_corpus,
    merge,
    normalize,
    save_corpus,
    subset,
)
from dimtext.errors import DataError


class TestNormalize:
    def test_urls_hashtags_punctuation(self):
        assert normalize("Check http://x.co #RoadTrip NOW!") == ["check", "roadtrip", "now"]

    def test_empty(self):
        assert normalize("") == []

    def test_mentions_and_trailing_commas(self):
        assert normalize("@bob   hello,   hello") == ["hello", "hello"]

    def test_standalone_punctuation_dropped(self):
        assert normalize("wow !!! ... ok") == ["wow", "ok"]

    def test_interior_punctuation_kept(self):
        assert normalize("imam al-awlaki") == ["imam", "al-awlaki"]

    def test_www_urls(self):
        assert normalize("see www.example.com/x now") == ["see", "now"]

    @given(st.text(max_size=200))
    def test_idempotent(self, text):
        once = normalize(text)
        assert normalize(" ".join(once)) == once


def _write_jsonl(path, records):
    path.write_text(
        "".join(json.dumps(r) + "\n" for r in records), encoding="utf-8"
    )


class TestIngest:
    def test_aggregates_per_user(self, tmp_path):
        p = tmp_path / "docs.jsonl"
        _write_jsonl(
            p,
            [
                {"user_id": "a", "text": "one two"},
                {"user_id": "a", "text": "three"},
                {"user_id": "b", "text": "four"},
            ],
        )
        corpus = ingest(p, POSITIVE)
        assert len(corpus) == 2
        assert sorted(u.doc_count for u in corpus.users.values()) == [1, 2]
        assert corpus.users["a"].tokens == ["one", "two", "three"]
        assert corpus.class_counts == {POSITIVE: 2}

    def test_empty_file_is_an_error(self, tmp_path):
        p = tmp_path / "empty.jsonl"
        p.write_text("")
        with pytest.raises(DataError, match="no records"):
            ingest(p, POSITIVE)

    def test_malformed_below_ceiling_tolerated(self, tmp_path):
        p = tmp_path / "docs.jsonl"
        lines = [json.dumps({"user_id": f"u{i}", "text": "hello"}) for i in range(199)]
        lines.insert(50, "{not json")
        p.write_text("\n".join(lines) + "\n")
        corpus = ingest(p, NEGATIVE)
        assert len(corpus) == 199
        assert corpus.malformed_count == 1

    def test_malformed_above_ceiling_fatal(self, tmp_path):
        p = tmp_path / "docs.jsonl"
        lines = [json.dumps({"user_id": "u", "text": "hello"})] * 10 + ["junk"] * 5
        p.write_text("\n".join(lines) + "\n")
        with pytest.raises(DataError, match="ceiling"):
            ingest(p, NEGATIVE)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            ingest(tmp_path / "nope.jsonl", POSITIVE)

    def test_deterministic(self, tmp_path):
        p = tmp_path / "docs.jsonl"
        _write_jsonl(p, [{"user_id": "a", "text": "x y"}, {"user_id": "b", "text": "z"}])
        c1 = ingest(p, POSITIVE)
        c2 = ingest(p, POSITIVE)
        assert {u: d.tokens for u, d in c1.users.items()} == {
            u: d.tokens for u, d in c2.users.items()
        }
        assert c1.class_counts == c2.class_counts


class TestAggregation:
    def test_lossless_token_counts(self):
        corpus = Corpus()
        texts = ["one two three", "four five", "six"]
        for i, text in enumerate(texts):
            corpus.add(Document(doc_id=str(i), user_id="u", text=text, label=POSITIVE))
        ud = corpus.users["u"]
        assert len(ud.tokens) == sum(len(normalize(t)) for t in texts)
        assert ud.doc_count == 3
        assert [len(s) for s in ud.segments()] == [3, 2, 1]

    def test_segments_cover_stream(self):
        corpus = Corpus()
        for i in range(4):
            corpus.add(Document(doc_id=str(i), user_id="u", text=f"tok{i} x", label=POSITIVE))
        ud = corpus.users["u"]
        flat = [t for seg in ud.segments() for t in seg]
        assert flat == ud.tokens


class TestCorpusOps:
    def _corpus(self, label, uids):
        c = Corpus()
        for u in uids:
            c.add(Document(doc_id=u, user_id=u, text="hello world", label=label))
        return c

    def test_merge_and_counts(self):
        merged = merge([self._corpus(POSITIVE, ["a", "b"]), self._corpus(NEGATIVE, ["c"])])
        assert merged.class_counts == {POSITIVE: 2, NEGATIVE: 1}

    def test_merge_rejects_duplicates(self):
        with pytest.raises(DataError, match="duplicate"):
            merge([self._corpus(POSITIVE, ["a"]), self._corpus(NEGATIVE, ["a"])])

    def test_subset(self):
        c = self._corpus(POSITIVE, ["a", "b", "c"])
        s = subset(c, ["a", "c"])
        assert s.user_ids() == ["a", "c"]
        assert s.class_counts == {POSITIVE: 2}

    def test_save_load_round_trip(self, tmp_path):
        c = merge([self._corpus(POSITIVE, ["a"]), self._corpus(NEGATIVE, ["b"])])
        path = tmp_path / "corpus.json"
        save_corpus(c, path)
        loaded = load_corpus(path)
        assert loaded.user_ids() == c.user_ids()
        for u in c.users:
            assert loaded.users[u].tokens == c.users[u].tokens
            assert loaded.users[u].doc_offsets == c.users[u].doc_offsets
            assert loaded.users[u].label == c.users[u].label
