import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spanmine import (
    CorpusFormatError,
    DataError,
    Document,
    DuplicateIdError,
    dataset_stats,
    load_corpus,
    model_input,
    normalize,
    tokenize,
    write_corpus,
)


class TestNormalize:
    @pytest.mark.parametrize(
        "raw,expected",
        [
            ("Top 100 Results", "top <digit> results"),
            ("CNN-2019a", "cnn-<digit>a"),
            ("", ""),
            ("007", "<digit>"),
            ("v1.2.3", "v<digit>.<digit>.<digit>"),
        ],
    )
    def test_examples(self, raw, expected):
        assert normalize(raw) == expected

    @given(st.text(max_size=200))
    @settings(max_examples=300)
    def test_idempotent(self, text):
        once = normalize(text)
        assert normalize(once) == once

    @given(st.text(max_size=200))
    def test_no_digits_survive(self, text):
        assert not any(ch.isdigit() and ch.isascii() for ch in normalize(text))


class TestTokenize:
    def test_whitespace_split(self):
        assert tokenize("mixed finite elements .") == ["mixed", "finite", "elements", "."]

    def test_hyphen_and_sentinel_preserved(self):
        assert tokenize("self-stabilizing <digit> clocks") == ["self-stabilizing", "<digit>", "clocks"]

    def test_punctuation_isolated(self):
        assert tokenize("end.start") == ["end", ".", "start"]

    def test_sep_atomic(self):
        assert tokenize("a <sep> b") == ["a", "<sep>", "b"]

    def test_sentinel_adjacent_to_word(self):
        assert tokenize("cnn-<digit>a") == ["cnn", "-", "<digit>", "a"]

    @given(st.text(max_size=200))
    @settings(max_examples=300)
    def test_normalized_tokens_clean(self, text):
        for token in tokenize(normalize(text)):
            assert token == token.lower()
            assert not any(ch.isdigit() and ch.isascii() for ch in token)
            assert not any(ch.isspace() for ch in token)


class TestModelInput:
    def test_under_limit(self):
        doc = Document("a1", "a b", "c")
        out = model_input(doc, 512)
        assert out.tokens == ("a", "b", "<sep>", "c")
        assert out.title_len == 2

    def test_truncation_boundary(self):
        doc = Document("a1", "a b", "c")
        assert model_input(doc, 3).tokens == ("a", "b", "<sep>")

    def test_empty_title(self):
        out = model_input(Document("a1", "", "x"))
        assert out.tokens == ("<sep>", "x")
        assert out.title_len == 0

    @given(st.text(max_size=80), st.text(max_size=200), st.integers(min_value=1, max_value=64))
    @settings(max_examples=200)
    def test_never_exceeds_limit(self, title, body, max_tokens):
        doc = Document("x", title, body or "fallback")
        out = model_input(doc, max_tokens)
        assert len(out.tokens) <= max_tokens
        assert out.title_len <= len(out.tokens)


class TestLoadCorpus:
    def _write(self, tmp_path, lines):
        path = tmp_path / "corpus.jsonl"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    def test_direct_field_mapping(self, tmp_path):
        path = self._write(tmp_path, ['{"id":"a1","title":"T","abstract":"B"}'])
        docs = list(load_corpus(path))
        assert docs == [Document("a1", "T", "B", None)]

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("", encoding="utf-8")
        assert list(load_corpus(path)) == []

    def test_duplicate_id(self, tmp_path):
        path = self._write(
            tmp_path,
            ['{"id":"a1","title":"T","abstract":"B"}', '{"id":"a1","title":"U","abstract":"C"}'],
        )
        with pytest.raises(DuplicateIdError, match="a1"):
            list(load_corpus(path))

    def test_malformed_line_carries_number(self, tmp_path):
        path = self._write(tmp_path, ['{"id":"a1","title":"T","abstract":"B"}', "{broken"])
        with pytest.raises(CorpusFormatError, match="line 2"):
            list(load_corpus(path))

    def test_missing_fields_reported_not_dropped_silently(self, tmp_path):
        path = self._write(tmp_path, ['{"id":"a1","title":"only title"}', '{"title":"no id","abstract":"b"}'])
        issues = []
        docs = list(load_corpus(path, on_issue=lambda n, m: issues.append((n, m))))
        assert [d.id for d in docs] == ["a1"]
        assert docs[0].body == ""
        assert len(issues) == 2  # missing abstract on line 1, missing id on line 2

    def test_keywords_as_string_or_list(self, tmp_path):
        path = self._write(
            tmp_path,
            [
                '{"id":"a1","title":"T","abstract":"B","keywords":"x;y z"}',
                '{"id":"a2","title":"T","abstract":"B","keywords":["p","q"]}',
            ],
        )
        docs = list(load_corpus(path))
        assert docs[0].keyphrases == ("x", "y z")
        assert docs[1].keyphrases == ("p", "q")

    def test_schema_remap(self, tmp_path):
        path = self._write(tmp_path, ['{"docno":"a1","headline":"T","text":"B"}'])
        docs = list(load_corpus(path, {"id": "docno", "title": "headline", "body": "text"}))
        assert docs[0] == Document("a1", "T", "B", None)

    def test_round_trip(self, tmp_path):
        docs = [
            Document("a1", "Title One", "Body 1", ("k1", "k2 k3")),
            Document("a2", "", "only body", None),
            Document("a3", "unicode Ω", "naïve text", ("Ω phrase",)),
        ]
        path = tmp_path / "out.jsonl"
        write_corpus(docs, path)
        assert list(load_corpus(path)) == docs


class TestDatasetStats:
    def test_small_example(self):
        doc = Document("d", "", "a b", ("a", "zz"))
        stats = dataset_stats([doc])
        assert stats.num_docs == 1
        assert stats.avg_kp_per_doc == 2
        assert stats.pct_absent_kp == 50.0

    def test_zero_keyphrases_rejected(self):
        with pytest.raises(DataError):
            dataset_stats([Document("d", "t", "b", ())])

    def test_empty_corpus_rejected(self):
        with pytest.raises(DataError):
            dataset_stats([])

    def test_stemmed_presence_counts(self):
        # "networks" in text makes gold "network" present via stemming.
        doc = Document("d", "", "deep networks work", ("network", "missing phrase"))
        stats = dataset_stats([doc])
        assert stats.pct_absent_kp == 50.0

    def test_avg_lengths(self):
        doc = Document("d", "t", "b", ("one", "two words", "three word phrase"))
        stats = dataset_stats([doc])
        assert stats.avg_kp_len == pytest.approx(2.0)
