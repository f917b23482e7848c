import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import write_sentence_cache, write_word_table
from sdgtag.embeddings import (
    BadHeader,
    CacheMiss,
    DimensionMismatch,
    DuplicateToken,
    EmbeddingTable,
    SentenceCache,
    awe,
    canonical_digest,
    canonical_text,
    dense_cosine,
    load_sentence_cache,
    load_word_table,
    sentence_embedding,
)


class TestWordTable:
    def test_basic_parse(self, tmp_path):
        path = tmp_path / "w.tsv"
        path.write_text("3\ncat\t1 0 0\ndog\t0 1 0\n", "utf-8")
        table = load_word_table(path)
        assert table.dimension == 3
        assert set(table.vectors) == {"cat", "dog"}
        assert np.array_equal(table.vectors["cat"], np.array([1.0, 0.0, 0.0]))

    def test_dimension_mismatch(self, tmp_path):
        path = tmp_path / "w.tsv"
        path.write_text("3\ncat\t1 0\n", "utf-8")
        with pytest.raises(DimensionMismatch):
            load_word_table(path)

    def test_duplicate_token(self, tmp_path):
        path = tmp_path / "w.tsv"
        path.write_text("2\ncat\t1 0\ncat\t0 1\n", "utf-8")
        with pytest.raises(DuplicateToken):
            load_word_table(path)

    def test_empty_body_is_valid(self, tmp_path):
        path = tmp_path / "w.tsv"
        path.write_text("4\n", "utf-8")
        table = load_word_table(path)
        assert table.vectors == {}

    def test_bad_header(self, tmp_path):
        path = tmp_path / "w.tsv"
        path.write_text("xyz\n", "utf-8")
        with pytest.raises(BadHeader):
            load_word_table(path)
        path.write_text("", "utf-8")
        with pytest.raises(BadHeader):
            load_word_table(path)

    def test_writer_reader_roundtrip(self, tmp_path):
        path = write_word_table(tmp_path / "w.tsv", 2, {"a": [0.25, -1.5], "b": [3.0, 0.125]})
        table = load_word_table(path)
        assert np.array_equal(table.vectors["a"], np.array([0.25, -1.5]))


class TestSentenceCache:
    def test_parse_and_lookup(self, tmp_path):
        path = write_sentence_cache(tmp_path / "c.tsv", 2, "dan", {"hello world": [0.6, 0.8]})
        cache = load_sentence_cache(path)
        assert cache.encoder_tag == "dan"
        assert np.array_equal(sentence_embedding(cache, "hello world"), np.array([0.6, 0.8]))

    def test_miss_raises_with_digest(self, tmp_path):
        path = write_sentence_cache(tmp_path / "c.tsv", 2, "dan", {"hello": [1.0, 0.0]})
        cache = load_sentence_cache(path)
        with pytest.raises(CacheMiss) as err:
            sentence_embedding(cache, "absent text")
        assert err.value.digests == [canonical_digest("absent text")]

    def test_whitespace_canonicalization(self, tmp_path):
        path = write_sentence_cache(tmp_path / "c.tsv", 2, "dan", {"hello world": [1.0, 0.0]})
        cache = load_sentence_cache(path)
        a = sentence_embedding(cache, "  hello   world \n")
        b = sentence_embedding(cache, "hello world")
        assert np.array_equal(a, b)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("512\tgru\n", "utf-8")
        with pytest.raises(BadHeader):
            load_sentence_cache(path)


def test_canonical_text_rules():
    assert canonical_text("  a \t b\n\nc ") == "a b c"
    assert canonical_text("") == ""
    assert canonical_digest(" x  y ") == canonical_digest("x y")


class TestAwe:
    TABLE = EmbeddingTable(
        dimension=3,
        vectors={"cat": np.array([1.0, 0, 0]), "dog": np.array([0, 1.0, 0])},
    )

    def test_singleton(self):
        assert np.array_equal(awe(["cat"], self.TABLE), np.array([1.0, 0, 0]))

    def test_mean(self):
        assert np.allclose(awe(["cat", "dog"], self.TABLE), np.array([0.5, 0.5, 0]))

    def test_all_oov_is_zero(self):
        assert np.array_equal(awe(["xyzzy"], self.TABLE), np.zeros(3))

    def test_empty_is_zero(self):
        assert np.array_equal(awe([], self.TABLE), np.zeros(3))

    def test_multiplicity_weights(self):
        doubled = awe(["cat", "cat", "dog"], self.TABLE)
        assert np.allclose(doubled, np.array([2 / 3, 1 / 3, 0]))
        # equal multiplicities collapse to the deduplicated mean
        assert np.allclose(awe(["cat", "cat", "dog", "dog"], self.TABLE), awe(["cat", "dog"], self.TABLE))


class TestDenseCosine:
    def test_self(self):
        v = np.array([1.0, 2.0, -3.0])
        assert dense_cosine(v, v) == pytest.approx(1.0, abs=1e-12)

    def test_antipodal(self):
        assert dense_cosine(np.array([1.0, 0.0]), np.array([-1.0, 0.0])) == pytest.approx(-1.0)

    def test_hand_value(self):
        got = dense_cosine(np.array([1.0, 1.0]), np.array([1.0, 0.0]))
        assert got == pytest.approx(1 / np.sqrt(2), abs=1e-12)

    def test_zero_norm_is_zero(self):
        assert dense_cosine(np.zeros(2), np.array([1.0, 2.0])) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            dense_cosine(np.zeros(2), np.zeros(3))

    @given(
        st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=8),
        st.data(),
    )
    def test_bounded_and_finite(self, values, data):
        other = data.draw(
            st.lists(st.floats(-1e6, 1e6), min_size=len(values), max_size=len(values))
        )
        a, b = np.array(values), np.array(other)
        sim = dense_cosine(a, b)
        assert np.isfinite(sim)
        assert -1.0 - 1e-9 <= sim <= 1.0 + 1e-9


def test_cache_rows_are_order_insensitive(tmp_path):
    body = ["2\tdan"]
    d1, d2 = canonical_digest("one"), canonical_digest("two")
    body.append(f"{d1}\t1.0 0.0")
    body.append(f"{d2}\t0.0 1.0")
    (tmp_path / "a.tsv").write_text("\n".join(body) + "\n", "utf-8")
    (tmp_path / "b.tsv").write_text("\n".join([body[0], body[2], body[1]]) + "\n", "utf-8")
    ca = load_sentence_cache(tmp_path / "a.tsv")
    cb = load_sentence_cache(tmp_path / "b.tsv")
    assert set(ca.entries) == set(cb.entries)
    assert isinstance(ca, SentenceCache)
