"""Tests for tokenization, chunking, and vocabulary building."""

import numpy as np
import pytest

from hyperdive.corpus import (
    TokenStream,
    Vocabulary,
    build_vocab,
    clean_token,
    preprocess,
)
from hyperdive.errors import ConfigError, ParseError


class TestCleanToken:
    def test_strips_trailing_punctuation(self):
        assert clean_token("barked.") == "barked"

    def test_strips_leading_punctuation(self):
        assert clean_token("--hello") == "hello"

    def test_strips_both_sides(self):
        assert clean_token('"quoted!"') == "quoted"

    def test_interior_nonalpha_rejected(self):
        assert clean_token("a1b") is None
        assert clean_token("can't") is None
        assert clean_token("co-occur") is None

    def test_pure_nonalpha_rejected(self):
        assert clean_token("123") is None
        assert clean_token("...") is None
        assert clean_token("") is None

    def test_clean_word_unchanged(self):
        assert clean_token("dog") == "dog"


class TestPreprocess:
    def test_lowercase_and_stopword_removal(self):
        stream = preprocess("The Dog barked.")
        assert list(stream.tokens()) == ["dog", "barked"]

    def test_nonalpha_token_removed(self):
        stream = preprocess("a1b c")
        assert list(stream.tokens()) == ["c"]

    def test_chunking_arithmetic(self):
        text = " ".join(f"w{chr(97 + i % 26)}x{chr(97 + (i // 26) % 26)}" for i in range(250))
        stream = preprocess(text, chunk_length=100)
        assert [len(c) for c in stream.chunks] == [100, 100, 50]

    def test_max_tokens_truncates(self):
        text = "alpha beta gamma delta epsilon"
        stream = preprocess(text, max_tokens=3)
        assert list(stream.tokens()) == ["alpha", "beta", "gamma"]

    def test_custom_stopwords(self):
        stream = preprocess("alpha beta gamma", stopwords={"beta"})
        assert list(stream.tokens()) == ["alpha", "gamma"]

    def test_idempotent_when_untagged(self):
        text = "The quick-thinking Fox; jumped over 2 lazy dogs!"
        once = preprocess(text)
        twice = preprocess(" ".join(once.tokens()))
        assert list(once.tokens()) == list(twice.tokens())

    def test_bad_chunk_length(self):
        with pytest.raises(ConfigError):
            preprocess("a b c", chunk_length=0)

    def test_tagged_inline_pairs(self):
        stream = preprocess("Dog_NN runs_VBZ", pos_mode="tagged")
        assert list(stream.tokens()) == ["dog_NN", "runs_VBZ"]

    def test_tagged_stopword_on_surface_word(self):
        stream = preprocess("The_DT dog_NN", pos_mode="tagged")
        assert list(stream.tokens()) == ["dog_NN"]

    def test_tagged_tsv_lines(self):
        stream = preprocess("Dog\tNN\nruns\tVBZ\n", pos_mode="tagged")
        assert list(stream.tokens()) == ["dog_NN", "runs_VBZ"]

    def test_tagged_malformed_token_reports_line(self):
        with pytest.raises(ParseError) as exc:
            preprocess("good_NN\nbad\n", pos_mode="tagged")
        assert "line 2" in str(exc.value)

    def test_unknown_pos_mode(self):
        with pytest.raises(ConfigError):
            preprocess("a", pos_mode="bogus")


class TestTokenStreamIO:
    def test_round_trip(self, tmp_path):
        stream = TokenStream([["alpha", "beta"], ["gamma"]], chunk_length=2)
        path = tmp_path / "stream.txt"
        stream.save(path)
        loaded = TokenStream.load(path, chunk_length=2)
        assert loaded.chunks == stream.chunks

    def test_n_tokens(self):
        stream = TokenStream([["a", "b"], ["c"]])
        assert stream.n_tokens() == 3


class TestBuildVocab:
    def test_min_count_filters_and_reemits(self):
        stream = TokenStream([["aa", "aa", "bb"]])
        vocab, filtered = build_vocab(stream, min_count=2)
        assert vocab.words == ["aa"]
        assert list(filtered.tokens()) == ["aa", "aa"]

    def test_word_below_threshold_excluded(self):
        stream = TokenStream([["zyx"] * 9 + ["common"] * 10])
        vocab, _ = build_vocab(stream, min_count=10)
        assert "zyx" not in vocab
        assert "common" in vocab

    def test_min_count_one_is_identity(self):
        stream = TokenStream([["a", "b", "a"]])
        vocab, filtered = build_vocab(stream, min_count=1)
        assert sorted(vocab.words) == ["a", "b"]
        assert filtered.chunks == stream.chunks

    def test_empty_vocab_raises(self):
        stream = TokenStream([["a", "b"]])
        with pytest.raises(ConfigError):
            build_vocab(stream, min_count=5)

    def test_freq_sum_matches_stream_length(self):
        rng = np.random.default_rng(7)
        tokens = [f"w{c}" for c in rng.integers(0, 20, size=500)]
        chunks = [tokens[i : i + 50] for i in range(0, 500, 50)]
        vocab, filtered = build_vocab(TokenStream(chunks), min_count=3)
        assert int(vocab.counts.sum()) == filtered.n_tokens()
        counted = {}
        for t in filtered.tokens():
            counted[t] = counted.get(t, 0) + 1
        assert counted == {w: int(c) for w, c in zip(vocab.words, vocab.counts)}

    def test_order_by_count_then_word(self):
        stream = TokenStream([["bb", "aa", "bb", "cc", "aa", "dd"]])
        vocab, _ = build_vocab(stream, min_count=1)
        assert vocab.words == ["aa", "bb", "cc", "dd"]
        assert [vocab.id(w) for w in vocab.words] == [0, 1, 2, 3]

    def test_chunk_boundaries_preserved(self):
        stream = TokenStream([["aa", "rare"], ["aa", "aa"]])
        _, filtered = build_vocab(stream, min_count=2)
        assert filtered.chunks == [["aa"], ["aa", "aa"]]

    def test_vocab_round_trip(self, tmp_path):
        vocab = Vocabulary(["dog", "cat"], np.array([10, 5]))
        path = tmp_path / "vocab.tsv"
        vocab.save(path)
        loaded = Vocabulary.load(path)
        assert loaded.words == vocab.words
        assert loaded.index == vocab.index
        np.testing.assert_array_equal(loaded.counts, vocab.counts)

    def test_vocab_load_bad_line(self, tmp_path):
        path = tmp_path / "vocab.tsv"
        path.write_text("dog\t10\ncat\n", encoding="utf-8")
        with pytest.raises(ParseError) as exc:
            Vocabulary.load(path)
        assert "line 2" in str(exc.value)

    def test_encode_known_and_unknown(self):
        vocab = Vocabulary(["a", "b"], np.array([2, 1]))
        np.testing.assert_array_equal(vocab.encode(["b", "a", "a"]), [1, 0, 0])
