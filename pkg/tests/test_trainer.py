"""Tests for the embedding trainers, objective, gradient, and sampler."""

import math

import numpy as np
import pytest

from hyperdive import trainer
from hyperdive.cooccur import CoocStats, count_cooccurrences
from hyperdive.corpus import TokenStream, Vocabulary, build_vocab
from hyperdive.errors import ConfigError, TrainingError
from hyperdive.trainer import (
    Embedding,
    NegativeSampler,
    TrainConfig,
    full_gradient,
    init_embedding,
    objective_value,
    stochastic_round,
    train_dive,
    train_sgns,
)

BACKENDS = ["numpy"] + (["compiled"] if trainer.HAVE_COMPILED else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def oracle_stats():
    stream = TokenStream([["a", "b", "a", "c"]])
    vocab, stream = build_vocab(stream, min_count=1)
    return vocab, count_cooccurrences(stream, vocab, window=2)


def dense_stats(rng, size=10):
    mat = rng.integers(1, 6, size=(size, size))
    np.fill_diagonal(mat, 0)
    return CoocStats.from_pair_counts(mat, window=(2, 2))


def random_embedding(rng, size, dim, kind="dive"):
    wv = rng.random((size, dim)) * 0.6
    cv = rng.random((size, dim)) * 0.6
    return Embedding(wv, cv, kind=kind, hyper={})


class TestObjective:
    def test_zero_embedding_closed_form(self):
        _, stats = oracle_stats()
        emb = Embedding(np.zeros((3, 4)), np.zeros((3, 4)), kind="dive", hyper={})
        expected = (stats.total + 1.5 * stats.avg_freq * stats.vocab_size) * math.log(0.5)
        assert objective_value(emb, stats, 1.5) == pytest.approx(expected, abs=1e-12)

    def test_saturates_toward_zero_without_negatives(self):
        mat = np.zeros((2, 2), dtype=np.int64)
        mat[0, 1] = 1
        stats = CoocStats.from_pair_counts(mat, window=(1, 1))
        wv = np.zeros((2, 3))
        cv = np.zeros((2, 3))
        wv[0, 0] = 20.0
        cv[1, 0] = 20.0
        emb = Embedding(wv, cv, kind="dive", hyper={})
        value = objective_value(emb, stats, 0.0)
        assert -1e-12 < value < 0

    def test_matches_direct_double_sum(self):
        rng = np.random.default_rng(31)
        stats = dense_stats(rng, size=6)
        emb = random_embedding(rng, 6, 3)
        probs = stats.context_marginal / stats.total
        expected = 0.0
        for w in range(6):
            row_total = 0
            for c in range(6):
                count = stats.pair_count(w, c)
                row_total += count
                if count:
                    x = float(emb.word_vecs[w] @ emb.ctx_vecs[c])
                    expected += count * math.log(1.0 / (1.0 + math.exp(-x)))
            if row_total:
                for cn in range(6):
                    x = float(emb.word_vecs[w] @ emb.ctx_vecs[cn])
                    expected += (
                        1.5
                        * stats.avg_freq
                        * probs[cn]
                        * math.log(1.0 / (1.0 + math.exp(x)))
                    )
        assert objective_value(emb, stats, 1.5) == pytest.approx(expected, rel=1e-12)


class TestGradient:
    def test_zero_contexts_give_zero_gradient(self):
        rng = np.random.default_rng(5)
        stats = dense_stats(rng, size=4)
        emb = Embedding(rng.random((4, 3)), np.zeros((4, 3)), kind="dive", hyper={})
        for w in range(4):
            np.testing.assert_array_equal(full_gradient(emb, stats, 1.5, w), np.zeros(3))

    def test_matches_central_finite_differences(self):
        rng = np.random.default_rng(12)
        stats = dense_stats(rng, size=10)
        emb = random_embedding(rng, 10, 5)
        h = 1e-5
        for w in range(10):
            grad = full_gradient(emb, stats, 1.5, w)
            for j in range(5):
                saved = emb.word_vecs[w, j]
                emb.word_vecs[w, j] = saved + h
                up = objective_value(emb, stats, 1.5)
                emb.word_vecs[w, j] = saved - h
                down = objective_value(emb, stats, 1.5)
                emb.word_vecs[w, j] = saved
                fd = (up - down) / (2 * h)
                denom = max(abs(fd), abs(grad[j]), 1e-8)
                assert abs(fd - grad[j]) / denom <= 1e-4

    def test_dominated_word_has_smaller_gradient(self):
        # With identical embeddings and counts #(x,c) <= #(y,c) everywhere,
        # the better-spread word's gradient dominates coordinatewise.
        rng = np.random.default_rng(3)
        base = rng.integers(1, 5, size=(6, 6))
        mat = base.copy()
        mat[1] = mat[0] + rng.integers(0, 4, size=6)  # row 1 dominates row 0
        stats = CoocStats.from_pair_counts(mat, window=(2, 2))
        emb = random_embedding(rng, 6, 4)
        emb.word_vecs[1] = emb.word_vecs[0]
        gx = full_gradient(emb, stats, 1.5, 0)
        gy = full_gradient(emb, stats, 1.5, 1)
        assert (gy >= gx - 1e-12).all()

    def test_sampled_direction_matches_gradient_in_expectation(self):
        rng = np.random.default_rng(77)
        stats = dense_stats(rng, size=10)
        emb = random_embedding(rng, 10, 4)
        probs = stats.context_marginal / stats.total
        sampler = NegativeSampler(stats.context_marginal)
        neg_ratio = 1.5
        w = 2
        rate = neg_ratio * stats.avg_freq / stats.word_marginal[w]
        n_occ = int(stats.word_marginal[w])
        sig = 1.0 / (1.0 + np.exp(-(emb.ctx_vecs @ emb.word_vecs[w])))
        target_neg = -neg_ratio * stats.avg_freq * (
            (probs * sig)[:, None] * emb.ctx_vecs
        ).sum(axis=0)
        trials = 4000
        draws_per_trial = stochastic_round(
            np.full((trials, n_occ), rate), rng
        ).sum(axis=1)
        samples = np.empty((trials, 4))
        for t in range(trials):
            negs = sampler.draw(rng, int(draws_per_trial[t]))
            samples[t] = -(sig[negs, None] * emb.ctx_vecs[negs]).sum(axis=0)
        mean = samples.mean(axis=0)
        sem = samples.std(axis=0, ddof=1) / math.sqrt(trials)
        assert (np.abs(mean - target_neg) <= 3 * sem + 1e-9).all()


class TestSampler:
    def test_probabilities_normalized(self):
        sampler = NegativeSampler(np.array([3, 1, 0, 4]))
        assert sampler.probs.sum() == pytest.approx(1.0, abs=1e-12)
        assert sampler.probs[2] == 0.0

    def test_seeded_draws_reproducible(self):
        sampler = NegativeSampler(np.array([5, 2, 3]))
        a = sampler.draw(np.random.default_rng(9), 50)
        b = sampler.draw(np.random.default_rng(9), 50)
        np.testing.assert_array_equal(a, b)

    def test_empirical_frequencies_match(self):
        weights = np.array([10, 1, 5, 0, 4], dtype=float)
        sampler = NegativeSampler(weights)
        n = 100_000
        draws = sampler.draw(np.random.default_rng(123), n)
        freq = np.bincount(draws, minlength=5) / n
        for i, p in enumerate(sampler.probs):
            assert abs(freq[i] - p) <= 3 * math.sqrt(p * (1 - p) / n) + 1e-9

    def test_stochastic_round_unbiased(self):
        rng = np.random.default_rng(17)
        values = np.full(200_000, 2.3)
        rounded = stochastic_round(values, rng)
        assert set(np.unique(rounded)) <= {2, 3}
        assert rounded.mean() == pytest.approx(2.3, abs=0.005)

    def test_expected_negatives_per_word_constant(self):
        # One epoch gives word w floor/ceil draws per occurrence; the mean
        # total equals neg_ratio * avg_freq regardless of the word's count.
        rng = np.random.default_rng(29)
        _, stats = oracle_stats()
        neg_ratio = 1.5
        for w in range(3):
            count = int(stats.word_marginal[w])
            rate = neg_ratio * stats.avg_freq / count
            trials = 20_000
            totals = stochastic_round(np.full((trials, count), rate), rng).sum(axis=1)
            expected = neg_ratio * stats.avg_freq
            sem = totals.std(ddof=1) / math.sqrt(trials)
            assert abs(totals.mean() - expected) <= 3 * sem + 1e-9


class TestTraining:
    def test_dive_nonnegative_and_deterministic(self, backend):
        rng = np.random.default_rng(1)
        stats = dense_stats(rng, size=12)
        config = TrainConfig(dim=6, epochs=3, batch_size=16, debug=True)
        first = train_dive(stats, config, seed=99, backend=backend)
        second = train_dive(stats, config, seed=99, backend=backend)
        assert (first.word_vecs >= 0).all()
        assert (first.ctx_vecs >= 0).all()
        assert np.isfinite(first.word_vecs).all()
        np.testing.assert_array_equal(first.word_vecs, second.word_vecs)
        np.testing.assert_array_equal(first.ctx_vecs, second.ctx_vecs)

    def test_different_seeds_differ(self, backend):
        rng = np.random.default_rng(2)
        stats = dense_stats(rng, size=8)
        config = TrainConfig(dim=4, epochs=1, batch_size=8)
        a = train_dive(stats, config, seed=1, backend=backend)
        b = train_dive(stats, config, seed=2, backend=backend)
        assert not np.array_equal(a.word_vecs, b.word_vecs)

    def test_dive_improves_objective(self, backend):
        rng = np.random.default_rng(4)
        stats = dense_stats(rng, size=10)
        config = TrainConfig(dim=5, epochs=8, batch_size=16)
        seed = 7
        init_rng = np.random.default_rng(seed)
        wv0, cv0 = init_embedding("dive", stats.vocab_size, config.dim, init_rng)
        before = objective_value(
            Embedding(wv0, cv0, kind="dive", hyper={}), stats, config.neg_ratio
        )
        trained = train_dive(stats, config, seed=seed, backend=backend)
        after = objective_value(trained, stats, config.neg_ratio)
        assert after > before

    def test_sgns_allows_negative_entries(self, backend):
        rng = np.random.default_rng(6)
        stats = dense_stats(rng, size=10)
        config = TrainConfig(dim=6, epochs=2, batch_size=16)
        emb = train_sgns(stats, config, seed=11, backend=backend)
        assert emb.kind == "sgns"
        assert (emb.word_vecs < 0).any()
        assert np.isfinite(emb.word_vecs).all()

    def test_bad_hyperparameters_rejected(self):
        _, stats = oracle_stats()
        with pytest.raises(ConfigError):
            train_dive(stats, TrainConfig(dim=0), seed=0)
        with pytest.raises(ConfigError):
            train_dive(stats, TrainConfig(epochs=0), seed=0)
        with pytest.raises(ConfigError):
            train_dive(stats, TrainConfig(lr=-0.1), seed=0)

    def test_nonfinite_parameters_detected(self):
        arr = np.array([[1.0, float("nan")]])
        with pytest.raises(TrainingError):
            trainer.check_finite(arr, where="test")

    def test_unknown_backend_rejected(self):
        _, stats = oracle_stats()
        with pytest.raises(ConfigError):
            train_dive(stats, TrainConfig(), seed=0, backend="bogus")


class TestEmbeddingIO:
    def test_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(8)
        vocab = Vocabulary(["dog", "cat", "eel"], np.array([5, 4, 3]))
        emb = Embedding(rng.random((3, 4)), rng.random((3, 4)), kind="dive", hyper={})
        path = tmp_path / "vectors.emb"
        emb.save(path, vocab)
        loaded = Embedding.load(path, vocab)
        np.testing.assert_array_equal(loaded.word_vecs, emb.word_vecs)
        assert loaded.kind == "dive"
        assert loaded.ctx_vecs is None

    def test_header_and_layout(self, tmp_path):
        vocab = Vocabulary(["xx", "yy"], np.array([2, 1]))
        emb = Embedding(np.array([[0.5, 1.5], [2.5, 3.5]]), None, kind="sgns", hyper={})
        path = tmp_path / "vectors.emb"
        emb.save(path, vocab)
        lines = path.read_text().splitlines()
        assert lines[0] == "2 2 sgns"
        assert lines[1].split(" ")[0] == "xx"

    def test_identical_saves_are_bit_identical(self, tmp_path, backend):
        rng = np.random.default_rng(10)
        stats = dense_stats(rng, size=6)
        vocab = Vocabulary(
            [f"w{chr(97 + i)}" for i in range(6)], np.ones(6, dtype=np.int64)
        )
        config = TrainConfig(dim=3, epochs=2, batch_size=8)
        one, two = tmp_path / "one.emb", tmp_path / "two.emb"
        train_dive(stats, config, seed=5, backend=backend).save(one, vocab)
        train_dive(stats, config, seed=5, backend=backend).save(two, vocab)
        assert one.read_bytes() == two.read_bytes()
