"""Tests for the hypernymy scoring battery."""

import math

import numpy as np
import pytest

from hyperdive.corpus import Vocabulary
from hyperdive.errors import ConfigError
from hyperdive.sbow import FeatureSpace
from hyperdive.scoring import (
    SCORER_NAMES,
    PairScorer,
    WordVector,
    al1_distance,
    cde,
    cosine,
    entropy_diff,
    invcl,
    make_source,
    norm2_diff,
    random_score,
    slqs_sub,
    sum_diff,
    weeds_precision,
)
from hyperdive.trainer import Embedding


def dense(values):
    return WordVector.from_dense(np.asarray(values, dtype=float))


def random_sparse(rng, dim=12):
    n = int(rng.integers(1, dim + 1))
    idx = np.sort(rng.choice(dim, size=n, replace=False))
    vals = rng.random(n) + 0.05
    return WordVector(idx.astype(np.int64), vals, dim)


def al1_breakpoint_oracle(q, p, penalty_weight):
    """Minimize the asymmetric mismatch over the scale directly.

    The objective is piecewise linear and convex in the scale factor, so the
    minimum is attained at zero or where some scaled entry crosses its
    counterpart.
    """
    d_q = np.zeros(q.dim)
    d_q[q.indices] = q.values
    d_q = d_q / d_q.sum()
    d_p = np.zeros(p.dim)
    d_p[p.indices] = p.values
    d_p = d_p / d_p.sum()

    def objective(a):
        scaled = a * d_q
        return penalty_weight * np.maximum(scaled - d_p, 0).sum() + np.maximum(
            d_p - scaled, 0
        ).sum()

    candidates = [0.0]
    mask = d_q > 0
    candidates.extend((d_p[mask] / d_q[mask]).tolist())
    return min(objective(a) for a in candidates)


class TestCosine:
    def test_hand_value(self):
        assert cosine(dense([1, 1]), dense([1, 0])) == pytest.approx(
            1 / math.sqrt(2), abs=1e-12
        )

    def test_identical_is_one(self):
        v = dense([0.3, 0.2, 0.5])
        assert cosine(v, v) == pytest.approx(1.0, abs=1e-12)

    def test_disjoint_supports_are_zero(self):
        u = WordVector(np.array([0, 2]), np.array([1.0, 2.0]), 5)
        v = WordVector(np.array([1, 3]), np.array([4.0, 1.0]), 5)
        assert cosine(u, v) == 0.0

    def test_symmetric_and_bounded_on_nonnegative(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            u, v = random_sparse(rng), random_sparse(rng)
            s = cosine(u, v)
            assert s == pytest.approx(cosine(v, u), abs=1e-12)
            assert -1e-12 <= s <= 1 + 1e-12


class TestGenerality:
    def test_sum_diff_hand_value(self):
        assert sum_diff(dense([1, 1]), dense([2, 3])) == pytest.approx(3.0)

    def test_sum_diff_antisymmetric(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            q, p = random_sparse(rng), random_sparse(rng)
            assert sum_diff(q, p) == pytest.approx(-sum_diff(p, q), abs=1e-12)

    def test_norm2_diff_hand_value(self):
        assert norm2_diff(dense([0, 0]), dense([3, 4])) == pytest.approx(5.0)

    def test_norm2_diff_monotone(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            q = random_sparse(rng)
            extra = np.zeros(q.dim)
            extra[q.indices] = q.values
            extra[int(rng.integers(q.dim))] += rng.random() + 0.1
            p = WordVector.from_dense(extra)
            assert norm2_diff(q, p) >= 0

    def test_entropy_diff_extremes(self):
        p = dense([1, 1, 1, 1])
        q = dense([0, 5, 0, 0])
        assert entropy_diff(q, p) == pytest.approx(math.log(4), abs=1e-12)

    def test_entropy_diff_matches_direct_formula(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            q, p = random_sparse(rng), random_sparse(rng)
            def entropy(vec):
                d = vec.values / vec.values.sum()
                return float(-(d * np.log(d)).sum())
            assert entropy_diff(q, p) == pytest.approx(
                entropy(p) - entropy(q), abs=1e-12
            )


class TestInclusion:
    def test_cde_hand_value(self):
        assert cde(dense([2, 2]), dense([1, 3])) == pytest.approx(0.75)

    def test_cde_one_iff_dominated(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            q = random_sparse(rng)
            bigger = np.zeros(q.dim)
            bigger[q.indices] = q.values
            bigger += rng.random(q.dim) * 0.5
            p = WordVector.from_dense(bigger)
            assert cde(q, p) == pytest.approx(1.0, abs=1e-12)
            shrunk = bigger.copy()
            target = int(q.indices[0])
            shrunk[target] = q.values[0] * 0.5
            p_bad = WordVector.from_dense(shrunk)
            assert cde(q, p_bad) < 1.0

    def test_cde_disjoint_is_zero(self):
        u = WordVector(np.array([0]), np.array([2.0]), 4)
        v = WordVector(np.array([1]), np.array([2.0]), 4)
        assert cde(u, v) == 0.0

    def test_weeds_hand_value(self):
        assert weeds_precision(dense([2, 2]), dense([1, 0])) == pytest.approx(0.5)

    def test_weeds_nested_support_is_one(self):
        q = WordVector(np.array([1, 2]), np.array([3.0, 1.0]), 5)
        p = WordVector(np.array([0, 1, 2, 4]), np.array([1.0, 9.0, 2.0, 1.0]), 5)
        assert weeds_precision(q, p) == pytest.approx(1.0)

    def test_invcl_hand_value(self):
        got = invcl(dense([2, 2]), dense([1, 3]))
        assert got == pytest.approx(math.sqrt(0.75 * 0.25), abs=1e-12)

    def test_bounds(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            q, p = random_sparse(rng), random_sparse(rng)
            for fn in (cde, weeds_precision, invcl):
                assert -1e-12 <= fn(q, p) <= 1 + 1e-12


class TestAl1:
    def test_identical_distributions_zero(self):
        v = dense([0.25, 0.5, 0.25])
        assert al1_distance(v, v) == pytest.approx(0.0, abs=1e-12)

    def test_disjoint_case(self):
        assert al1_distance(dense([0, 1]), dense([1, 0]), 5.0) == pytest.approx(1.0)

    def test_half_overlap_case(self):
        # Here the mismatch is minimized at half scale.
        assert al1_distance(dense([1, 0]), dense([0.5, 0.5]), 5.0) == pytest.approx(0.5)

    def test_greedy_matches_breakpoint_oracle(self):
        rng = np.random.default_rng(6)
        for _ in range(300):
            q, p = random_sparse(rng), random_sparse(rng)
            w0 = float(rng.choice([1.0, 5.0, 20.0]))
            greedy = al1_distance(q, p, w0)
            oracle = al1_breakpoint_oracle(q, p, w0)
            assert greedy == pytest.approx(oracle, abs=1e-9)

    def test_nonnegative_and_l1_bound(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            q, p = random_sparse(rng), random_sparse(rng)
            d = al1_distance(q, p, 1.0)
            assert d >= -1e-12
            d_q = np.zeros(q.dim)
            d_q[q.indices] = q.values / q.values.sum()
            d_p = np.zeros(p.dim)
            d_p[p.indices] = p.values / p.values.sum()
            assert d <= np.abs(d_p - d_q).sum() + 1e-9


class TestSlqsSub:
    @pytest.fixture
    def fixture_space(self):
        mat = np.array(
            [
                [0, 2, 1, 0],
                [3, 0, 1, 1],
                [1, 1, 0, 0],
                [0, 4, 0, 0],
            ],
            dtype=float,
        )
        vocab = Vocabulary(["w0", "w1", "w2", "w3"], np.array([4, 3, 2, 1]))
        space = FeatureSpace(mat, 4, "freq")
        return vocab, make_source(space, vocab)

    @staticmethod
    def entropy_of(values):
        d = np.asarray(values, dtype=float)
        d = d / d.sum()
        d = d[d > 0]
        return float(-(d * np.log(d)).sum())

    def test_hand_computed_medians(self, fixture_space):
        vocab, source = fixture_space
        h_row = [
            self.entropy_of([2, 1]),
            self.entropy_of([3, 1, 1]),
            self.entropy_of([1, 1]),
            self.entropy_of([4]),
        ]
        q = source.vector("w2")
        p = source.vector("w0")
        # w0's top-2 contexts by value: 1 (2.0) then 2 (1.0).
        # w2's top-2 contexts: tie at 1.0 broken by id -> 0 then 1.
        expected = float(
            np.median([h_row[1], h_row[2]]) - np.median([h_row[0], h_row[1]])
        )
        got = slqs_sub(q, p, source, n_top=2)
        assert got == pytest.approx(expected, abs=1e-12)

    def test_identical_top_sets_zero(self, fixture_space):
        _, source = fixture_space
        v = source.vector("w0")
        assert slqs_sub(v, v, source, n_top=3) == pytest.approx(0.0, abs=1e-12)

    def test_single_top_context(self, fixture_space):
        vocab, source = fixture_space
        q = source.vector("w3")  # top context: 1
        p = source.vector("w0")  # top context: 1
        assert slqs_sub(q, p, source, n_top=1) == pytest.approx(0.0, abs=1e-12)


class TestScaleInvariance:
    def test_scale_invariant_scores(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            q, p = random_sparse(rng), random_sparse(rng)
            scale = float(rng.random() * 9 + 0.5)
            qs = WordVector(q.indices, q.values * scale, q.dim)
            ps = WordVector(p.indices, p.values * scale, p.dim)
            assert cosine(qs, ps) == pytest.approx(cosine(q, p), abs=1e-9)
            assert cde(qs, ps) == pytest.approx(cde(q, p), abs=1e-9)
            assert weeds_precision(qs, ps) == pytest.approx(
                weeds_precision(q, p), abs=1e-9
            )
            assert invcl(qs, ps) == pytest.approx(invcl(q, p), abs=1e-9)
            assert al1_distance(qs, ps) == pytest.approx(al1_distance(q, p), abs=1e-9)

    def test_norm_diffs_scale_linearly(self):
        rng = np.random.default_rng(9)
        q, p = random_sparse(rng), random_sparse(rng)
        scale = 3.5
        qs = WordVector(q.indices, q.values * scale, q.dim)
        ps = WordVector(p.indices, p.values * scale, p.dim)
        assert sum_diff(qs, ps) == pytest.approx(scale * sum_diff(q, p), abs=1e-9)
        assert norm2_diff(qs, ps) == pytest.approx(scale * norm2_diff(q, p), abs=1e-9)


class TestRandomScore:
    def test_deterministic_per_pair_and_seed(self):
        a = random_score(["dog"], ["animal"], seed=5)
        b = random_score(["dog"], ["animal"], seed=5)
        assert a == b
        assert 0.0 <= a < 1.0

    def test_different_seeds_differ(self):
        values = {random_score(["dog"], ["animal"], seed=s) for s in range(20)}
        assert len(values) == 20

    def test_pair_order_matters(self):
        assert random_score(["a"], ["b"], seed=1) != random_score(["b"], ["a"], seed=1)


class TestPairScorer:
    @pytest.fixture
    def setup(self):
        vocab = Vocabulary(["pet", "dog", "cat"], np.array([6, 4, 2]))
        mat = np.array(
            [
                [2.0, 2.0, 2.0],
                [2.0, 1.0, 0.0],
                [1.0, 0.0, 1.0],
            ]
        )
        space = FeatureSpace(mat, 3, "freq")
        sgns = Embedding(
            np.array([[1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]),
            None,
            kind="sgns",
            hyper={},
        )
        return vocab, space, sgns

    def test_registry_covers_required_names(self):
        assert SCORER_NAMES == (
            "cosine",
            "word2vec",
            "dS",
            "dQ",
            "dE",
            "slqs_sub",
            "cde",
            "weeds",
            "invcl",
            "al1",
            "CdS",
            "CdQ",
            "CdE",
            "WdS",
            "WdQ",
            "WdE",
            "random",
        )

    def test_ds_through_scorer(self, setup):
        vocab, space, _ = setup
        scorer = PairScorer("dS", make_source(space, vocab))
        assert scorer.score(["dog"], ["pet"]) == pytest.approx(3.0)

    def test_al1_negated_for_ranking(self, setup):
        vocab, space, _ = setup
        source = make_source(space, vocab)
        scorer = PairScorer("al1", source)
        raw = al1_distance(source.vector("dog"), source.vector("pet"), 5.0)
        assert scorer.score(["dog"], ["pet"]) == pytest.approx(-raw)

    def test_combination_uses_product(self, setup):
        vocab, space, _ = setup
        source = make_source(space, vocab)
        scorer = PairScorer("CdS", source)
        expected = cosine(source.vector("dog"), source.vector("pet")) * 3.0
        assert scorer.score(["dog"], ["pet"]) == pytest.approx(expected)

    def test_word2vec_similarity_from_sgns(self, setup):
        vocab, space, sgns = setup
        scorer = PairScorer(
            "word2vec", make_source(space, vocab), sgns_source=make_source(sgns, vocab)
        )
        assert scorer.score(["dog"], ["pet"]) == pytest.approx(1 / math.sqrt(2))

    def test_wds_mixes_spaces(self, setup):
        vocab, space, sgns = setup
        scorer = PairScorer(
            "WdS", make_source(space, vocab), sgns_source=make_source(sgns, vocab)
        )
        assert scorer.score(["dog"], ["pet"]) == pytest.approx(3.0 / math.sqrt(2))

    def test_word2vec_without_sgns_rejected(self, setup):
        vocab, space, _ = setup
        with pytest.raises(ConfigError):
            PairScorer("word2vec", make_source(space, vocab))

    def test_oov_returns_none(self, setup):
        vocab, space, _ = setup
        scorer = PairScorer("cosine", make_source(space, vocab))
        assert scorer.score(["unicorn"], ["pet"]) is None

    def test_phrase_averaging(self, setup):
        vocab, space, _ = setup
        source = make_source(space, vocab)
        scorer = PairScorer("dS", source)
        # mean(dog, cat) has L1 norm (3 + 2) / 2 = 2.5; pet has 6.
        assert scorer.score(["dog", "cat"], ["pet"]) == pytest.approx(3.5)

    def test_phrase_with_partial_oov_uses_survivors(self, setup):
        vocab, space, _ = setup
        scorer = PairScorer("dS", make_source(space, vocab))
        assert scorer.score(["dog", "unicorn"], ["pet"]) == pytest.approx(3.0)

    def test_unknown_scorer_rejected(self, setup):
        vocab, space, _ = setup
        with pytest.raises(ConfigError):
            PairScorer("bogus", make_source(space, vocab))

    def test_random_scorer_through_registry(self, setup):
        vocab, space, _ = setup
        scorer = PairScorer("random", make_source(space, vocab), seed=9)
        first = scorer.score(["dog"], ["pet"])
        assert scorer.score(["dog"], ["pet"]) == first


class TestDenseSource:
    def test_embedding_rows_and_entropy(self):
        vocab = Vocabulary(["x", "y"], np.array([2, 1]))
        emb = Embedding(
            np.array([[0.0, 2.0], [1.0, 1.0]]), None, kind="dive", hyper={}
        )
        source = make_source(emb, vocab)
        vx = source.vector("x")
        assert vx.norm1 == pytest.approx(2.0)
        # Column 1 profile over words is (2, 1)/3.
        expected = -(2 / 3 * math.log(2 / 3) + 1 / 3 * math.log(1 / 3))
        assert source.context_entropy(1) == pytest.approx(expected, abs=1e-12)

    def test_all_zero_row_is_oov(self):
        vocab = Vocabulary(["x", "y"], np.array([2, 1]))
        emb = Embedding(np.array([[0.0, 0.0], [1.0, 1.0]]), None, kind="dive", hyper={})
        source = make_source(emb, vocab)
        assert source.vector("x") is None
