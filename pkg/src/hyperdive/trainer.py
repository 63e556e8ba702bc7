"""Sampled stochastic-ascent trainers for the two embedding kinds.

``dive`` factorizes the inclusion-shifted PMI matrix under a non-negativity
constraint: each epoch visits every co-occurrence pair with its count as
multiplicity, draws negatives from the *unsmoothed* context distribution at a
per-word rate chosen so every word receives the same expected negative mass,
and clips parameters at zero after each ADAM step.

``sgns`` is standard skip-gram with negative sampling: a fixed number of
negatives per positive from the 0.75-smoothed distribution, no constraint.

The epoch inner loop runs in a compiled extension when available and in a
vectorized numpy fallback otherwise; both are deterministic under a fixed
seed, but they are not bit-identical to each other.
"""

import math
import sys
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from . import _train_numpy
from .errors import ConfigError, ParseError, TrainingError

try:
    from . import _train_inner

    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - depends on build environment
    _train_inner = None
    HAVE_COMPILED = False

EMBEDDING_KINDS = ("dive", "sgns")


@dataclass
class TrainConfig:
    """Training hyperparameters (defaults are the pipeline defaults)."""

    dim: int = 100
    epochs: int = 15
    lr: float = 0.001
    batch_size: int = 128
    neg_ratio: float = 1.5
    neg_samples: int = 5
    debug: bool = False

    def validate(self):
        if self.dim < 1:
            raise ConfigError("embedding dimension must be >= 1")
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.lr <= 0:
            raise ConfigError("learning rate must be > 0")
        if self.batch_size < 1:
            raise ConfigError("batch size must be >= 1")
        if self.neg_ratio < 0:
            raise ConfigError("negative ratio must be >= 0")
        if self.neg_samples < 0:
            raise ConfigError("negative sample count must be >= 0")


@dataclass
class Embedding:
    """Dense word (and optionally context) vectors plus training metadata."""

    word_vecs: np.ndarray
    ctx_vecs: object
    kind: str
    hyper: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in EMBEDDING_KINDS:
            raise ConfigError(f"unknown embedding kind {self.kind!r}")
        self.word_vecs = np.ascontiguousarray(self.word_vecs, dtype=np.float64)
        if self.ctx_vecs is not None:
            self.ctx_vecs = np.ascontiguousarray(self.ctx_vecs, dtype=np.float64)

    @property
    def n_words(self):
        return self.word_vecs.shape[0]

    @property
    def dim(self):
        return self.word_vecs.shape[1]

    def save(self, path, vocab):
        """Write the word-vector table: a header line, then one word per line.

        Values use full-precision decimal representation, so re-reading the
        file reproduces the exact float bits.  Context vectors are a training
        byproduct and are not part of the interchange format.
        """
        if len(vocab) != self.n_words:
            raise ConfigError("vocabulary size does not match embedding")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{self.n_words} {self.dim} {self.kind}\n")
            for w, word in enumerate(vocab.words):
                values = " ".join(repr(float(v)) for v in self.word_vecs[w])
                fh.write(f"{word} {values}\n")

    @classmethod
    def load(cls, path, vocab):
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().split()
            if len(header) != 3:
                raise ParseError("expected header '<vocab_size> <dim> <kind>'", line=1)
            try:
                n, dim = int(header[0]), int(header[1])
            except ValueError:
                raise ParseError("bad header counts", line=1) from None
            kind = header[2]
            if kind not in EMBEDDING_KINDS:
                raise ParseError(f"unknown embedding kind {kind!r}", line=1)
            if n != len(vocab):
                raise ParseError(
                    f"embedding covers {n} words but vocabulary has {len(vocab)}", line=1
                )
            vecs = np.empty((n, dim), dtype=np.float64)
            seen = 0
            for lineno, line in enumerate(fh, 2):
                parts = line.split()
                if not parts:
                    continue
                idx = vocab.get(parts[0])
                if idx is None:
                    raise ParseError(f"unknown word {parts[0]!r}", line=lineno)
                if len(parts) != dim + 1:
                    raise ParseError(
                        f"expected {dim} values for {parts[0]!r}", line=lineno
                    )
                vecs[idx] = [float(v) for v in parts[1:]]
                seen += 1
            if seen != n:
                raise ParseError(f"file lists {seen} words, header says {n}")
        return cls(vecs, None, kind=kind)


class NegativeSampler:
    """Seedable categorical sampler over the context distribution."""

    def __init__(self, weights):
        weights = np.asarray(weights, dtype=np.float64)
        if weights.ndim != 1 or weights.size == 0:
            raise ConfigError("sampler needs a 1-D non-empty weight vector")
        if (weights < 0).any():
            raise ConfigError("sampler weights must be non-negative")
        total = weights.sum()
        if total <= 0:
            raise ConfigError("sampler weights sum to zero")
        self.probs = weights / total
        self.cumulative = np.cumsum(self.probs)
        self.cumulative[-1] = 1.0

    def draw(self, rng, n):
        """Draw ``n`` ids by inverse-CDF lookup (binary search per draw)."""
        return np.searchsorted(self.cumulative, rng.random(n), side="right").astype(
            np.int64
        )


def stochastic_round(values, rng):
    """Unbiased integer rounding: floor plus a Bernoulli on the fraction."""
    values = np.asarray(values, dtype=np.float64)
    base = np.floor(values)
    return base.astype(np.int64) + (rng.random(values.shape) < values - base)


def init_embedding(kind, size, dim, rng):
    """Initial parameter draw; non-negative start for the constrained kind."""
    if kind == "dive":
        scale = 0.5 / math.sqrt(dim)
        word = rng.random((size, dim)) * scale
        ctx = rng.random((size, dim)) * scale
    else:
        span = 1.0 / dim
        word = (rng.random((size, dim)) - 0.5) * span
        ctx = (rng.random((size, dim)) - 0.5) * span
    return word, ctx


def check_finite(arr, where):
    if not np.isfinite(arr).all():
        raise TrainingError(f"non-finite values in {where}")


def objective_value(emb, stats, neg_ratio):
    """Exact full-batch objective the sampled trainer ascends (test utility).

    Positive part: sum over pairs of count * log-sigmoid(word . context).
    Negative part: for each word with surviving pairs, the exact expectation
    of the sampled penalty — neg_ratio * avg_freq * sum over candidate
    contexts of their draw probability times log-sigmoid(-word . context).
    Quadratic in the vocabulary; test-scale only.
    """
    if stats.total == 0:
        return 0.0
    word_vecs, ctx_vecs = emb.word_vecs, emb.ctx_vecs
    scores = word_vecs @ ctx_vecs.T
    coo = stats.pairs.tocoo()
    positive = float(
        (coo.data * -np.logaddexp(0.0, -scores[coo.row, coo.col])).sum()
    )
    probs = stats.context_marginal / stats.total
    active = stats.word_marginal > 0
    negative = float(
        neg_ratio * stats.avg_freq * ((-np.logaddexp(0.0, scores[active])) @ probs).sum()
    )
    return positive + negative


def full_gradient(emb, stats, neg_ratio, w):
    """Exact gradient of :func:`objective_value` for word ``w``'s vector."""
    dim = emb.word_vecs.shape[1]
    if stats.word_marginal[w] == 0:
        return np.zeros(dim)
    word_vec = emb.word_vecs[w]
    ctx_vecs = emb.ctx_vecs
    start, stop = stats.pairs.indptr[w], stats.pairs.indptr[w + 1]
    cols = stats.pairs.indices[start:stop]
    counts = stats.pairs.data[start:stop]
    pos_x = ctx_vecs[cols] @ word_vec
    positive = (counts * expit(-pos_x)) @ ctx_vecs[cols]
    probs = stats.context_marginal / stats.total
    all_x = ctx_vecs @ word_vec
    negative = neg_ratio * stats.avg_freq * ((probs * expit(all_x)) @ ctx_vecs)
    return positive - negative


def _resolve_backend(name):
    if name is None:
        return _train_inner if HAVE_COMPILED else _train_numpy
    if name in ("compiled", "cython"):
        if not HAVE_COMPILED:
            raise ConfigError("compiled training backend is not available")
        return _train_inner
    if name == "numpy":
        return _train_numpy
    raise ConfigError(f"unknown training backend {name!r}")


def backend_name():
    return "compiled" if HAVE_COMPILED else "numpy"


def _materialize_occurrences(stats):
    coo = stats.pairs.tocoo()
    occ_w = np.repeat(coo.row.astype(np.int32), coo.data)
    occ_c = np.repeat(coo.col.astype(np.int32), coo.data)
    return occ_w, occ_c


def _train(stats, config, seed, kind, backend, progress):
    config = config if config is not None else TrainConfig()
    config.validate()
    if stats.total == 0:
        raise ConfigError("no co-occurrence pairs to train on")
    impl = _resolve_backend(backend)
    size = stats.vocab_size
    rng = np.random.default_rng(seed)
    word_vecs, ctx_vecs = init_embedding(kind, size, config.dim, rng)
    m_w = np.zeros_like(word_vecs)
    v_w = np.zeros_like(word_vecs)
    m_c = np.zeros_like(ctx_vecs)
    v_c = np.zeros_like(ctx_vecs)
    occ_w, occ_c = _materialize_occurrences(stats)
    if kind == "dive":
        marginal = np.maximum(stats.word_marginal, 1).astype(np.float64)
        rate = np.where(
            stats.word_marginal > 0,
            config.neg_ratio * stats.avg_freq / marginal,
            0.0,
        )
        sampler = NegativeSampler(stats.context_marginal)
        project = 1
    else:
        rate = np.full(size, float(config.neg_samples))
        sampler = NegativeSampler(stats.context_marginal.astype(np.float64) ** 0.75)
        project = 0
    n_occ = occ_w.shape[0]
    step = 0
    for epoch in range(config.epochs):
        order = rng.permutation(n_occ).astype(np.int64)
        step, logsig_sum, err = impl.run_epoch(
            word_vecs,
            ctx_vecs,
            m_w,
            v_w,
            m_c,
            v_c,
            occ_w,
            occ_c,
            order,
            rate,
            sampler.cumulative,
            config.lr,
            config.batch_size,
            step,
            rng,
            project,
            1 if config.debug else 0,
        )
        if err == 1:
            raise TrainingError(
                f"non-finite parameters during epoch {epoch + 1}; "
                "reduce the learning rate"
            )
        if err == 2:
            raise TrainingError(
                f"negative entry survived projection during epoch {epoch + 1}"
            )
        check_finite(word_vecs, f"word vectors after epoch {epoch + 1}")
        check_finite(ctx_vecs, f"context vectors after epoch {epoch + 1}")
        if progress:
            print(
                f"[{kind}] epoch {epoch + 1}/{config.epochs} "
                f"avg positive log-sigmoid {logsig_sum / max(1, n_occ):.6f}",
                file=sys.stderr,
            )
    hyper = {
        "dim": config.dim,
        "epochs": config.epochs,
        "lr": config.lr,
        "batch_size": config.batch_size,
        "neg_ratio": config.neg_ratio,
        "neg_samples": config.neg_samples,
        "seed": seed,
    }
    return Embedding(word_vecs, ctx_vecs, kind=kind, hyper=hyper)


def train_dive(stats, config=None, seed=0, backend=None, progress=False):
    """Train the non-negative inclusion-preserving embedding.

    ``stats`` should normally be PMI-filtered first.  Negative draws come
    from the raw (unsmoothed) context distribution of ``stats``; each word's
    per-positive rate is neg_ratio * avg_freq / marginal, giving every word
    the same expected negative mass per epoch.
    """
    return _train(stats, config, seed, "dive", backend, progress)


def train_sgns(stats, config=None, seed=0, backend=None, progress=False):
    """Train standard skip-gram with negative sampling (unconstrained)."""
    return _train(stats, config, seed, "sgns", backend, progress)
