"""Unsupervised hypernymy scoring over sparse feature spaces and embeddings.

A scorer assigns a real number to an ordered candidate pair (query, hypernym
candidate); higher means "more likely a hypernym of the query".  Scorers are
built from similarity measures (cosine), generality measures (differences of
norms or entropies), inclusion measures (context-overlap ratios), and products
of a similarity with a generality measure.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse as sp

from .errors import ConfigError
from .sbow import FeatureSpace
from .trainer import Embedding

#: Names accepted by :class:`PairScorer`.
SCORER_NAMES = (
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

#: Scorers whose similarity part comes from a separate skip-gram embedding.
NEEDS_SGNS = frozenset({"word2vec", "WdS", "WdQ", "WdE"})


@dataclass
class WordVector:
    """A sparse feature vector: sorted coordinate ids with their values."""

    indices: np.ndarray
    values: np.ndarray
    dim: int
    norm1: float = field(init=False)
    norm2: float = field(init=False)

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.indices.shape != self.values.shape:
            raise ValueError("indices and values must have matching shapes")
        self.norm1 = float(np.abs(self.values).sum())
        self.norm2 = float(np.sqrt((self.values * self.values).sum()))

    @classmethod
    def from_dense(cls, arr: np.ndarray) -> "WordVector":
        arr = np.asarray(arr, dtype=np.float64)
        idx = np.flatnonzero(arr)
        return cls(idx.astype(np.int64), arr[idx], arr.size)

    @property
    def is_zero(self) -> bool:
        return self.values.size == 0 or not np.any(self.values)


def mean_vectors(vecs: list[WordVector]) -> WordVector:
    """Coordinate-wise average, used to represent multi-word phrases."""
    if not vecs:
        raise ValueError("cannot average zero vectors")
    if len(vecs) == 1:
        return vecs[0]
    idx = np.concatenate([v.indices for v in vecs])
    vals = np.concatenate([v.values for v in vecs])
    uniq, inverse = np.unique(idx, return_inverse=True)
    acc = np.zeros(uniq.size)
    np.add.at(acc, inverse, vals)
    acc /= len(vecs)
    keep = acc != 0
    return WordVector(uniq[keep], acc[keep], vecs[0].dim)


def _sparse_dot(u: WordVector, v: WordVector) -> float:
    _, ia, ib = np.intersect1d(
        u.indices, v.indices, assume_unique=True, return_indices=True
    )
    if ia.size == 0:
        return 0.0
    return float(u.values[ia] @ v.values[ib])


def _entropy(values: np.ndarray) -> float:
    pos = values[values > 0]
    total = pos.sum()
    if total <= 0:
        return 0.0
    d = pos / total
    return float(-(d * np.log(d)).sum())


def cosine(u: WordVector, v: WordVector) -> float:
    """Cosine similarity; zero when either vector has no mass."""
    if u.norm2 == 0.0 or v.norm2 == 0.0:
        return 0.0
    return _sparse_dot(u, v) / (u.norm2 * v.norm2)


def sum_diff(q: WordVector, p: WordVector) -> float:
    """L1-norm generality gap: positive when the candidate is broader."""
    return p.norm1 - q.norm1


def norm2_diff(q: WordVector, p: WordVector) -> float:
    """L2-norm generality gap."""
    return p.norm2 - q.norm2


def entropy_diff(q: WordVector, p: WordVector) -> float:
    """Entropy gap of the normalized feature distributions."""
    return _entropy(p.values) - _entropy(q.values)


def cde(q: WordVector, p: WordVector) -> float:
    """Context distribution inclusion: overlapping mass over query mass."""
    _, ia, ib = np.intersect1d(
        q.indices, p.indices, assume_unique=True, return_indices=True
    )
    if q.norm1 == 0.0:
        return 0.0
    if ia.size == 0:
        return 0.0
    return float(np.minimum(q.values[ia], p.values[ib]).sum()) / q.norm1


def weeds_precision(q: WordVector, p: WordVector) -> float:
    """Fraction of the query's mass that falls on the candidate's support."""
    if q.norm1 == 0.0:
        return 0.0
    _, ia, ib = np.intersect1d(
        q.indices, p.indices, assume_unique=True, return_indices=True
    )
    if ia.size == 0:
        return 0.0
    covered = q.values[ia][p.values[ib] > 0]
    return float(covered.sum()) / q.norm1


def invcl(q: WordVector, p: WordVector) -> float:
    """Balanced inclusion: rewards q included in p but not the reverse."""
    return float(np.sqrt(cde(q, p) * max(0.0, 1.0 - cde(p, q))))


def al1_distance(q: WordVector, p: WordVector, penalty_weight: float = 5.0) -> float:
    """Asymmetric L1 distance between normalized feature distributions.

    Measures the cheapest way to cover the candidate distribution with a
    scaled-down copy of the query distribution, where overshooting costs
    ``penalty_weight`` per unit and undershooting costs one per unit.  The
    minimization over the scale has a closed-form greedy solution: fund
    coordinates in increasing order of candidate-to-query ratio, each with
    capacity ``(penalty_weight + 1)`` times its query mass, until one unit of
    budget is spent.

    Returns a distance (lower means the candidate covers the query better);
    callers that need a score rank by its negation.
    """
    d_q = q.values / q.values.sum()
    # Project the candidate's distribution onto the query's support.
    d_p_on_q = np.zeros(q.indices.size)
    _, ia, ib = np.intersect1d(
        q.indices, p.indices, assume_unique=True, return_indices=True
    )
    d_p_full = p.values / p.values.sum()
    d_p_on_q[ia] = d_p_full[ib]

    ratios = d_p_on_q / d_q
    order = np.argsort(ratios, kind="stable")
    caps = (penalty_weight + 1.0) * d_q[order]
    r_ord = ratios[order]
    cum = np.cumsum(caps)
    cut = int(np.searchsorted(cum, 1.0, side="left"))
    cost = float((caps[:cut] * r_ord[:cut]).sum())
    if cut < caps.size:
        prev = float(cum[cut - 1]) if cut > 0 else 0.0
        cost += (1.0 - prev) * float(r_ord[cut])
    return 1.0 - cost


def slqs_sub(q: WordVector, p: WordVector, source, n_top: int = 100) -> float:
    """Difference in median entropy of each word's strongest contexts.

    For each word, take its ``n_top`` contexts by feature value (ties broken
    by context id) and the median of their context entropies, as provided by
    ``source.context_entropy``.  Returns candidate minus query: positive when
    the candidate keeps more informative company.
    """

    def median_entropy(vec: WordVector) -> float:
        order = np.lexsort((vec.indices, -vec.values))
        top = vec.indices[order[:n_top]]
        ents = np.array([source.context_entropy(int(c)) for c in top])
        return float(np.median(ents))

    return median_entropy(p) - median_entropy(q)


def random_score(q_words, p_words, seed: int = 0) -> float:
    """Deterministic pseudo-random baseline score in [0, 1)."""
    key = " ".join(q_words) + "\t" + " ".join(p_words) + "\t" + str(int(seed))
    digest = hashlib.blake2b(key.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") / 2.0**64


def _profile_entropies(matrix, axis: int) -> np.ndarray:
    """Entropy of each row (axis=1) or column (axis=0) normalized profile."""
    if sp.issparse(matrix):
        data = matrix.data
        logs = np.zeros_like(data)
        np.log(data, where=data > 0, out=logs)
        weighted = matrix.copy()
        weighted.data = data * logs
        s1 = np.asarray(matrix.sum(axis=axis)).ravel()
        s2 = np.asarray(weighted.sum(axis=axis)).ravel()
    else:
        pos = np.clip(matrix, 0.0, None)
        logs = np.zeros_like(pos)
        np.log(pos, where=pos > 0, out=logs)
        s1 = pos.sum(axis=axis)
        s2 = (pos * logs).sum(axis=axis)
    out = np.zeros_like(s1, dtype=np.float64)
    mask = s1 > 0
    out[mask] = np.log(s1[mask]) - s2[mask] / s1[mask]
    return out


class _Source:
    """Word lookup plus context-entropy access for one vector space."""

    def __init__(self, vocab):
        self.vocab = vocab
        self._entropies = None

    def vector(self, word: str) -> WordVector | None:
        idx = self.vocab.get(word)
        if idx is None:
            return None
        vec = self._row(idx)
        if vec is None or vec.is_zero:
            return None
        return vec

    def phrase(self, words) -> WordVector | None:
        vecs = [v for v in (self.vector(w) for w in words) if v is not None]
        if not vecs:
            return None
        return mean_vectors(vecs)

    def context_entropy(self, context_id: int) -> float:
        if self._entropies is None:
            self._entropies = self._compute_entropies()
        return float(self._entropies[context_id])

    def _row(self, idx: int) -> WordVector | None:
        raise NotImplementedError

    def _compute_entropies(self) -> np.ndarray:
        raise NotImplementedError


class SparseSource(_Source):
    """Rows of a sparse word-context space."""

    def __init__(self, space: FeatureSpace, vocab):
        super().__init__(vocab)
        if space.matrix.shape[0] != len(vocab.words):
            raise ConfigError(
                "feature space has %d rows but vocabulary has %d words"
                % (space.matrix.shape[0], len(vocab.words))
            )
        self.space = space
        self.dims = space.dims
        # When contexts are themselves words, a context's profile is its own
        # row; otherwise (e.g. topic dimensions) use its column profile.
        self._square = (
            space.kind != "freq_nmf" and space.matrix.shape[0] == space.dims
        )

    def _row(self, idx: int) -> WordVector | None:
        indices, values = self.space.row(idx)
        if indices.size == 0:
            return None
        return WordVector(indices, values, self.dims)

    def _compute_entropies(self) -> np.ndarray:
        axis = 1 if self._square else 0
        return _profile_entropies(self.space.matrix, axis)


class DenseSource(_Source):
    """Rows of a dense embedding table."""

    def __init__(self, embedding: Embedding, vocab):
        super().__init__(vocab)
        if embedding.word_vecs.shape[0] != len(vocab.words):
            raise ConfigError(
                "embedding has %d rows but vocabulary has %d words"
                % (embedding.word_vecs.shape[0], len(vocab.words))
            )
        self.embedding = embedding
        self.dims = embedding.word_vecs.shape[1]

    def _row(self, idx: int) -> WordVector | None:
        vec = WordVector.from_dense(self.embedding.word_vecs[idx])
        if vec.values.size == 0:
            return None
        return vec

    def _compute_entropies(self) -> np.ndarray:
        return _profile_entropies(self.embedding.word_vecs, 0)


def make_source(space, vocab) -> _Source:
    """Wrap a feature space or embedding for word-level vector lookup."""
    if isinstance(space, FeatureSpace):
        return SparseSource(space, vocab)
    if isinstance(space, Embedding):
        return DenseSource(space, vocab)
    raise ConfigError(f"cannot score over object of type {type(space).__name__}")


_GENERALITY = {"dS": sum_diff, "dQ": norm2_diff, "dE": entropy_diff}


class PairScorer:
    """Scores ordered (query, candidate) pairs by a named measure.

    ``source`` provides the feature vectors; scorers whose similarity part
    comes from a skip-gram embedding also need ``sgns_source``.  Phrases are
    represented by the average of their in-vocabulary member vectors.  Returns
    ``None`` when a side of the pair cannot be resolved in a required space.
    """

    def __init__(
        self,
        name: str,
        source: _Source,
        sgns_source: _Source | None = None,
        seed: int = 0,
        penalty_weight: float = 5.0,
        top_contexts: int = 100,
    ):
        if name not in SCORER_NAMES:
            raise ConfigError(
                f"unknown scorer {name!r}; expected one of {', '.join(SCORER_NAMES)}"
            )
        if name in NEEDS_SGNS and sgns_source is None:
            raise ConfigError(f"scorer {name!r} needs a skip-gram embedding")
        self.name = name
        self.source = source
        self.sgns_source = sgns_source
        self.seed = seed
        self.penalty_weight = penalty_weight
        self.top_contexts = top_contexts

    def score(self, q_words, p_words) -> float | None:
        name = self.name
        if name == "random":
            return random_score(q_words, p_words, self.seed)

        if name == "word2vec":
            q = self.sgns_source.phrase(q_words)
            p = self.sgns_source.phrase(p_words)
            if q is None or p is None:
                return None
            return cosine(q, p)

        q = self.source.phrase(q_words)
        p = self.source.phrase(p_words)
        if q is None or p is None:
            return None

        if name == "cosine":
            return cosine(q, p)
        if name in _GENERALITY:
            return _GENERALITY[name](q, p)
        if name == "slqs_sub":
            return slqs_sub(q, p, self.source, self.top_contexts)
        if name == "cde":
            return cde(q, p)
        if name == "weeds":
            return weeds_precision(q, p)
        if name == "invcl":
            return invcl(q, p)
        if name == "al1":
            return -al1_distance(q, p, self.penalty_weight)

        generality = _GENERALITY[name[1:]](q, p)
        if name.startswith("C"):
            return cosine(q, p) * generality
        qs = self.sgns_source.phrase(q_words)
        ps = self.sgns_source.phrase(p_words)
        if qs is None or ps is None:
            return None
        return cosine(qs, ps) * generality
