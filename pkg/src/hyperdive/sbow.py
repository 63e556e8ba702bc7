"""Sparse feature spaces over co-occurrence statistics.

Builders for the count, PPMI, and inclusion-shifted PPMI spaces, the PMI
filter that sparsifies statistics before training, and the topic-hashed
variant that clusters words in a skip-gram embedding space and pools counts
per cluster.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .cooccur import CoocStats
from .errors import ConfigError, ParseError

SPACE_MAGIC = "#hyperdive-space"
SPACE_KINDS = ("freq", "ppmi", "ppmi_is", "freq_nmf")


@dataclass
class FeatureSpace:
    """Per-word sparse non-negative feature vectors.

    ``matrix`` is CSR with canonical (sorted, deduplicated) indices; only
    strictly positive values are stored.  ``dims`` is the context vocabulary
    size, or the cluster count for the topic-hashed kind.
    """

    matrix: sp.csr_matrix
    dims: int
    kind: str

    def __post_init__(self):
        if self.kind not in SPACE_KINDS:
            raise ConfigError(f"unknown feature-space kind {self.kind!r}")
        matrix = sp.csr_matrix(self.matrix, dtype=np.float64)
        matrix.eliminate_zeros()
        matrix.sort_indices()
        self.matrix = matrix
        if matrix.shape[1] != self.dims:
            raise ConfigError("matrix width does not match dims")

    @property
    def n_words(self):
        return self.matrix.shape[0]

    def row(self, w):
        """Sorted (context ids, values) of word ``w``'s stored features."""
        start, stop = self.matrix.indptr[w], self.matrix.indptr[w + 1]
        return self.matrix.indices[start:stop], self.matrix.data[start:stop]

    def save(self, path, vocab):
        if len(vocab) != self.n_words:
            raise ConfigError("vocabulary size does not match feature space")
        words = vocab.words
        by_name = self.kind != "freq_nmf"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{SPACE_MAGIC}\tv1\n")
            fh.write(f"#kind\t{self.kind}\n")
            fh.write(f"#dims\t{self.dims}\n")
            for w in range(self.n_words):
                indices, values = self.row(w)
                for c, v in zip(indices, values):
                    label = words[c] if by_name else str(int(c))
                    fh.write(f"{words[w]}\t{label}\t{float(v)!r}\n")

    @classmethod
    def load(cls, path, vocab):
        header = {}
        rows, cols, data = [], [], []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if line.startswith("#"):
                    header[parts[0]] = parts[1:]
                    continue
                if len(parts) != 3:
                    raise ParseError("expected 'word<TAB>context<TAB>value'", line=lineno)
                w = vocab.get(parts[0])
                if w is None:
                    raise ParseError(f"unknown word {parts[0]!r}", line=lineno)
                kind = header.get("#kind", ["?"])[0]
                if kind == "freq_nmf":
                    try:
                        c = int(parts[1])
                    except ValueError:
                        raise ParseError(
                            f"bad topic id {parts[1]!r}", line=lineno
                        ) from None
                else:
                    c = vocab.get(parts[1])
                    if c is None:
                        raise ParseError(f"unknown context {parts[1]!r}", line=lineno)
                try:
                    value = float(parts[2])
                except ValueError:
                    raise ParseError(f"bad value {parts[2]!r}", line=lineno) from None
                rows.append(w)
                cols.append(c)
                data.append(value)
        try:
            kind = header["#kind"][0]
            dims = int(header["#dims"][0])
        except (KeyError, IndexError, ValueError):
            raise ParseError(f"{path}: missing or malformed header block") from None
        matrix = sp.coo_matrix(
            (data, (rows, cols)), shape=(len(vocab), dims), dtype=np.float64
        ).tocsr()
        return cls(matrix, dims, kind)


def pmi_filter(stats, threshold_ratio):
    """Zero out pairs whose PMI falls below log(threshold_ratio).

    Marginals and the pair total are recomputed from the surviving pairs so
    training weights reflect the filtered counts; ``avg_freq`` and
    ``vocab_size`` keep their corpus-level (pre-filter) values so objective
    constants stay tied to the corpus.
    """
    if threshold_ratio < 1:
        raise ConfigError("PMI filter ratio must be >= 1")
    coo = stats.pairs.tocoo()
    if coo.nnz == 0:
        return CoocStats(stats.pairs.copy(), stats.vocab_size, stats.window, stats.avg_freq)
    ratio = (
        coo.data.astype(np.float64)
        * stats.total
        / (
            stats.word_marginal[coo.row].astype(np.float64)
            * stats.context_marginal[coo.col]
        )
    )
    keep = np.log(ratio) >= np.log(threshold_ratio)
    filtered = sp.coo_matrix(
        (coo.data[keep], (coo.row[keep], coo.col[keep])),
        shape=stats.pairs.shape,
    ).tocsr()
    return CoocStats(filtered, stats.vocab_size, stats.window, stats.avg_freq)


def build_freq(stats):
    """Feature space of raw neighbour counts: rows[w][c] = #(w,c)."""
    return FeatureSpace(stats.pairs.astype(np.float64), stats.vocab_size, "freq")


def _positive_log_space(stats, ratio, kind):
    coo = stats.pairs.tocoo()
    values = np.log(ratio) if coo.nnz else ratio
    keep = values > 0
    matrix = sp.coo_matrix(
        (values[keep], (coo.row[keep], coo.col[keep])),
        shape=stats.pairs.shape,
        dtype=np.float64,
    ).tocsr()
    return FeatureSpace(matrix, stats.vocab_size, kind)


def build_ppmi(stats):
    """Positive PMI space: rows[w][c] = max(PMI(w,c), 0)."""
    coo = stats.pairs.tocoo()
    ratio = (
        coo.data.astype(np.float64)
        * stats.total
        / (
            stats.word_marginal[coo.row].astype(np.float64)
            * stats.context_marginal[coo.col]
        )
    )
    return _positive_log_space(stats, ratio, "ppmi")


def build_ppmi_is(stats):
    """Inclusion-shifted PPMI space: rows[w][c] = max(log(#(w,c)·|V|/#(c)), 0).

    Dropping the word marginal from the denominator makes unclipped values
    order exactly as the raw counts do within each context column, which is
    what lets vector magnitudes track generality.
    """
    coo = stats.pairs.tocoo()
    ratio = (
        coo.data.astype(np.float64)
        * stats.vocab_size
        / stats.context_marginal[coo.col].astype(np.float64)
    )
    return _positive_log_space(stats, ratio, "ppmi_is")


def _kmeanspp_init(points, n_clusters, rng):
    n = points.shape[0]
    centers = np.empty((n_clusters, points.shape[1]), dtype=np.float64)
    centers[0] = points[rng.integers(n)]
    closest = ((points - centers[0]) ** 2).sum(axis=1)
    for k in range(1, n_clusters):
        total = closest.sum()
        if total > 0:
            draw = rng.random() * total
            idx = int(np.searchsorted(np.cumsum(closest), draw))
            idx = min(idx, n - 1)
        else:
            idx = int(rng.integers(n))
        centers[k] = points[idx]
        closest = np.minimum(closest, ((points - centers[k]) ** 2).sum(axis=1))
    return centers


def _assign(points, centers):
    # argmin over squared distances, computed blockwise to bound memory
    n = points.shape[0]
    out = np.empty(n, dtype=np.int64)
    sq_centers = (centers**2).sum(axis=1)
    step = max(1, 4_000_000 // max(1, centers.shape[0]))
    for start in range(0, n, step):
        block = points[start : start + step]
        dists = sq_centers[None, :] - 2.0 * (block @ centers.T)
        out[start : start + step] = np.argmin(dists, axis=1)
    return out


def minibatch_kmeans(points, n_clusters, seed, batch_size=1024, iterations=100):
    """Mini-batch k-means with per-sample center updates.

    Greedy distance-weighted seeding, then ``iterations`` mini-batches; each
    batch point pulls its nearest center toward it with step 1/(times that
    center has been updated).  Empty clusters in the final assignment are
    reseeded from random points and assignment is redone.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if n_clusters < 1:
        raise ConfigError("cluster count must be >= 1")
    if n == 0:
        raise ConfigError("cannot cluster an empty point set")
    rng = np.random.default_rng(seed)
    if n_clusters >= n:
        centers = points[np.arange(n_clusters) % n].copy()
        return centers, _assign(points, centers)
    centers = _kmeanspp_init(points, n_clusters, rng)
    counts = np.zeros(n_clusters, dtype=np.int64)
    for _ in range(iterations):
        batch = rng.integers(0, n, size=min(batch_size, n))
        nearest = _assign(points[batch], centers)
        for i, k in zip(batch, nearest):
            counts[k] += 1
            eta = 1.0 / counts[k]
            centers[k] += eta * (points[i] - centers[k])
    assignment = _assign(points, centers)
    for _ in range(n_clusters):
        sizes = np.bincount(assignment, minlength=n_clusters)
        empty = np.nonzero(sizes == 0)[0]
        if empty.size == 0:
            break
        for k in empty:
            centers[k] = points[rng.integers(n)]
        assignment = _assign(points, centers)
    return centers, assignment


def hash_counts_by_cluster(stats, assignment, n_clusters):
    """Pool each word's counts by its contexts' cluster ids."""
    assignment = np.asarray(assignment)
    if assignment.shape != (stats.vocab_size,):
        raise ConfigError("assignment must label every vocabulary word")
    indicator = sp.csr_matrix(
        (
            np.ones(stats.vocab_size, dtype=np.int64),
            (np.arange(stats.vocab_size), assignment),
        ),
        shape=(stats.vocab_size, n_clusters),
    )
    pooled = (stats.pairs @ indicator).astype(np.float64)
    return FeatureSpace(pooled, n_clusters, "freq_nmf")


def kmeans_freq_nmf(skipgram, stats, n_clusters, seed):
    """Cluster words in skip-gram space and pool co-occurrence counts by topic."""
    points = getattr(skipgram, "word_vecs", skipgram)
    points = np.asarray(points, dtype=np.float64)
    if points.shape[0] != stats.vocab_size:
        raise ConfigError("embedding must cover the vocabulary")
    _, assignment = minibatch_kmeans(points, n_clusters, seed)
    return hash_counts_by_cluster(stats, assignment, n_clusters)
