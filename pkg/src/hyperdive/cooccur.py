"""Windowed co-occurrence counting and pointwise mutual information.

Counts are collected inside token chunks only (windows never cross chunk
boundaries) and stored as a sparse integer matrix with exact row/column
marginals.  Counting is vectorized per window offset and is embarrassingly
parallel over chunk partitions: integer merges are associative, so the result
is independent of the thread count.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, ParseError

STATS_MAGIC = "#hyperdive-cooc"


def _normalize_window(window):
    if isinstance(window, tuple) or isinstance(window, list):
        if len(window) != 2:
            raise ConfigError("window pair must be (left, right)")
        left, right = int(window[0]), int(window[1])
    else:
        size = int(window)
        if size % 2 != 0:
            raise ConfigError(
                f"window {size} is odd; pass an even size or an explicit (left, right) pair"
            )
        left = right = size // 2
    if left < 0 or right < 0 or left + right == 0:
        raise ConfigError("window must cover at least one neighbour")
    return left, right


@dataclass
class CoocStats:
    """Sparse pair counts plus marginals and corpus-level constants.

    ``avg_freq`` is the average windowed frequency (total / vocab_size) at
    counting time.  PMI filtering recomputes the marginals and total from the
    surviving pairs but deliberately keeps ``avg_freq`` and ``vocab_size``
    from the unfiltered corpus, so the two can disagree on filtered objects.
    """

    pairs: sp.csr_matrix
    vocab_size: int
    window: tuple
    avg_freq: float
    word_marginal: np.ndarray = field(init=False)
    context_marginal: np.ndarray = field(init=False)
    total: int = field(init=False)

    def __post_init__(self):
        if self.pairs.shape != (self.vocab_size, self.vocab_size):
            raise ConfigError("pair-count matrix must be vocab_size x vocab_size")
        self.word_marginal = np.asarray(self.pairs.sum(axis=1)).ravel().astype(np.int64)
        self.context_marginal = (
            np.asarray(self.pairs.sum(axis=0)).ravel().astype(np.int64)
        )
        self.total = int(self.word_marginal.sum())

    @classmethod
    def from_pair_counts(cls, matrix, window, avg_freq=None):
        pairs = sp.csr_matrix(matrix, dtype=np.int64)
        pairs.eliminate_zeros()
        vocab_size = pairs.shape[0]
        if avg_freq is None:
            avg_freq = pairs.sum() / vocab_size
        return cls(pairs, vocab_size, _normalize_window(window), float(avg_freq))

    def pair_count(self, w, c):
        return int(self.pairs[w, c])

    def context_probability(self):
        """Distribution over contexts proportional to the context marginal."""
        if self.total == 0:
            raise ConfigError("no co-occurrence pairs; cannot form a distribution")
        return self.context_marginal / self.total

    def save(self, path, vocab):
        if len(vocab) != self.vocab_size:
            raise ConfigError("vocabulary size does not match statistics")
        coo = self.pairs.tocoo()
        order = np.lexsort((coo.col, coo.row))
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{STATS_MAGIC}\tv1\n")
            fh.write(f"#vocab_size\t{self.vocab_size}\n")
            fh.write(f"#total\t{self.total}\n")
            fh.write(f"#window\t{self.window[0]}\t{self.window[1]}\n")
            fh.write(f"#avg_freq\t{self.avg_freq!r}\n")
            words = vocab.words
            for i in order:
                fh.write(f"{words[coo.row[i]]}\t{words[coo.col[i]]}\t{coo.data[i]}\n")

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
                    raise ParseError("expected 'word<TAB>context<TAB>count'", line=lineno)
                w, c = vocab.get(parts[0]), vocab.get(parts[1])
                if w is None or c is None:
                    raise ParseError(
                        f"word pair ({parts[0]!r}, {parts[1]!r}) not in vocabulary",
                        line=lineno,
                    )
                try:
                    count = int(parts[2])
                except ValueError:
                    raise ParseError(f"bad count {parts[2]!r}", line=lineno) from None
                rows.append(w)
                cols.append(c)
                data.append(count)
        try:
            vocab_size = int(header["#vocab_size"][0])
            total = int(header["#total"][0])
            window = (int(header["#window"][0]), int(header["#window"][1]))
            avg_freq = float(header["#avg_freq"][0])
        except (KeyError, IndexError, ValueError):
            raise ParseError(f"{path}: missing or malformed header block") from None
        if vocab_size != len(vocab):
            raise ParseError(
                f"{path}: header vocab_size {vocab_size} != vocabulary size {len(vocab)}"
            )
        pairs = sp.coo_matrix(
            (np.asarray(data, dtype=np.int64), (rows, cols)),
            shape=(vocab_size, vocab_size),
        ).tocsr()
        stats = cls(pairs, vocab_size, window, avg_freq)
        if stats.total != total:
            raise ParseError(f"{path}: header total {total} != sum of pairs {stats.total}")
        return stats


def _count_partition(chunks, vocab, left, right):
    """Count one partition of chunks into a CSR matrix (exact integers)."""
    size = len(vocab)
    ids_parts = [vocab.encode(chunk) for chunk in chunks]
    if not ids_parts:
        return sp.csr_matrix((size, size), dtype=np.int64)
    ids = np.concatenate(ids_parts)
    chunk_of = np.repeat(
        np.arange(len(ids_parts), dtype=np.int64),
        [len(p) for p in ids_parts],
    )
    acc = sp.csr_matrix((size, size), dtype=np.int64)
    for offset in range(1, max(left, right) + 1):
        if offset >= len(ids):
            break
        same_chunk = chunk_of[:-offset] == chunk_of[offset:]
        lhs = ids[:-offset][same_chunk]
        rhs = ids[offset:][same_chunk]
        if lhs.size == 0:
            continue
        ones = np.ones(lhs.size, dtype=np.int64)
        if offset <= right:
            acc = acc + sp.coo_matrix((ones, (lhs, rhs)), shape=(size, size)).tocsr()
        if offset <= left:
            acc = acc + sp.coo_matrix((ones, (rhs, lhs)), shape=(size, size)).tocsr()
    return acc


def count_cooccurrences(stream, vocab, window, threads=1):
    """Count windowed (word, context) pairs within chunks.

    ``window`` is either an even total size (split half left, half right) or
    an explicit ``(left, right)`` pair.  Every stream token must already be in
    the vocabulary (rare-word removal happens upstream).
    """
    left, right = _normalize_window(window)
    if threads < 1:
        raise ConfigError("threads must be >= 1")
    chunks = stream.chunks
    if threads == 1 or len(chunks) < 2 * threads:
        acc = _count_partition(chunks, vocab, left, right)
    else:
        bounds = np.linspace(0, len(chunks), threads + 1, dtype=int)
        parts = [chunks[bounds[i] : bounds[i + 1]] for i in range(threads)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(
                pool.map(lambda p: _count_partition(p, vocab, left, right), parts)
            )
        acc = results[0]
        for extra in results[1:]:
            acc = acc + extra
    acc.eliminate_zeros()
    size = len(vocab)
    avg_freq = acc.sum() / size if size else 0.0
    return CoocStats(acc, size, (left, right), float(avg_freq))


def pmi(stats, w, c):
    """Pointwise mutual information log(P(w,c) / (P(w) P(c))), natural log.

    A zero pair count yields negative infinity (the sentinel is never stored
    in any sparse structure; positive-only builds clip it away).
    """
    joint = stats.pair_count(w, c)
    if joint == 0:
        return -math.inf
    return math.log(
        joint * stats.total / (stats.word_marginal[w] * stats.context_marginal[c])
    )
