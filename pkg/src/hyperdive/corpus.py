"""Corpus ingestion: tokenization, filtering, chunking, and the vocabulary.

The pipeline never does sentence segmentation; cleaned tokens are packed into
fixed-length chunks and downstream context windows never cross chunk
boundaries.  Rare-word removal is a separate pass (:func:`build_vocab`) so
that counts reflect exactly the token stream that will be windowed.
"""

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, IngestError, InternalError, ParseError
from .stopwords import ENGLISH_STOPWORDS

POS_SEPARATOR = "_"
DEFAULT_CHUNK_LENGTH = 100


@dataclass
class TokenStream:
    """A cleaned corpus: a sequence of chunks, each at most ``chunk_length`` tokens."""

    chunks: list
    chunk_length: int = DEFAULT_CHUNK_LENGTH

    def n_tokens(self):
        return sum(len(c) for c in self.chunks)

    def tokens(self):
        for chunk in self.chunks:
            yield from chunk

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for chunk in self.chunks:
                fh.write(" ".join(chunk))
                fh.write("\n")

    @classmethod
    def load(cls, path, chunk_length=DEFAULT_CHUNK_LENGTH):
        chunks = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                tokens = line.split()
                if tokens:
                    chunks.append(tokens)
        return cls(chunks, chunk_length)


@dataclass
class Vocabulary:
    """Distinct retained tokens with dense ids and raw occurrence counts.

    Ids are contiguous from 0 in order of decreasing count (ties broken
    alphabetically), so the mapping is reproducible regardless of input
    iteration order.
    """

    words: list
    counts: np.ndarray
    index: dict = field(init=False)

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        self.index = {w: i for i, w in enumerate(self.words)}
        if len(self.index) != len(self.words):
            raise InternalError("duplicate word in vocabulary")

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self.index

    def id(self, word):
        return self.index[word]

    def get(self, word):
        return self.index.get(word)

    def encode(self, tokens):
        """Map tokens to ids, raising if any token is unknown."""
        try:
            return np.fromiter(
                (self.index[t] for t in tokens), dtype=np.int32, count=len(tokens)
            )
        except KeyError as exc:
            raise InternalError(f"token not in vocabulary: {exc.args[0]!r}") from None

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for word, count in zip(self.words, self.counts):
                fh.write(f"{word}\t{count}\n")

    @classmethod
    def load(cls, path):
        words, counts = [], []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise ParseError("expected 'word<TAB>count'", line=lineno)
                try:
                    counts.append(int(parts[1]))
                except ValueError:
                    raise ParseError(f"bad count {parts[1]!r}", line=lineno) from None
                words.append(parts[0])
        return cls(words, np.asarray(counts, dtype=np.int64))


def clean_token(token):
    """Strip non-alphabetic edge characters; return None unless the remainder
    is purely alphabetic and non-empty."""
    start, end = 0, len(token)
    while start < end and not token[start].isalpha():
        start += 1
    while end > start and not token[end - 1].isalpha():
        end -= 1
    core = token[start:end]
    if core and core.isalpha():
        return core
    return None


def _iter_plain(lines, lowercase, stop):
    for lineno, line in enumerate(lines, 1):
        for raw in line.split():
            if lowercase:
                raw = raw.lower()
            word = clean_token(raw)
            if word is None or word in stop:
                continue
            yield word


def _iter_tagged(lines, lowercase, stop):
    # Accepts either "word_TAG" whitespace tokens or one "word<TAB>tag" pair
    # per line.  The stop word check applies to the surface word, and the
    # emitted token is word + separator + tag.
    for lineno, line in enumerate(lines, 1):
        stripped = line.rstrip("\n")
        if not stripped.strip():
            continue
        if "\t" in stripped:
            parts = stripped.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise ParseError("expected 'word<TAB>tag'", line=lineno)
            pairs = [(parts[0], parts[1])]
        else:
            pairs = []
            for raw in stripped.split():
                word, sep, tag = raw.rpartition(POS_SEPARATOR)
                if not sep or not word or not tag:
                    raise ParseError(
                        f"token {raw!r} is not a word{POS_SEPARATOR}TAG pair",
                        line=lineno,
                    )
                pairs.append((word, tag))
        for word, tag in pairs:
            if lowercase:
                word = word.lower()
            word = clean_token(word)
            if word is None or word in stop:
                continue
            yield word + POS_SEPARATOR + tag


def iter_clean_tokens(lines, lowercase=True, stopwords=None, pos_mode="off"):
    """Yield cleaned tokens from an iterable of text lines."""
    stop = ENGLISH_STOPWORDS if stopwords is None else stopwords
    if pos_mode == "off":
        return _iter_plain(lines, lowercase, stop)
    if pos_mode == "tagged":
        return _iter_tagged(lines, lowercase, stop)
    raise ConfigError(f"unknown pos_mode {pos_mode!r}")


def _chunked(tokens, chunk_length, max_tokens):
    chunks = []
    current = []
    n = 0
    for token in tokens:
        if max_tokens is not None and n >= max_tokens:
            break
        current.append(token)
        n += 1
        if len(current) == chunk_length:
            chunks.append(current)
            current = []
    if current:
        chunks.append(current)
    return chunks


def preprocess(
    text,
    lowercase=True,
    stopwords=None,
    chunk_length=DEFAULT_CHUNK_LENGTH,
    max_tokens=None,
    pos_mode="off",
):
    """Clean raw text into a :class:`TokenStream`.

    ``text`` may be a string, an open text file, or any iterable of lines.
    Tokens are lowercased, edge punctuation is stripped, and tokens that are
    not purely alphabetic (or are stop words) are dropped.  The surviving
    stream is truncated at ``max_tokens`` and packed into chunks of
    ``chunk_length``.
    """
    if chunk_length < 1:
        raise ConfigError("chunk_length must be >= 1")
    if max_tokens is not None and max_tokens < 0:
        raise ConfigError("max_tokens must be >= 0")
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise IngestError(f"input is not valid UTF-8: {exc}") from None
    if isinstance(text, str):
        lines = io.StringIO(text)
    else:
        lines = text
    tokens = iter_clean_tokens(
        lines, lowercase=lowercase, stopwords=stopwords, pos_mode=pos_mode
    )
    return TokenStream(_chunked(tokens, chunk_length, max_tokens), chunk_length)


def read_text(path):
    """Open ``path`` for streaming UTF-8 reads, failing fast on bad bytes."""
    try:
        return open(path, encoding="utf-8", errors="strict")
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from None


def count_tokens(stream):
    counts = {}
    for token in stream.tokens():
        counts[token] = counts.get(token, 0) + 1
    return counts


def build_vocab(stream, min_count):
    """Build the frequency-filtered vocabulary and re-emit the stream.

    Words occurring fewer than ``min_count`` times are removed, and their
    occurrences are deleted in place from each chunk (surviving neighbours
    become adjacent; chunk boundaries are kept).  Returns
    ``(vocabulary, filtered_stream)``.
    """
    if min_count < 1:
        raise ConfigError("min_count must be >= 1")
    counts = count_tokens(stream)
    kept = {w: c for w, c in counts.items() if c >= min_count}
    if not kept:
        raise ConfigError(
            f"no word occurs at least {min_count} times; vocabulary would be empty"
        )
    order = sorted(kept, key=lambda w: (-kept[w], w))
    vocab = Vocabulary(order, np.array([kept[w] for w in order], dtype=np.int64))
    if len(kept) == len(counts):
        filtered = stream
    else:
        chunks = []
        for chunk in stream.chunks:
            survivors = [t for t in chunk if t in kept]
            if survivors:
                chunks.append(survivors)
        filtered = TokenStream(chunks, stream.chunk_length)
    return vocab, filtered
