"""Synthetic taxonomy corpora with planted hypernym structure.

The generator samples a two-level concept tree (root, mid-level concepts,
leaves) and gives every concept a small set of exclusive "signature" context
words.  A concept's full context set is the union of the signature sets in
its subtree, so each child's set is a strict subset of its parent's — the
inclusion property that the scoring battery is meant to detect holds by
construction.

The corpus is emitted as fixed-length chunks, one concept per chunk.  The
concept token recurs at a fixed spacing wider than the default co-occurrence
half-window, so a concept never co-occurs with itself.  The remaining slots
are filled with signature words of the chunk's concept subtree plus abundant
generic filler words.  Emission rates are tuned so that signature words keep
the same conditional rate at every level of the tree; each planted
word-context association then beats global chance by the reciprocal of its
concept path's corpus share, which clears the default pointwise mutual
information threshold with margin, while filler words stay at chance level
and drop out.  More general concepts receive proportionally more chunks, so
a hypernym's co-occurrence row has strictly more mass than its hyponyms' —
the frequency asymmetry that magnitude- and inclusion-based scorers rely on.

By default, part of the filler background is topical: a configurable share
of chunks carries one of ``n_topics`` niche background topics, and filler
slots in those chunks draw from that topic's private word block instead of
the common filler pool (set ``n_topics=0`` for a uniform background).  Same-topic filler pairs then beat chance by the
reciprocal of the per-topic chunk share and survive the association filter,
just as ordinary topical prose produces large numbers of above-threshold
pairs that have nothing to do with the planted taxonomy.  This matters for
embedding training: with a purely uniform background, the planted pairs
would be almost the only surviving mass, and because negative sampling
budgets scale with average corpus frequency rather than surviving mass, the
negative traffic per context would then outweigh positive traffic by two
orders of magnitude and drive every non-negative vector to zero.  A topical
background restores a realistic surviving-mass share, so negative pressure
per context stays commensurate with positive evidence.  A wide filler pool
serves the same end from the other side: it lowers the average corpus
frequency itself, and with it every word's per-occurrence negative budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InternalError

#: Name alphabet: consonants only (no y), so no generated token can collide
#: with an English stopword; four letters give 160000 names per prefix.
_ALPHABET = "bcdfghjklmnpqrstvwxz"
_NAME_LEN = 4
_CAPACITY = len(_ALPHABET) ** _NAME_LEN

#: Grid sentinel for context slots not yet assigned a filler word.
_HOLE = -1


def _codename(prefix: str, index: int) -> str:
    digits = []
    n = index
    for _ in range(_NAME_LEN):
        digits.append(_ALPHABET[n % len(_ALPHABET)])
        n //= len(_ALPHABET)
    return prefix + "".join(reversed(digits))


@dataclass
class SynthConfig:
    n_concepts: int = 200
    n_mid: int = 14
    sig_words_per_concept: int = 2
    n_filler: int = 40000
    n_topics: int = 12
    topic_vocab: int = 100
    topic_share: float = 0.25
    n_tokens: int = 1_000_000
    chunk_length: int = 100
    concept_spacing: int = 12
    sig_word_freq: float = 38.0
    root_weight: float = 1.5
    mid_weight: float = 1.25
    n_random_negatives: int | None = None
    n_sibling_negatives: int | None = None

    def validate(self):
        if self.sig_words_per_concept < 1:
            raise ConfigError(
                "sig_words_per_concept must be >= 1; "
                "concepts need non-empty context sets"
            )
        if self.n_mid < 1 or self.n_concepts < self.n_mid + 2:
            raise ConfigError(
                "need at least one mid-level concept and one leaf "
                f"(n_concepts={self.n_concepts}, n_mid={self.n_mid})"
            )
        if self.n_tokens % self.chunk_length != 0:
            raise ConfigError(
                f"n_tokens={self.n_tokens} must be a multiple of "
                f"chunk_length={self.chunk_length}"
            )
        if self.n_tokens // self.chunk_length < self.n_concepts:
            raise ConfigError("need at least one chunk per concept")
        if not 1 <= self.concept_spacing <= self.chunk_length:
            raise ConfigError("concept_spacing must lie within the chunk")
        if self.n_topics < 0 or (self.n_topics > 0 and self.topic_vocab < 1):
            raise ConfigError("n_topics must be >= 0 with a positive topic_vocab")
        if self.n_topics > 0 and not 0.0 < self.topic_share <= 1.0:
            raise ConfigError("topic_share must lie in (0, 1]")
        total_fillers = self.n_filler + self.n_topics * self.topic_vocab
        if self.n_concepts > _CAPACITY or total_fillers > _CAPACITY:
            raise ConfigError(f"at most {_CAPACITY} names per word family")
        if self.n_concepts * self.sig_words_per_concept > _CAPACITY:
            raise ConfigError(f"at most {_CAPACITY} signature words")
        if self.n_filler < 1:
            raise ConfigError("need at least one common filler word")
        if self.sig_word_freq <= 0:
            raise ConfigError("sig_word_freq must be positive")
        if not self.root_weight >= self.mid_weight >= 1.0:
            raise ConfigError(
                "concept chunk weights must satisfy "
                "root_weight >= mid_weight >= 1; more general concepts "
                "need at least as much corpus share as their descendants"
            )


@dataclass
class SyntheticTaxonomy:
    text: str
    positives: list  # (descendant, ancestor) concept-name pairs
    negatives: list  # non-ancestor concept-name pairs
    parents: dict  # concept name -> parent name (None for the root)
    context_sets: dict  # concept name -> frozenset of signature words
    config: SynthConfig = field(repr=False)


def make_synthetic_taxonomy(seed: int, config: SynthConfig | None = None) -> SyntheticTaxonomy:
    cfg = config or SynthConfig()
    cfg.validate()
    rng = np.random.default_rng(seed)

    n = cfg.n_concepts
    g = cfg.sig_words_per_concept
    n_chunks = cfg.n_tokens // cfg.chunk_length

    # Tree: node 0 is the root, nodes 1..n_mid sit under it, the rest are
    # leaves attached to mid-level nodes at random.
    parent = np.full(n, -1, dtype=np.int64)
    parent[1 : cfg.n_mid + 1] = 0
    parent[cfg.n_mid + 1 :] = rng.integers(1, cfg.n_mid + 1, size=n - cfg.n_mid - 1)
    depth = np.where(parent == -1, 0, np.where(parent == 0, 1, 2))

    concept_names = [_codename("c", i) for i in range(n)]
    sig_names = [_codename("s", i) for i in range(n * g)]
    # Topic filler blocks come first, then the common filler pool.
    total_fillers = cfg.n_filler + cfg.n_topics * cfg.topic_vocab
    filler_names = [_codename("f", i) for i in range(total_fillers)]

    own_words = [list(range(i * g, (i + 1) * g)) for i in range(n)]
    subtree_words = [list(ws) for ws in own_words]
    for node in range(n - 1, 0, -1):
        subtree_words[parent[node]].extend(subtree_words[node])

    # Corpus share per concept: ancestors get more chunks than descendants
    # so hypernym co-occurrence rows carry strictly more mass.
    weight = np.where(depth == 0, cfg.root_weight, np.where(depth == 1, cfg.mid_weight, 1.0))
    theme_share = weight / weight.sum()

    # Fraction of the corpus emitting each concept's signature words: the
    # summed share of the concept and its ancestors.
    path_share = theme_share.copy()
    for node in range(1, n):
        path_share[node] += path_share[parent[node]]

    # Per-word emission rate: every theme whose subtree contains the word
    # emits it at the same per-token rate, chosen so the word's expected
    # corpus frequency is sig_word_freq.
    word_rate = np.empty(n * g)
    for node in range(n):
        word_rate[own_words[node]] = cfg.sig_word_freq / (cfg.n_tokens * path_share[node])

    concept_positions = np.arange(0, cfg.chunk_length, cfg.concept_spacing)
    ctx_positions = np.setdiff1d(np.arange(cfg.chunk_length), concept_positions)
    slot_scale = cfg.chunk_length / ctx_positions.size

    root_sig_slot_prob = float(word_rate[subtree_words[0]].sum()) * slot_scale
    if root_sig_slot_prob > 0.95:
        raise ConfigError(
            "signature emission budget exceeded "
            f"({root_sig_slot_prob:.2f} of context slots); lower "
            "sig_word_freq or sig_words_per_concept, or raise n_tokens"
        )

    # Apportion chunks by theme share (largest remainder), then shuffle.
    quota = theme_share * n_chunks
    chunk_counts = quota.astype(np.int64)
    shortfall = n_chunks - int(chunk_counts.sum())
    most_underfilled = np.argsort(chunk_counts - quota, kind="stable")
    chunk_counts[most_underfilled[:shortfall]] += 1
    if (chunk_counts == 0).any():
        raise ConfigError(
            "some concept received no chunks; raise n_tokens or lower "
            "root_weight / mid_weight"
        )
    themes = rng.permutation(np.repeat(np.arange(n), chunk_counts))

    # Some chunks carry a niche background topic whose filler words appear
    # nowhere else; the rest draw fillers from the common pool.
    chunk_topic = np.full(n_chunks, -1, dtype=np.int64)
    if cfg.n_topics > 0:
        niche = rng.random(n_chunks) < cfg.topic_share
        chunk_topic[niche] = rng.integers(0, cfg.n_topics, size=int(niche.sum()))

    # Stage one: place concept and signature tokens, leaving filler slots as
    # holes.  Signature emission depends only on the chunk's theme.
    n_sigs = n * g
    grid = np.empty((n_chunks, cfg.chunk_length), dtype=np.int64)
    grid[:, concept_positions] = themes[:, None]
    for node in range(n):
        rows = np.flatnonzero(themes == node)
        if rows.size == 0:
            continue
        words = np.asarray(subtree_words[node], dtype=np.int64)
        probs = word_rate[words] * slot_scale
        cand = np.concatenate([n + words, [_HOLE]])
        p = np.concatenate([probs, [1.0 - float(probs.sum())]])
        draws = rng.choice(cand, size=rows.size * ctx_positions.size, p=p)
        grid[np.ix_(rows, ctx_positions)] = draws.reshape(rows.size, ctx_positions.size)

    # Stage two: fill holes from the chunk's filler pool, which depends only
    # on the chunk's background topic.
    filler_base = n + n_sigs
    common_base = filler_base + cfg.n_topics * cfg.topic_vocab
    for t in range(-1, cfg.n_topics):
        rows = np.flatnonzero(chunk_topic == t)
        if rows.size == 0:
            continue
        if t < 0:
            lo, hi = common_base, common_base + cfg.n_filler
        else:
            lo, hi = filler_base + t * cfg.topic_vocab, filler_base + (t + 1) * cfg.topic_vocab
        sub = grid[rows]
        mask = sub == _HOLE
        sub[mask] = rng.integers(lo, hi, size=int(mask.sum()))
        grid[rows] = sub

    names = np.array(concept_names + sig_names + filler_names, dtype=object)
    lines = [" ".join(names[row]) for row in grid]
    text = "\n".join(lines) + "\n"

    ancestor_ids = []
    for node in range(n):
        chain = []
        cur = parent[node]
        while cur != -1:
            chain.append(int(cur))
            cur = parent[cur]
        ancestor_ids.append(chain)

    positives = [
        (concept_names[node], concept_names[anc])
        for node in range(n)
        for anc in ancestor_ids[node]
    ]

    seen = set(positives)
    negatives = []

    n_random = cfg.n_random_negatives
    if n_random is None:
        n_random = len(positives)
    attempts = 0
    while len(negatives) < n_random:
        attempts += 1
        if attempts > 200 * (n_random + 1):
            raise InternalError("could not sample enough non-ancestor pairs")
        q, p = (int(x) for x in rng.integers(0, n, size=2))
        if q == p or p in ancestor_ids[q]:
            continue
        pair = (concept_names[q], concept_names[p])
        if pair in seen:
            continue
        seen.add(pair)
        negatives.append(pair)

    sibling_pairs = []
    children = {}
    for node in range(1, n):
        children.setdefault(int(parent[node]), []).append(node)
    for sibs in children.values():
        for a in sibs:
            for b in sibs:
                if a != b:
                    sibling_pairs.append((concept_names[a], concept_names[b]))
    n_sib = cfg.n_sibling_negatives
    if n_sib is None:
        n_sib = max(1, len(positives) // 2)
    sibling_pairs = [pair for pair in sibling_pairs if pair not in seen]
    if n_sib < len(sibling_pairs):
        idx = rng.choice(len(sibling_pairs), size=n_sib, replace=False)
        sibling_pairs = [sibling_pairs[i] for i in sorted(idx)]
    negatives.extend(sibling_pairs)

    parents_by_name = {
        concept_names[i]: (concept_names[parent[i]] if parent[i] != -1 else None)
        for i in range(n)
    }
    context_sets = {
        concept_names[i]: frozenset(sig_names[w] for w in subtree_words[i])
        for i in range(n)
    }
    return SyntheticTaxonomy(
        text=text,
        positives=positives,
        negatives=negatives,
        parents=parents_by_name,
        context_sets=context_sets,
        config=cfg,
    )
