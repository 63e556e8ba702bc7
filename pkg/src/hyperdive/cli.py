"""Command-line pipeline orchestrator.

Subcommands cover every stage from raw text to evaluation reports:

    preprocess  clean raw text into a chunked token stream
    vocab       build the frequency-filtered vocabulary
    cooc        count windowed co-occurrences
    filter      keep only high-association pairs
    sbow        build a sparse feature space (freq / ppmi / ppmi_is)
    train-dive  train the non-negative embedding
    train-sgns  train skip-gram with negative sampling
    kmeans-nmf  pool counts over skip-gram clusters into a topic space
    score       score one word pair, or every pair in a dataset
    eval        rank a dataset and report AP / Spearman / directionality
    topics      inspect embedding dimensions or rank words by generality
    synth       generate a taxonomy corpus with planted hypernym pairs

Settings are layered: command flags beat the ``--config`` key=value file,
which beats built-in defaults.  Reports go to stdout (and, when set, the
``report`` path); diagnostics go to stderr.  Exit codes: 0 success, 1 usage
error, 2 input/output error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import fields

import numpy as np

from .config import PipelineConfig, build_config, read_config_file
from .cooccur import STATS_MAGIC, CoocStats, count_cooccurrences
from .corpus import TokenStream, Vocabulary, build_vocab, preprocess, read_text
from .errors import (
    ConfigError,
    DatasetError,
    HyperdiveError,
    IngestError,
    InternalError,
    ParseError,
    TrainingError,
)
from .evaluation import (
    EvalReport,
    directionality_accuracy,
    evaluate,
    format_reports,
    load_dataset,
)
from .sbow import (
    SPACE_MAGIC,
    FeatureSpace,
    build_freq,
    build_ppmi,
    build_ppmi_is,
    kmeans_freq_nmf,
    pmi_filter,
)
from .scoring import SCORER_NAMES, PairScorer, make_source
from .stopwords import load_stopwords
from .synthetic import SynthConfig, make_synthetic_taxonomy
from .trainer import Embedding, TrainConfig, backend_name, train_dive, train_sgns

_CONFIG_KEYS = frozenset(f.name for f in fields(PipelineConfig))


class _CliParser(argparse.ArgumentParser):
    """Argparse variant that reports usage problems as ConfigError (exit 1)."""

    def error(self, message):
        raise ConfigError(message)


def _require(cfg_value, key, stage):
    if cfg_value in (None, ""):
        flag = "--" + key.replace("_", "-")
        raise ConfigError(
            f"{stage} requires {flag} (or {key}= in the config file)"
        )
    return cfg_value


def _resolve_seed(cfg):
    """The configured seed, or a freshly drawn one (recorded in the report)."""
    if cfg.seed is not None:
        return int(cfg.seed)
    return int.from_bytes(os.urandom(4), "little")


def _fmt_value(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _emit(cfg, text):
    sys.stdout.write(text)
    if cfg.report:
        with open(cfg.report, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_kv(cfg, items):
    _emit(cfg, "".join(f"{k}={_fmt_value(v)}\n" for k, v in items))


def _diag(message):
    print(f"error: {message}", file=sys.stderr)


def _load_space_auto(path, vocab):
    """Load a feature space or embedding file, telling them apart by header."""
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
    if first.startswith(SPACE_MAGIC):
        return FeatureSpace.load(path, vocab)
    if first.startswith(STATS_MAGIC):
        raise ConfigError(
            f"{path} holds raw co-occurrence statistics; build a feature "
            "space or train an embedding first"
        )
    return Embedding.load(path, vocab)


def _drop_oov(stream, vocab):
    """Remove tokens outside the vocabulary, keeping chunk boundaries."""
    chunks = []
    for chunk in stream.chunks:
        kept = [t for t in chunk if vocab.get(t) is not None]
        if kept:
            chunks.append(kept)
    return TokenStream(chunks, stream.chunk_length)


def _make_scorer(name, cfg, source, sgns_source, seed):
    return PairScorer(
        name,
        source,
        sgns_source=sgns_source,
        seed=seed,
        penalty_weight=cfg.penalty_weight,
        top_contexts=cfg.top_contexts,
    )


# ---------------------------------------------------------------------------
# Stage handlers
# ---------------------------------------------------------------------------

def _cmd_preprocess(cfg, extras):
    _require(cfg.corpus, "corpus", "preprocess")
    _require(cfg.tokens, "tokens", "preprocess")
    stop = None if extras.get("no_stopwords") else load_stopwords(cfg.stopword_file)
    with read_text(cfg.corpus) as fh:
        stream = preprocess(
            fh,
            stopwords=stop,
            chunk_length=cfg.chunk_length,
            max_tokens=cfg.max_tokens,
            pos_mode=extras.get("pos_mode", "off"),
        )
    stream.save(cfg.tokens)
    _emit_kv(cfg, [
        ("stage", "preprocess"),
        ("n_tokens", stream.n_tokens()),
        ("n_chunks", len(stream.chunks)),
        ("out", cfg.tokens),
    ])


def _cmd_vocab(cfg, extras):
    _require(cfg.tokens, "tokens", "vocab")
    _require(cfg.vocab, "vocab", "vocab")
    stream = TokenStream.load(cfg.tokens, cfg.chunk_length)
    vocab, filtered = build_vocab(stream, cfg.min_count)
    vocab.save(cfg.vocab)
    filtered_path = extras.get("filtered_tokens")
    if filtered_path:
        filtered.save(filtered_path)
    _emit_kv(cfg, [
        ("stage", "vocab"),
        ("n_types", len(vocab)),
        ("n_tokens", filtered.n_tokens()),
        ("out", cfg.vocab),
    ])


def _cmd_cooc(cfg, extras):
    _require(cfg.tokens, "tokens", "cooc")
    _require(cfg.vocab, "vocab", "cooc")
    _require(cfg.stats, "stats", "cooc")
    vocab = Vocabulary.load(cfg.vocab)
    stream = _drop_oov(TokenStream.load(cfg.tokens, cfg.chunk_length), vocab)
    stats = count_cooccurrences(stream, vocab, cfg.window, threads=cfg.threads)
    stats.save(cfg.stats, vocab)
    _emit_kv(cfg, [
        ("stage", "cooc"),
        ("n_pairs", stats.pairs.nnz),
        ("total", stats.total),
        ("window", cfg.window),
        ("out", cfg.stats),
    ])


def _cmd_filter(cfg, extras):
    _require(cfg.stats, "stats", "filter")
    _require(cfg.vocab, "vocab", "filter")
    _require(cfg.out, "out", "filter")
    vocab = Vocabulary.load(cfg.vocab)
    raw = CoocStats.load(cfg.stats, vocab)
    kept = pmi_filter(raw, cfg.threshold_ratio)
    kept.save(cfg.out, vocab)
    _emit_kv(cfg, [
        ("stage", "filter"),
        ("threshold_ratio", cfg.threshold_ratio),
        ("kept_pairs", kept.pairs.nnz),
        ("dropped_pairs", raw.pairs.nnz - kept.pairs.nnz),
        ("out", cfg.out),
    ])


_SPACE_BUILDERS = {"freq": build_freq, "ppmi": build_ppmi, "ppmi_is": build_ppmi_is}


def _cmd_sbow(cfg, extras):
    _require(cfg.stats, "stats", "sbow")
    _require(cfg.vocab, "vocab", "sbow")
    _require(cfg.space, "space", "sbow")
    kind = extras.get("kind", "freq")
    vocab = Vocabulary.load(cfg.vocab)
    stats = CoocStats.load(cfg.stats, vocab)
    space = _SPACE_BUILDERS[kind](stats)
    space.save(cfg.space, vocab)
    _emit_kv(cfg, [
        ("stage", "sbow"),
        ("kind", kind),
        ("n_words", space.n_words),
        ("nnz", space.matrix.nnz),
        ("out", cfg.space),
    ])


def _run_training(cfg, extras, kind):
    stage = f"train-{kind}"
    _require(cfg.stats, "stats", stage)
    _require(cfg.vocab, "vocab", stage)
    _require(cfg.out, "out", stage)
    vocab = Vocabulary.load(cfg.vocab)
    stats = CoocStats.load(cfg.stats, vocab)
    seed = _resolve_seed(cfg)
    train_config = TrainConfig(
        dim=cfg.dim,
        epochs=cfg.epochs,
        lr=cfg.lr,
        batch_size=cfg.batch_size,
        neg_ratio=cfg.neg_ratio,
        neg_samples=cfg.neg_samples,
        debug=cfg.debug,
    )
    backend = extras.get("backend")
    train = train_dive if kind == "dive" else train_sgns
    start = time.perf_counter()
    emb = train(stats, train_config, seed=seed, backend=backend)
    elapsed = time.perf_counter() - start
    emb.save(cfg.out, vocab)
    _emit_kv(cfg, [
        ("stage", stage),
        ("n_words", emb.n_words),
        ("dim", emb.dim),
        ("epochs", cfg.epochs),
        ("seed", seed),
        ("backend", backend_name() if backend in (None, "cython") else backend),
        ("seconds", round(elapsed, 3)),
        ("out", cfg.out),
    ])


def _cmd_train_dive(cfg, extras):
    _run_training(cfg, extras, "dive")


def _cmd_train_sgns(cfg, extras):
    _run_training(cfg, extras, "sgns")


def _cmd_kmeans_nmf(cfg, extras):
    _require(cfg.sgns, "sgns", "kmeans-nmf")
    _require(cfg.stats, "stats", "kmeans-nmf")
    _require(cfg.vocab, "vocab", "kmeans-nmf")
    _require(cfg.out, "out", "kmeans-nmf")
    vocab = Vocabulary.load(cfg.vocab)
    emb = Embedding.load(cfg.sgns, vocab)
    stats = CoocStats.load(cfg.stats, vocab)
    seed = _resolve_seed(cfg)
    space = kmeans_freq_nmf(emb, stats, cfg.clusters, seed)
    space.save(cfg.out, vocab)
    _emit_kv(cfg, [
        ("stage", "kmeans-nmf"),
        ("clusters", cfg.clusters),
        ("seed", seed),
        ("nnz", space.matrix.nnz),
        ("out", cfg.out),
    ])


def _load_sources(cfg, stage):
    _require(cfg.space, "space", stage)
    _require(cfg.vocab, "vocab", stage)
    vocab = Vocabulary.load(cfg.vocab)
    source = make_source(_load_space_auto(cfg.space, vocab), vocab)
    sgns_source = None
    if cfg.sgns:
        sgns_source = make_source(Embedding.load(cfg.sgns, vocab), vocab)
    return vocab, source, sgns_source


def _cmd_score(cfg, extras):
    _vocab, source, sgns_source = _load_sources(cfg, "score")
    seed = _resolve_seed(cfg)
    scorer = _make_scorer(extras["scorer"], cfg, source, sgns_source, seed)
    query = extras.get("query")
    candidate = extras.get("candidate")
    if query is not None and cfg.dataset:
        raise ConfigError("give either a word pair or --dataset, not both")
    if query is not None:
        if candidate is None:
            raise ConfigError("score needs both a query and a candidate word")
        value = scorer.score(query.split(), candidate.split())
        _emit_kv(cfg, [
            ("scorer", extras["scorer"]),
            ("query", query),
            ("candidate", candidate),
            ("seed", seed),
            ("score", "oov" if value is None else repr(float(value))),
        ])
        return
    if not cfg.dataset:
        raise ConfigError("score needs a word pair or --dataset")
    dataset = load_dataset(cfg.dataset, fmt=extras.get("fmt", "auto"),
                           pos_mode=extras.get("pos_mode", False))
    print(f"seed={seed}", file=sys.stderr)
    rows = []
    for pair in dataset.pairs:
        value = scorer.score(list(pair.query), list(pair.candidate))
        rendered = "oov" if value is None else repr(float(value))
        rows.append(f"{' '.join(pair.query)}\t{' '.join(pair.candidate)}\t{rendered}")
    _emit(cfg, "\n".join(rows) + "\n")


def _direction_report(dataset, scorer, seed):
    if dataset.graded:
        raise ConfigError("the direction metric needs detection (True/False) labels")
    positives = [pair for pair in dataset.pairs if pair.label]
    n_oov = sum(
        1
        for pair in positives
        if scorer.score(list(pair.query), list(pair.candidate)) is None
    )
    value = directionality_accuracy(positives, scorer, seed=seed)
    return EvalReport(
        dataset=dataset.name,
        metric="direction",
        value=value,
        n_pairs=len(positives),
        n_oov=n_oov,
    )


def _cmd_eval(cfg, extras):
    _vocab, source, sgns_source = _load_sources(cfg, "eval")
    scorers = extras.get("scorers")
    if not scorers:
        raise ConfigError("eval needs at least one --scorer")
    datasets = extras.get("datasets") or ([cfg.dataset] if cfg.dataset else [])
    if not datasets:
        raise ConfigError("eval needs at least one --dataset")
    fmt = extras.get("fmt", "auto")
    style = extras.get("style", "kv")
    micro = extras.get("micro", False)
    direction = extras.get("direction", False)
    pos_mode = extras.get("pos_mode", False)
    seed = _resolve_seed(cfg)
    loaded = [load_dataset(p, fmt=fmt, pos_mode=pos_mode) for p in datasets]
    blocks = [f"seed={seed}"]
    for name in scorers:
        scorer = _make_scorer(name, cfg, source, sgns_source, seed)
        if direction:
            reports = [_direction_report(ds, scorer, seed) for ds in loaded]
        else:
            reports = [evaluate(ds, scorer, seed=seed) for ds in loaded]
        blocks.append(f"scorer={name}")
        blocks.append(format_reports(reports, style=style, micro=micro).rstrip("\n"))
    _emit(cfg, "\n".join(blocks) + "\n")


def _cmd_topics(cfg, extras):
    _require(cfg.space, "space", "topics")
    _require(cfg.vocab, "vocab", "topics")
    vocab = Vocabulary.load(cfg.vocab)
    emb = _load_space_auto(cfg.space, vocab)
    if not isinstance(emb, Embedding):
        raise ConfigError("topics needs a dense embedding file")
    n_words = emb.n_words
    if extras.get("general"):
        top_k = extras.get("top_k", 30)
        query = extras.get("query")
        if query is not None:
            qid = vocab.get(query)
            if qid is None:
                raise ConfigError(f"unknown query word {query!r}")
            values = emb.word_vecs @ emb.word_vecs[qid]
        else:
            values = np.abs(emb.word_vecs).sum(axis=1)
        order = np.lexsort((np.arange(n_words), -values))[:top_k]
        lines = [f"{vocab.words[i]}\t{float(values[i])!r}" for i in order]
        _emit(cfg, "\n".join(lines) + "\n")
        return
    word = extras.get("word")
    if word is None:
        raise ConfigError("topics needs --word (or --general)")
    if emb.kind != "dive":
        raise ConfigError(
            "dimension listings need the non-negative embedding; "
            f"got kind {emb.kind!r}"
        )
    wid = vocab.get(word)
    if wid is None:
        raise ConfigError(f"unknown reference word {word!r}")
    top_k = extras.get("top_k", 10)
    min_value = extras.get("min_value", 0.1)
    ref = emb.word_vecs[wid]
    lines = []
    for d in np.lexsort((np.arange(emb.dim), -ref)):
        if ref[d] < min_value:
            continue
        column = emb.word_vecs[:, d]
        top = np.lexsort((np.arange(n_words), -column))[:top_k]
        words = " ".join(vocab.words[i] for i in top)
        lines.append(f"dim={int(d)}\t{float(ref[d])!r}\t{words}")
    _emit(cfg, "\n".join(lines) + "\n" if lines else "")


_SYNTH_FIELDS = (
    "n_concepts",
    "n_mid",
    "sig_words_per_concept",
    "n_filler",
    "n_topics",
    "topic_vocab",
    "topic_share",
    "n_tokens",
)


def _cmd_synth(cfg, extras):
    out_corpus = extras.get("out_corpus")
    out_pairs = extras.get("out_pairs")
    if not (out_corpus or out_pairs):
        raise ConfigError("synth needs --out-corpus and/or --out-pairs")
    seed = _resolve_seed(cfg)
    overrides = {k: extras[k] for k in _SYNTH_FIELDS if k in extras}
    synth_config = SynthConfig(chunk_length=cfg.chunk_length, **overrides)
    taxonomy = make_synthetic_taxonomy(seed, synth_config)
    if out_corpus:
        with open(out_corpus, "w", encoding="utf-8") as fh:
            fh.write(taxonomy.text)
    if out_pairs:
        with open(out_pairs, "w", encoding="utf-8") as fh:
            for q, p in taxonomy.positives:
                fh.write(f"{q}\t{p}\tTrue\n")
            for q, p in taxonomy.negatives:
                fh.write(f"{q}\t{p}\tFalse\n")
    items = [
        ("stage", "synth"),
        ("seed", seed),
        ("n_tokens", synth_config.n_tokens),
        ("n_concepts", synth_config.n_concepts),
        ("n_positives", len(taxonomy.positives)),
        ("n_negatives", len(taxonomy.negatives)),
    ]
    if out_corpus:
        items.append(("out_corpus", out_corpus))
    if out_pairs:
        items.append(("out_pairs", out_pairs))
    _emit_kv(cfg, items)


HANDLERS = {
    "preprocess": _cmd_preprocess,
    "vocab": _cmd_vocab,
    "cooc": _cmd_cooc,
    "filter": _cmd_filter,
    "sbow": _cmd_sbow,
    "train-dive": _cmd_train_dive,
    "train-sgns": _cmd_train_sgns,
    "kmeans-nmf": _cmd_kmeans_nmf,
    "score": _cmd_score,
    "eval": _cmd_eval,
    "topics": _cmd_topics,
    "synth": _cmd_synth,
}


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser():
    parser = _CliParser(
        prog="hyperdive",
        description="Corpus-to-score pipeline for unsupervised hypernymy detection.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True,
                                parser_class=_CliParser)

    def stage(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text,
                           argument_default=argparse.SUPPRESS)
        p.add_argument("--config", metavar="FILE",
                       help="flat key=value settings file")
        p.add_argument("--report", metavar="FILE",
                       help="also write the report to this file")
        return p

    p = stage("preprocess", "clean raw text into a chunked token stream")
    p.add_argument("--corpus", metavar="FILE", help="raw input text")
    p.add_argument("--tokens", metavar="FILE", help="output token stream")
    p.add_argument("--chunk-length", dest="chunk_length", type=int)
    p.add_argument("--max-tokens", dest="max_tokens", type=int)
    p.add_argument("--stopword-file", dest="stopword_file", metavar="FILE")
    p.add_argument("--no-stopwords", dest="no_stopwords", action="store_true",
                   help="keep stop words")
    p.add_argument("--pos-mode", dest="pos_mode", choices=("off", "tagged"))

    p = stage("vocab", "build the frequency-filtered vocabulary")
    p.add_argument("--tokens", metavar="FILE")
    p.add_argument("--vocab", metavar="FILE", help="output vocabulary")
    p.add_argument("--filtered-tokens", dest="filtered_tokens", metavar="FILE",
                   help="also write the rare-word-free stream")
    p.add_argument("--min-count", dest="min_count", type=int)

    p = stage("cooc", "count windowed co-occurrences")
    p.add_argument("--tokens", metavar="FILE")
    p.add_argument("--vocab", metavar="FILE")
    p.add_argument("--stats", metavar="FILE", help="output statistics")
    p.add_argument("--window", type=int)
    p.add_argument("--threads", type=int)

    p = stage("filter", "keep only high-association pairs")
    p.add_argument("--stats", metavar="FILE")
    p.add_argument("--vocab", metavar="FILE")
    p.add_argument("--out", metavar="FILE", help="output statistics")
    p.add_argument("--threshold-ratio", dest="threshold_ratio", type=float)

    p = stage("sbow", "build a sparse feature space")
    p.add_argument("--stats", metavar="FILE")
    p.add_argument("--vocab", metavar="FILE")
    p.add_argument("--space", metavar="FILE", help="output feature space")
    p.add_argument("--kind", choices=tuple(_SPACE_BUILDERS))

    for name, help_text in (
        ("train-dive", "train the non-negative embedding"),
        ("train-sgns", "train skip-gram with negative sampling"),
    ):
        p = stage(name, help_text)
        p.add_argument("--stats", metavar="FILE")
        p.add_argument("--vocab", metavar="FILE")
        p.add_argument("--out", metavar="FILE", help="output embedding")
        p.add_argument("--dim", type=int)
        p.add_argument("--epochs", type=int)
        p.add_argument("--lr", type=float)
        p.add_argument("--batch-size", dest="batch_size", type=int)
        p.add_argument("--neg-ratio", dest="neg_ratio", type=float)
        p.add_argument("--neg-samples", dest="neg_samples", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--debug", action="store_true",
                       help="verify invariants after every update")
        p.add_argument("--backend", choices=("compiled", "numpy"))

    p = stage("kmeans-nmf", "pool counts over skip-gram clusters")
    p.add_argument("--sgns", metavar="FILE", help="skip-gram embedding")
    p.add_argument("--stats", metavar="FILE")
    p.add_argument("--vocab", metavar="FILE")
    p.add_argument("--out", metavar="FILE", help="output topic space")
    p.add_argument("--clusters", type=int)
    p.add_argument("--seed", type=int)

    p = stage("score", "score one word pair, or every pair in a dataset")
    p.add_argument("--space", metavar="FILE", help="feature space or embedding")
    p.add_argument("--vocab", metavar="FILE")
    p.add_argument("--sgns", metavar="FILE", help="skip-gram embedding for W*/word2vec")
    p.add_argument("--scorer", choices=SCORER_NAMES, required=True)
    p.add_argument("--dataset", metavar="FILE")
    p.add_argument("--penalty-weight", dest="penalty_weight", type=float)
    p.add_argument("--top-contexts", dest="top_contexts", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("query", nargs="?", help="query word or quoted phrase")
    p.add_argument("candidate", nargs="?", help="candidate word or quoted phrase")

    p = stage("eval", "rank a dataset and report AP / Spearman / directionality")
    p.add_argument("--space", metavar="FILE", help="feature space or embedding")
    p.add_argument("--vocab", metavar="FILE")
    p.add_argument("--sgns", metavar="FILE", help="skip-gram embedding for W*/word2vec")
    p.add_argument("--scorer", dest="scorers", action="append",
                   choices=SCORER_NAMES, help="repeatable")
    p.add_argument("--dataset", dest="datasets", action="append",
                   metavar="FILE", help="repeatable")
    p.add_argument("--fmt", choices=("auto", "detection", "graded"))
    p.add_argument("--style", choices=("kv", "table"))
    p.add_argument("--micro", action="store_true",
                   help="add the pair-weighted average over datasets")
    p.add_argument("--direction", action="store_true",
                   help="report directionality accuracy on positive pairs")
    p.add_argument("--pos-mode", dest="pos_mode", action="store_true",
                   help="strip part-of-speech suffixes from dataset words")
    p.add_argument("--penalty-weight", dest="penalty_weight", type=float)
    p.add_argument("--top-contexts", dest="top_contexts", type=int)
    p.add_argument("--seed", type=int)

    p = stage("topics", "inspect embedding dimensions or rank by generality")
    p.add_argument("--space", metavar="FILE", help="embedding file")
    p.add_argument("--vocab", metavar="FILE")
    p.add_argument("--word", help="reference word ordering the dimensions")
    p.add_argument("--top-k", dest="top_k", type=int)
    p.add_argument("--min-value", dest="min_value", type=float)
    p.add_argument("--general", action="store_true",
                   help="rank whole words by generality instead")
    p.add_argument("--query", help="with --general: rank by dot product with this word")

    p = stage("synth", "generate a taxonomy corpus with planted pairs")
    p.add_argument("--out-corpus", dest="out_corpus", metavar="FILE")
    p.add_argument("--out-pairs", dest="out_pairs", metavar="FILE")
    p.add_argument("--concepts", dest="n_concepts", type=int)
    p.add_argument("--mid", dest="n_mid", type=int)
    p.add_argument("--sig-words", dest="sig_words_per_concept", type=int)
    p.add_argument("--filler", dest="n_filler", type=int)
    p.add_argument("--topics", dest="n_topics", type=int,
                   help="number of niche filler topics (0 = uniform filler)")
    p.add_argument("--topic-vocab", dest="topic_vocab", type=int,
                   help="filler words private to each topic")
    p.add_argument("--topic-share", dest="topic_share", type=float,
                   help="fraction of chunks assigned to a niche topic")
    p.add_argument("--size", dest="n_tokens", type=int,
                   help="total corpus tokens")
    p.add_argument("--chunk-length", dest="chunk_length", type=int)
    p.add_argument("--seed", type=int)

    return parser


def _merge_namespace(args):
    values = dict(vars(args))
    values.pop("command", None)
    config_path = values.pop("config", None)
    file_values = read_config_file(config_path) if config_path else {}
    overrides = {k: v for k, v in values.items() if k in _CONFIG_KEYS}
    extras = {k: v for k, v in values.items() if k not in _CONFIG_KEYS}
    return build_config(file_values, overrides), extras


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg, extras = _merge_namespace(args)
        HANDLERS[args.command](cfg, extras)
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else 0
    except ConfigError as exc:
        _diag(exc)
        return 1
    except (OSError, IngestError, ParseError, DatasetError) as exc:
        _diag(exc)
        return 2
    except (TrainingError, InternalError, FloatingPointError) as exc:
        _diag(exc)
        return 3
    except HyperdiveError as exc:
        _diag(exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
