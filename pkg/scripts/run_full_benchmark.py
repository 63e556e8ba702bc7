#!/usr/bin/env python3
"""Train on the 51.2M-token Wikipedia subset and score the 11 public benchmarks.

Reference results (reproduced to tolerance by ``tests/test_acceptance.py``
when ``HYPERDIVE_BENCHMARK_DIR`` points at a prepared data directory):

* micro-average AP over the 10 detection datasets, C*dS scorer: 32.7
* HyperLex Spearman rho, C*dS scorer:                           32.8
* micro-average directionality accuracy, dS scorer:             67.0 (reported,
  not gated: it depends on out-of-vocabulary coin flips)

Data directory layout (``--data-dir``)
--------------------------------------

::

    corpus/
        wackypedia_raw.txt   raw text; the first 512,000 lines are used
        wackypedia_pos.txt   the same lines as word_TAG tokens
    datasets/
        bless.tsv  evalution.tsv  lenci_benotto.tsv  weeds.tsv  wordnet.tsv
        medical.tsv  leds.tsv  tm14.tsv  kotlerman_2010.tsv  hypenet.tsv
        hyperlex.tsv

The corpus is the 2009 WaCkypedia Wikipedia dump in page-title order; the
first 512,000 lines hold roughly 51.2 million tokens.  ``wackypedia_pos.txt``
is the identical text with every token joined to its part-of-speech tag
(NLTK tag set) by an underscore, e.g. ``dog_NN``.

Dataset files are three tab-separated columns: query, candidate, label
(True/False for detection, a real number for HyperLex).  Multi-word phrases
are space separated.  BLESS, EVALution, Lenci/Benotto and Weeds come from
github.com/vered1986/UnsupervisedHypernymy; Medical, LEDS, TM14 and
Kotlerman 2010 from github.com/stephenroller/emnlp2016; HypeNet is the random
train/test split's test set, WordNet the test split of its phrase pairs, and
HyperLex uses all pairs.  Datasets shipped with part-of-speech information
(bless, evalution, lenci_benotto, weeds, wordnet, hyperlex) must keep their
tokens in the same ``word_TAG`` form as ``wackypedia_pos.txt`` and are scored
against the model trained on the tagged corpus; the rest are plain lowercase
words scored against the raw-text model.

Intermediate artifacts (vocabulary, co-occurrence counts, embeddings) are
cached under ``--work-dir`` and reused on re-runs, so repeated evaluations
only pay for scoring.
"""

import argparse
import itertools
import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from hyperdive.cooccur import CoocStats, count_cooccurrences
from hyperdive.corpus import Vocabulary, build_vocab, preprocess, read_text
from hyperdive.errors import HyperdiveError
from hyperdive.evaluation import (
    directionality_accuracy,
    evaluate,
    load_dataset,
    micro_average,
)
from hyperdive.sbow import pmi_filter
from hyperdive.scoring import PairScorer, make_source
from hyperdive.trainer import Embedding, TrainConfig, train_dive

DETECTION_POS = ("bless", "evalution", "lenci_benotto", "weeds", "wordnet")
DETECTION_RAW = ("medical", "leds", "tm14", "kotlerman_2010", "hypenet")
GRADED_POS = ("hyperlex",)


def log(message):
    print(f"[{time.strftime('%H:%M:%S')}] {message}", flush=True)


def build_model(mode, args, work_dir):
    """Train (or reload) the embedding for one corpus form.

    Returns ``(source, vocab)`` where ``source`` resolves words and phrases
    to dense vectors.
    """
    emb_path = work_dir / f"dive_{mode}.emb"
    vocab_path = work_dir / f"vocab_{mode}.tsv"
    if emb_path.exists() and vocab_path.exists():
        log(f"{mode}: reusing cached model {emb_path}")
        vocab = Vocabulary.load(vocab_path)
        emb = Embedding.load(emb_path, vocab)
        return make_source(emb, vocab), vocab

    corpus_path = Path(args.data_dir) / "corpus" / f"wackypedia_{mode}.txt"
    if not corpus_path.exists():
        raise HyperdiveError(f"missing corpus file {corpus_path}")

    pos_mode = "tagged" if mode == "pos" else "off"
    log(f"{mode}: reading first {args.max_lines} lines of {corpus_path}")
    with read_text(corpus_path) as handle:
        stream = preprocess(
            itertools.islice(handle, args.max_lines), pos_mode=pos_mode
        )
    log(f"{mode}: {stream.n_tokens()} tokens after cleaning")

    vocab, stream = build_vocab(stream, args.min_count)
    log(f"{mode}: vocabulary {len(vocab)} words (min count {args.min_count})")

    stats_path = work_dir / f"stats_{mode}.tsv"
    if stats_path.exists():
        log(f"{mode}: reusing cached counts {stats_path}")
        stats = CoocStats.load(stats_path, vocab)
    else:
        stats = count_cooccurrences(stream, vocab, args.window, threads=args.threads)
        stats.save(stats_path, vocab)
    kept = pmi_filter(stats, args.threshold_ratio)
    log(f"{mode}: {kept.pairs.nnz} entries after the relevance filter")

    config = TrainConfig(dim=args.dim, epochs=args.epochs)
    log(f"{mode}: training dim={args.dim} for {args.epochs} epochs")
    start = time.perf_counter()
    emb = train_dive(kept, config, seed=args.seed, progress=True)
    log(f"{mode}: trained in {time.perf_counter() - start:.0f}s")

    vocab.save(vocab_path)
    emb.save(emb_path, vocab)
    return make_source(emb, vocab), vocab


def main(argv=None):
    parser = argparse.ArgumentParser(
        description=__doc__.splitlines()[0],
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__[__doc__.index("Data directory layout"):],
    )
    parser.add_argument("--data-dir", required=True,
                        help="corpus and benchmark files (layout: see below)")
    parser.add_argument("--work-dir", required=True,
                        help="cache for vocabularies, counts and embeddings")
    parser.add_argument("--json", help="write the metric summary to this file")
    parser.add_argument("--max-lines", type=int, default=512_000,
                        help="corpus prefix length in lines (default 512000)")
    parser.add_argument("--dim", type=int, default=100)
    parser.add_argument("--epochs", type=int, default=15)
    parser.add_argument("--window", type=int, default=20)
    parser.add_argument("--min-count", type=int, default=10)
    parser.add_argument("--threshold-ratio", type=float, default=30.0)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=4,
                        help="worker threads for co-occurrence counting")
    args = parser.parse_args(argv)

    work_dir = Path(args.work_dir)
    work_dir.mkdir(parents=True, exist_ok=True)
    dataset_dir = Path(args.data_dir) / "datasets"

    sources = {}
    for mode in ("raw", "pos"):
        sources[mode], _ = build_model(mode, args, work_dir)

    detection = [(name, "pos") for name in DETECTION_POS]
    detection += [(name, "raw") for name in DETECTION_RAW]

    per_dataset = {}
    ap_reports = []
    direction_parts = []
    for name, mode in detection:
        dataset = load_dataset(
            dataset_dir / f"{name}.tsv", fmt="detection",
            name=name, pos_mode=(mode == "pos"),
        )
        source = sources[mode]
        report = evaluate(dataset, PairScorer("CdS", source), seed=args.seed)
        positives = [p for p in dataset.pairs if p.label]
        direction = directionality_accuracy(
            positives, PairScorer("dS", source), seed=args.seed
        )
        per_dataset[name] = {
            "ap": 100.0 * report.value,
            "n_pairs": report.n_pairs,
            "n_oov": report.n_oov,
            "directionality": 100.0 * direction,
            "n_positive": len(positives),
        }
        ap_reports.append(report)
        direction_parts.append((direction, len(positives)))
        log(f"{name}: AP {100 * report.value:.1f} "
            f"({report.n_pairs} pairs, {report.n_oov} OOV), "
            f"direction {100 * direction:.1f}")

    hyperlex = load_dataset(
        dataset_dir / "hyperlex.tsv", fmt="graded",
        name="hyperlex", pos_mode=True,
    )
    rho_report = evaluate(hyperlex, PairScorer("CdS", sources["pos"]),
                          seed=args.seed)
    per_dataset["hyperlex"] = {
        "spearman": 100.0 * rho_report.value,
        "n_pairs": rho_report.n_pairs,
        "n_oov": rho_report.n_oov,
    }
    log(f"hyperlex: rho {100 * rho_report.value:.1f} "
        f"({rho_report.n_pairs} pairs, {rho_report.n_oov} OOV)")

    summary = {
        "micro_avg_ap": 100.0 * micro_average(ap_reports),
        "hyperlex_spearman": 100.0 * rho_report.value,
        "directionality": 100.0 * micro_average(direction_parts),
        "datasets": per_dataset,
        "config": {
            "max_lines": args.max_lines, "dim": args.dim,
            "epochs": args.epochs, "window": args.window,
            "min_count": args.min_count,
            "threshold_ratio": args.threshold_ratio, "seed": args.seed,
        },
        "reference": {
            "micro_avg_ap": 32.7,
            "hyperlex_spearman": 32.8,
            "directionality": 67.0,
        },
    }
    log(f"micro-average AP {summary['micro_avg_ap']:.1f} "
        f"(reference 32.7 +/- 2.0)")
    log(f"hyperlex spearman {summary['hyperlex_spearman']:.1f} "
        f"(reference 32.8 +/- 3.0)")
    log(f"directionality {summary['directionality']:.1f} (reference 67.0)")

    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
        log(f"wrote {args.json}")
    return 0


if __name__ == "__main__":
    try:
        sys.exit(main())
    except HyperdiveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(1)
