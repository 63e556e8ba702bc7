"""Ranking-based evaluation of hypernymy scorers.

Benchmarks are lists of (query, candidate, label) pairs.  Detection datasets
carry boolean labels and are summarized by average precision over the ranked
list; graded datasets carry real labels and are summarized by Spearman rank
correlation.  Pairs that cannot be scored (out of vocabulary) sink to the
bottom of the ranking.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import DatasetError, ParseError
from .synthetic import SynthConfig, SyntheticTaxonomy, make_synthetic_taxonomy

__all__ = [
    "Dataset",
    "DatasetPair",
    "EvalReport",
    "RankedItem",
    "Ranking",
    "SynthConfig",
    "SyntheticTaxonomy",
    "average_precision",
    "compose_phrase",
    "directionality_accuracy",
    "evaluate",
    "format_reports",
    "load_dataset",
    "make_synthetic_taxonomy",
    "micro_average",
    "rank_pairs",
    "spearman",
]

_TRUE_LABELS = {"true", "1"}
_FALSE_LABELS = {"false", "0"}


@dataclass(frozen=True)
class DatasetPair:
    """One ordered candidate pair; each side may be a multi-word phrase."""

    query: tuple
    candidate: tuple
    label: object


@dataclass
class Dataset:
    name: str
    pairs: list
    graded: bool
    pos_mode: bool = False


@dataclass
class RankedItem:
    pair: DatasetPair
    score: float | None
    oov: bool


@dataclass
class Ranking:
    """Scored pairs in descending score order, then OOV pairs in input order."""

    items: list


@dataclass
class EvalReport:
    dataset: str
    metric: str
    value: float
    n_pairs: int
    n_oov: int


def load_dataset(path, fmt: str = "auto", name: str | None = None,
                 pos_mode: bool = False) -> Dataset:
    """Read a TSV benchmark: query TAB candidate TAB label [TAB relation].

    Labels are True/False/1/0 for detection or reals for graded datasets;
    with ``fmt="auto"`` the mode is inferred from the label column.  Phrase
    sides are split on whitespace.
    """
    if fmt not in ("auto", "detection", "graded"):
        raise DatasetError(f"unknown dataset format {fmt!r}")
    rows = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) < 3:
                raise ParseError(
                    f"expected at least 3 tab-separated columns, got {len(cols)}",
                    line=lineno,
                )
            rows.append((lineno, cols[0], cols[1], cols[2]))
    if not rows:
        raise DatasetError(f"dataset file {path} contains no pairs")

    if fmt == "auto":
        boolish = all(
            r[3].strip().lower() in _TRUE_LABELS | _FALSE_LABELS for r in rows
        )
        graded = not boolish
    else:
        graded = fmt == "graded"

    pairs = []
    seen = set()
    for lineno, q, p, raw_label in rows:
        query = tuple(q.split())
        candidate = tuple(p.split())
        if not query or not candidate:
            raise ParseError("empty word field", line=lineno)
        if graded:
            try:
                label = float(raw_label)
            except ValueError:
                raise ParseError(
                    f"expected a numeric label, got {raw_label!r}", line=lineno
                ) from None
        else:
            token = raw_label.strip().lower()
            if token in _TRUE_LABELS:
                label = True
            elif token in _FALSE_LABELS:
                label = False
            else:
                raise ParseError(
                    f"expected a True/False label, got {raw_label!r}", line=lineno
                )
        key = (query, candidate)
        if key in seen:
            raise DatasetError(
                "line %d: duplicate pair %s / %s"
                % (lineno, " ".join(query), " ".join(candidate))
            )
        seen.add(key)
        pairs.append(DatasetPair(query, candidate, label))

    if name is None:
        base = str(path).rsplit("/", 1)[-1]
        name = base.rsplit(".", 1)[0] if "." in base else base
    return Dataset(name=name, pairs=pairs, graded=graded, pos_mode=pos_mode)


def compose_phrase(words, source):
    """Average the in-vocabulary member vectors; None when all are absent."""
    return source.phrase(words)


def rank_pairs(dataset: Dataset, scorer) -> Ranking:
    """Score every pair and order them: scored pairs descending (stable on
    ties), then unscorable pairs in their input order."""
    scored = []
    oov = []
    for pair in dataset.pairs:
        score = scorer.score(list(pair.query), list(pair.candidate))
        if score is None:
            oov.append(RankedItem(pair, None, True))
        else:
            scored.append(RankedItem(pair, float(score), False))
    scored.sort(key=lambda item: -item.score)
    return Ranking(items=scored + oov)


def _ap_from_labels(labels) -> float:
    labels = [bool(x) for x in labels]
    positives = sum(labels)
    if positives == 0:
        raise DatasetError("average precision is undefined with no positive pairs")
    hits = 0
    total = 0.0
    for rank, label in enumerate(labels, start=1):
        if label:
            hits += 1
            total += hits / rank
    return total / positives


def average_precision(ranking) -> float:
    """AP over the full ranked list; unscored pairs count at the bottom."""
    if isinstance(ranking, Ranking):
        labels = [item.pair.label for item in ranking.items]
    else:
        labels = list(ranking)
    return _ap_from_labels(labels)


def spearman(pred_scores, gold_scores) -> float:
    """Spearman rank correlation with average ranks on ties."""
    pred = np.asarray(pred_scores, dtype=np.float64)
    gold = np.asarray(gold_scores, dtype=np.float64)
    if pred.size != gold.size:
        raise DatasetError("score lists must have equal length")
    if pred.size < 2:
        raise DatasetError("rank correlation needs at least two pairs")
    if np.ptp(pred) == 0 or np.ptp(gold) == 0:
        raise DatasetError("rank correlation is undefined for constant scores")
    rho = stats.spearmanr(pred, gold).statistic
    if not np.isfinite(rho):
        raise DatasetError("rank correlation is undefined on this input")
    return float(rho)


def directionality_accuracy(positive_pairs, scorer, seed: int = 0) -> float:
    """Fraction of true pairs whose generality score is positive.

    Pairs the scorer cannot resolve are decided by a seeded coin flip.
    """
    pairs = list(positive_pairs)
    if not pairs:
        raise DatasetError("directionality needs at least one pair")
    rng = np.random.default_rng(seed)
    correct = 0
    for pair in pairs:
        score = scorer.score(list(pair.query), list(pair.candidate))
        if score is None:
            correct += int(rng.random() < 0.5)
        elif score > 0:
            correct += 1
    return correct / len(pairs)


def micro_average(reports) -> float:
    """Pair-count-weighted mean of per-dataset metric values."""
    pairs = []
    for entry in reports:
        if isinstance(entry, EvalReport):
            pairs.append((entry.value, entry.n_pairs))
        else:
            value, n = entry
            pairs.append((float(value), int(n)))
    total = sum(n for _, n in pairs)
    if total == 0:
        raise DatasetError("micro average needs at least one scored pair")
    return sum(v * n for v, n in pairs) / total


def evaluate(dataset: Dataset, scorer, seed: int = 0) -> EvalReport:
    """Summarize one dataset: AP for detection, Spearman for graded labels."""
    ranking = rank_pairs(dataset, scorer)
    n_oov = sum(1 for item in ranking.items if item.oov)
    if dataset.graded:
        numeric = [item.score for item in ranking.items if not item.oov]
        sentinel = (min(numeric) - 1.0) if numeric else 0.0
        pred = []
        gold = []
        for pair in dataset.pairs:
            match = next(i for i in ranking.items if i.pair is pair)
            pred.append(sentinel if match.oov else match.score)
            gold.append(float(pair.label))
        value = spearman(pred, gold)
        metric = "spearman"
    else:
        value = average_precision(ranking)
        metric = "AP"
    return EvalReport(
        dataset=dataset.name,
        metric=metric,
        value=value,
        n_pairs=len(dataset.pairs),
        n_oov=n_oov,
    )


def format_reports(reports, style: str = "kv", micro: bool = False) -> str:
    """Render reports as flat key=value blocks or as a TSV table."""
    if style == "kv":
        blocks = []
        for r in reports:
            blocks.append(
                "\n".join(
                    [
                        f"dataset={r.dataset}",
                        f"metric={r.metric}",
                        f"value={r.value!r}",
                        f"n={r.n_pairs}",
                        f"oov={r.n_oov}",
                    ]
                )
            )
        return "\n\n".join(blocks) + "\n"
    if style == "table":
        lines = ["dataset\tmetric\tvalue\tn\toov"]
        for r in reports:
            lines.append(f"{r.dataset}\t{r.metric}\t{r.value!r}\t{r.n_pairs}\t{r.n_oov}")
        if micro:
            ap_reports = [r for r in reports if r.metric == "AP"]
            if ap_reports:
                value = micro_average(ap_reports)
                n = sum(r.n_pairs for r in ap_reports)
                oov = sum(r.n_oov for r in ap_reports)
                lines.append(f"micro\tAP\t{value!r}\t{n}\t{oov}")
        return "\n".join(lines) + "\n"
    raise DatasetError(f"unknown report style {style!r}")
