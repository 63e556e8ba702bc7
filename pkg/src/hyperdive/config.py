"""Layered pipeline configuration: defaults < config file < command flags.

The config file is flat ``key = value`` text: one setting per line, ``#``
starts a comment (full-line or trailing), blank lines are ignored.  Keys
mirror :class:`PipelineConfig` field names exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .errors import ConfigError


@dataclass
class PipelineConfig:
    """Every pipeline stage's knobs, with the documented defaults."""

    # Artifact paths (stages read the ones they need).
    corpus: str | None = None
    tokens: str | None = None
    vocab: str | None = None
    stats: str | None = None
    space: str | None = None
    sgns: str | None = None
    out: str | None = None
    dataset: str | None = None
    report: str | None = None
    stopword_file: str | None = None

    # Preprocessing and counting.
    window: int = 20
    min_count: int = 10
    chunk_length: int = 100
    max_tokens: int | None = None
    threshold_ratio: float = 30.0

    # Training.
    dim: int = 100
    epochs: int = 15
    lr: float = 0.001
    batch_size: int = 128
    neg_ratio: float = 1.5
    neg_samples: int = 5
    debug: bool = False

    # Scoring and topic hashing.
    penalty_weight: float = 5.0
    top_contexts: int = 100
    clusters: int = 100

    # Execution.
    seed: int | None = None
    threads: int = 1


_FIELD_NAMES = tuple(f.name for f in fields(PipelineConfig))
_STR_KEYS = frozenset(
    (
        "corpus", "tokens", "vocab", "stats", "space", "sgns", "out",
        "dataset", "report", "stopword_file",
    )
)
_INT_KEYS = frozenset(
    (
        "window", "min_count", "chunk_length", "dim", "epochs",
        "batch_size", "neg_samples", "top_contexts", "clusters", "threads",
    )
)
_OPT_INT_KEYS = frozenset(("max_tokens", "seed"))
_FLOAT_KEYS = frozenset(("threshold_ratio", "lr", "neg_ratio", "penalty_weight"))
_BOOL_KEYS = frozenset(("debug",))

_TRUE = frozenset(("true", "1", "yes", "on"))
_FALSE = frozenset(("false", "0", "no", "off"))


def _parse_value(key: str, raw: str):
    text = raw.strip()
    if key in _STR_KEYS:
        return text or None
    if key in _OPT_INT_KEYS and text.lower() == "none":
        return None
    try:
        if key in _INT_KEYS or key in _OPT_INT_KEYS:
            return int(text)
        if key in _FLOAT_KEYS:
            return float(text)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {text!r}") from None
    if key in _BOOL_KEYS:
        lowered = text.lower()
        if lowered in _TRUE:
            return True
        if lowered in _FALSE:
            return False
        raise ConfigError(f"bad value for {key}: {text!r} is not a boolean")
    raise ConfigError(f"unknown configuration key {key!r}")


def read_config_file(path) -> dict:
    """Parse a flat key=value file into a {key: raw string} dict."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(
                    f"{path}: line {lineno}: expected 'key = value', got {line!r}"
                )
            values[key.strip()] = value.strip()
    return values


def build_config(file_values=None, overrides=None) -> PipelineConfig:
    """Merge raw file settings and already-typed flag overrides over defaults."""
    cfg = PipelineConfig()
    for key, raw in (file_values or {}).items():
        if key not in _FIELD_NAMES:
            raise ConfigError(f"unknown configuration key {key!r}")
        setattr(cfg, key, _parse_value(key, raw))
    for key, value in (overrides or {}).items():
        if key not in _FIELD_NAMES:
            raise ConfigError(f"unknown configuration key {key!r}")
        setattr(cfg, key, value)
    return cfg
