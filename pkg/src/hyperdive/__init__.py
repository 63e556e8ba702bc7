"""hyperdive: non-negative inclusion-preserving word embeddings and
unsupervised hypernymy detection.

Pipeline: raw text -> token stream -> vocabulary -> windowed co-occurrence
counts -> (optional PMI filter) -> sparse feature spaces or trained
embeddings -> scorer battery -> ranking metrics.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DatasetError,
    HyperdiveError,
    IngestError,
    InternalError,
    ParseError,
    TrainingError,
)

__all__ = [
    "ConfigError",
    "DatasetError",
    "HyperdiveError",
    "IngestError",
    "InternalError",
    "ParseError",
    "TrainingError",
    "__version__",
]
