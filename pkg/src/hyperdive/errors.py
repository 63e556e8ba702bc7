"""Exception types shared across the pipeline stages."""


class HyperdiveError(Exception):
    """Base class for all package-specific errors."""


class IngestError(HyperdiveError):
    """Raw input could not be decoded or read."""


class ParseError(HyperdiveError):
    """A structured input file is malformed.

    Carries the offending line number when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(HyperdiveError):
    """An option value or combination of options is invalid."""


class InternalError(HyperdiveError):
    """An invariant that upstream stages should have guaranteed was violated."""


class TrainingError(HyperdiveError):
    """Optimization failed (non-finite parameters, bad hyperparameters)."""


class DatasetError(HyperdiveError):
    """An evaluation dataset violates its contract."""
