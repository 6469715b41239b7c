"""Exception hierarchy shared by all pipeline stages.

Two families matter to callers: ValidationError for misconfiguration or
misuse of an API (CLI exit code 2) and DataError for problems with input
files or records (CLI exit code 3).
"""


class PipelineError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PipelineError):
    """Invalid configuration or invalid arguments to an operation."""


class DataError(PipelineError):
    """Malformed, inconsistent, or missing input data."""


# -- validation errors --

class EmptyInputError(ValidationError):
    """An operation that requires a non-empty sequence received an empty one."""


class EmptyDocumentError(ValidationError):
    """A document with zero words reached a stage that cannot handle it."""


class InvalidBudgetError(ValidationError):
    """Chunk capacity (max_subtokens - overhead) is below one subtoken."""


class InvalidNoiseRateError(ValidationError):
    """Mock scorer noise rate outside [0, 1)."""


class UnknownStrategyError(ValidationError):
    """Unrecognized aggregation strategy or tie policy name."""


class InsufficientModelsError(ValidationError):
    """Fewer scored models than the requested selection size."""


class ConfigError(ValidationError):
    """Run configuration file failed validation; message names the field."""


# -- data errors --

class MalformedRecordError(DataError):
    """A dataset record could not be parsed; message carries line and field."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        super().__init__(message)
        self.line = line
        self.field = field


class LengthMismatchError(DataError):
    """Two parallel sequences that must have equal lengths do not."""


class UnknownLabelError(DataError):
    """A label value outside the configured label map."""


class CoverageGapError(DataError):
    """Span list leaves part of the word range uncovered."""


class OverlapError(DataError):
    """Two spans overlap."""


class OutOfRangeError(DataError):
    """A span lies outside the word range."""


class MalformedDistributionError(DataError):
    """A probability row is negative or does not sum to one."""


class MissingFileError(DataError):
    """A referenced model or tokenizer file does not exist."""


class MetadataMismatchError(DataError):
    """Model and tokenizer artifacts disagree, or an input exceeds the model's limits."""


class ClassCountMismatchError(DataError):
    """A model artifact was trained for a different number of classes."""


class MissingDistributionsError(DataError):
    """A tie policy that needs probability mass was given labels only."""


class MissingPredictionError(DataError):
    """Evaluation input lacks a prediction for a gold document id."""


class ExtraPredictionError(DataError):
    """Evaluation input predicts a document id absent from the gold set."""


class DocIdMismatchError(DataError):
    """Prediction files being ensembled cover different document id sets."""


class DuplicateCellError(DataError):
    """Two ablation records target the same grid cell."""
