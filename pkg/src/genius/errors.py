"""Exception hierarchy shared by every pipeline stage.

All engine errors derive from GeniusError so callers (CLI, service) can map
any domain failure to one exit code / HTTP status without enumerating types.
Messages always name the offending location (file, line, id, ...).
"""


class GeniusError(Exception):
    """Base class for all engine errors."""


# --- ingest ---------------------------------------------------------------


class IngestError(GeniusError):
    pass


class MissingFile(IngestError):
    pass


class MalformedManifest(IngestError):
    pass


class MalformedSignals(IngestError):
    pass


class NonMonotonicTimestamps(IngestError):
    pass


class RaggedColumns(IngestError):
    pass


class NonNumericCell(IngestError):
    pass


class EmptyLog(IngestError):
    pass


# --- describe -------------------------------------------------------------


class DescribeError(GeniusError):
    pass


class MalformedRules(DescribeError):
    pass


class VisionServiceUnavailable(DescribeError):
    pass


class VisionServiceMalformedReply(DescribeError):
    pass


class CombinerServiceUnavailable(DescribeError):
    pass


class CombinerServiceMalformedReply(DescribeError):
    pass


class EmptyDescription(DescribeError):
    pass


# --- embed ----------------------------------------------------------------


class EmbedError(GeniusError):
    pass


class NoTokens(EmbedError):
    pass


class EmbedderServiceUnavailable(EmbedError):
    pass


class DimensionMismatch(GeniusError):
    """Vector length differs from the collection's declared dimension."""


# --- store ----------------------------------------------------------------


class StoreError(GeniusError):
    pass


class DuplicateId(StoreError):
    pass


class EmptyCollection(StoreError):
    pass


class IoFailure(StoreError):
    pass


class CorruptStore(StoreError):
    pass


# --- retrieve -------------------------------------------------------------


class EmbedderMismatch(GeniusError):
    """Collection was built with a different embedder than the one supplied."""


# --- evaluate -------------------------------------------------------------


class EvaluateError(GeniusError):
    pass


class EmptyProfile(EvaluateError):
    pass


class EmptyInput(EvaluateError):
    pass


class DegenerateProfile(EvaluateError):
    pass


class MissingLabels(EvaluateError):
    pass


# --- config / cli ---------------------------------------------------------


class ConfigError(GeniusError):
    pass
