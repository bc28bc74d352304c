"""Exception types raised across tidkit."""

from __future__ import annotations

from typing import Sequence


class TidkitError(Exception):
    """Base class for all toolkit errors."""


class PreconditionError(TidkitError, ValueError):
    """An operation was called with inputs outside its documented domain."""


class IngestionError(TidkitError):
    """A raw input file could not be read at all."""


class EmptyCorpusError(TidkitError):
    """Filtering or merging left no interactions behind."""


class ServiceError(TidkitError):
    """Base class for embedding/generation service failures."""


class TransportError(ServiceError):
    """Connection-level failure or retryable HTTP status."""


class FatalServiceError(ServiceError):
    """Non-retryable response from the service (auth, bad request)."""

    def __init__(self, message: str, status_code: int | None = None):
        super().__init__(message)
        self.status_code = status_code


class ProtocolError(ServiceError):
    """The service answered with a body that violates the expected shape."""


class EmbeddingBatchError(ServiceError):
    """Some inputs of an embedding batch failed after all retries."""

    def __init__(self, message: str, failed_indices: Sequence[int]):
        super().__init__(message)
        self.failed_indices = list(failed_indices)


class GenerationError(ServiceError):
    """Chat generation failed after all retries."""


class TidParseError(TidkitError, ValueError):
    """A raw model response did not yield a valid Term-ID sequence."""

    def __init__(self, reason: str, raw: str = ""):
        super().__init__(reason)
        self.reason = reason
        self.raw = raw


class UndefinedSimilarityError(TidkitError, ValueError):
    """Cosine similarity requested for a zero-norm vector."""


class UncoveredTermError(TidkitError, KeyError):
    """A term has no core-term assignment."""

    def __init__(self, term: str):
        super().__init__(term)
        self.term = term

    def __str__(self) -> str:
        return f"Term not covered by core-term map: {self.term}"


class MissingStageOutputError(TidkitError):
    """A pipeline stage was run before the stage that produces its inputs."""

    def __init__(self, path: str, command: str):
        super().__init__(f"Missing {path}; run `tidkit {command}` first")
        self.path = path
        self.command = command


class SmokeCheckError(TidkitError):
    """The end-to-end smoke run finished but missed an expected metric."""
