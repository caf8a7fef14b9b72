"""Exceptions raised by the punkt framework.

Every error derives from ``PunktError`` (itself a ``ValueError``) so callers can
catch analysis failures without swallowing programming errors.
"""

from typing import Any


class PunktError(ValueError):
    """Base class for all analysis errors."""


class DocumentDecodeError(PunktError):
    """Raised when input bytes are not valid UTF-8."""

    def __init__(self, source_id: str, offset: int, reason: str):
        self.source_id = source_id
        self.offset = offset
        self.reason = reason
        super().__init__(
            f"{source_id}: invalid UTF-8 at byte offset {offset} ({reason})"
        )

    def __reduce__(self):
        return type(self), (self.source_id, self.offset, self.reason)


class EmptyDocumentError(PunktError):
    """Raised for zero-length input."""


class UnbalancedMarkersError(PunktError):
    """Raised when only one of the boilerplate markers is present."""


class EmptySeriesError(PunktError):
    """Raised when a series, table or ranking would be empty."""


class NonPositiveValueError(PunktError):
    """Raised when a value that must be positive is zero or negative."""


class InsufficientPointsError(PunktError):
    """Raised when a fit has fewer points than it needs."""


class DegenerateFitError(PunktError):
    """Raised when the data cannot identify the model parameters."""


class ConvergenceError(PunktError):
    """Raised when an iterative fit hits its iteration cap.

    ``best`` holds the best-so-far parameters.
    """

    def __init__(self, message: str, best: dict[str, Any]):
        self.message = message
        self.best = best
        super().__init__(message)

    def __reduce__(self):
        return type(self), (self.message, self.best)


class TableMismatchError(PunktError):
    """Raised when tokens and their frequency table disagree."""


class ConfigError(PunktError):
    """Raised for unreadable or invalid configuration."""


class StageError(PunktError):
    """Wraps a failure with the pipeline stage it happened in."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {cause}")

    def __reduce__(self):
        return type(self), (self.stage, self.cause)
