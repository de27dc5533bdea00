"""Exception taxonomy shared by every module.

All errors raised on bad input derive from EpiwatchError so callers
(CLI, HTTP service) can map them to exit codes / status codes in one place.
"""

from __future__ import annotations


class EpiwatchError(Exception):
    """Base class for all epiwatch domain errors."""


class EmptyInput(EpiwatchError):
    """An operation received an empty series or record set."""


class InvalidParameter(EpiwatchError):
    """A parameter is outside its legal range (window=0, shape<=0, ...)."""


class OutOfRange(EpiwatchError):
    """A requested date range does not overlap the series range."""


class SchemaError(EpiwatchError):
    """A CSV header does not match the canonical schema."""

    def __init__(self, message: str, column: str | None = None):
        super().__init__(message)
        self.column = column


class RowError(EpiwatchError):
    """A CSV row failed to parse; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnknownRegion(EpiwatchError):
    """A region name/code could not be resolved against the registry."""


class AmbiguousRegion(EpiwatchError):
    """Two or more registry names tie at minimal edit distance."""

    def __init__(self, raw: str, candidates: list[str]):
        super().__init__(
            f"{raw!r} matches several regions equally well: {', '.join(sorted(candidates))}"
        )
        self.candidates = list(candidates)


class InsufficientData(EpiwatchError):
    """Not enough usable observations for the requested estimate."""


class UndefinedDoubling(EpiwatchError):
    """Doubling time is undefined for a zero growth rate."""


class InvalidSerialInterval(EpiwatchError):
    """Serial-interval mass is empty, negative, or not normalized."""


class NoWaveStructure(EpiwatchError):
    """The series has no interior peak to anchor wave detection."""
