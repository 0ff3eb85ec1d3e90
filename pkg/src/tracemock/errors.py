"""Exception types shared across the package.

Plain I/O failures (file writes, socket binds) deliberately surface as the
stdlib OSError hierarchy; the classes here cover domain errors only.
"""


class TracemockError(Exception):
    """Base class for all package-specific errors."""


class TraceFormatError(TracemockError):
    """A trace file record could not be parsed.

    ``record`` is the 1-based line number of the offending record.
    """

    def __init__(self, record: int, reason: str):
        super().__init__(f"record {record}: {reason}")
        self.record = record
        self.reason = reason


class EmptyRequestOrResponseError(TraceFormatError):
    """A transaction carried an empty request or response."""


class DuplicateIndexError(TraceFormatError):
    """Two records in one trace file share a transaction index."""


class EmptyInputError(TracemockError):
    """An operation that requires non-empty byte input received none."""


class EmptyLibraryError(TracemockError):
    """An operation that requires at least one transaction got an empty library."""


class LengthMismatchError(TracemockError):
    """Prototype and weight vectors have different lengths."""


class InvalidClusterCountError(TracemockError):
    """Requested cluster count is outside 1..n."""


class TooFewTransactionsError(TracemockError):
    """Library is smaller than the number of cross-validation folds."""


class ModelFormatError(TracemockError):
    """Model file is corrupt (bad magic, checksum, or structure)."""


class ModelVersionError(ModelFormatError):
    """Model file uses an unsupported format version."""


class TargetUnreachableError(TracemockError):
    """The recording proxy could not reach or keep the target service."""


class FramingTimeoutError(TracemockError):
    """No complete message arrived within the configured window."""


class FramingProtocolError(TracemockError):
    """A framed message was structurally invalid (e.g. truncated length prefix)."""
