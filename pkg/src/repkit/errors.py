"""Exception types shared across the package.

All library errors derive from :class:`RepkitError` so callers (and the CLI)
can map failures to stable exit codes: data-shaped problems raise
:class:`DataError` subclasses, numerical failures raise :class:`NumericError`.
"""


class RepkitError(Exception):
    """Base class for all errors raised by this package."""


class DataError(RepkitError, ValueError):
    """Input data violates a precondition (shape, range, encoding)."""


class SizeError(DataError):
    """A sequence is too short or its length is incompatible with an operation."""


class RangeError(DataError):
    """A value lies outside the domain an operation accepts."""


class DomainError(DataError):
    """A mathematical precondition fails (non-positive price, zero variance)."""


class IntegrityError(DataError):
    """A serialized artifact (compressed blob, series file) is corrupt."""


class NumericError(RepkitError, ArithmeticError):
    """A numerical routine failed (singular regression, non-finite result)."""


class PipelineError(RepkitError, RuntimeError):
    """A pipeline stage could not be applied; carries the stage name."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"stage '{stage}': {message}")
        self.stage = stage
