"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: UsageError -> 1, DataError -> 2,
InvariantError -> 3.
"""


class DimtextError(Exception):
    """Base class for all package errors."""


class UsageError(DimtextError):
    """Bad configuration, missing paths, invalid parameters."""


class DataError(DimtextError):
    """Input data violates a precondition (unreadable, empty, degenerate)."""


class InvariantError(DimtextError):
    """An internal consistency check failed; indicates a bug, not bad data."""
