"""Exception hierarchy shared by every dgprf module.

The CLI maps these onto process exit codes:
    ConfigError, DataParseError -> 2
    CheckpointError -> 3
    NumericalError -> 4
"""

from __future__ import annotations

__all__ = [
    "DgpError",
    "ShapeError",
    "ConfigError",
    "DataParseError",
    "CheckpointError",
    "NumericalError",
]


class DgpError(Exception):
    """Base class for all dgprf errors."""


class ShapeError(DgpError, ValueError):
    """Array dimensions violate an operation's contract."""


class ConfigError(DgpError, ValueError):
    """Run configuration is invalid or references missing files."""


class DataParseError(DgpError, ValueError):
    """A dataset file could not be parsed against its schema.

    Attributes:
        row: 1-based file row of the offending cell, if known.
        col: 1-based column of the offending cell, if known.
    """

    def __init__(self, message: str, row: int | None = None, col: int | None = None) -> None:
        location = ""
        if row is not None:
            location = f" (row {row}" + (f", col {col})" if col is not None else ")")
        super().__init__(message + location)
        self.row = row
        self.col = col


class CheckpointError(DgpError):
    """A checkpoint is unreadable or inconsistent with the requested use."""


class NumericalError(DgpError, ArithmeticError):
    """A computation produced non-finite values or failed to factorize."""
