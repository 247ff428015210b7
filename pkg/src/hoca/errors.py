"""Exception types shared across the package."""

from __future__ import annotations


class HocaError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(HocaError):
    """A text input does not conform to its grammar."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f" (line {line})" if col is None else f" (line {line}, col {col})"
        super().__init__(message + where)


class UnknownSymbolError(ParseError):
    """A symbol is not part of the relevant alphabet."""


class IllTypedError(HocaError):
    """An operation, test, or configuration does not fit the storage type."""


class UnsupportedOpError(HocaError):
    """An operation falls outside the restricted form a pass requires."""


class InvalidTraceError(HocaError):
    """A trace does not replay through the step semantics."""


class InvalidEncodingError(HocaError):
    """A tree is not the encoding of any configuration."""

    def __init__(self, message: str, position: str = ""):
        self.position = position
        super().__init__(f"{message} at position '{position}'" if position else message)


class UnknownStateError(HocaError):
    """A state name is not part of the automaton."""


class IllFormedTableError(HocaError):
    """A returns table violates its shape or value range."""
