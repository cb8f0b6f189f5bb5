"""Exception types shared across the package.

Kept deliberately small: callers (and the CLI exit-code mapping) only need
to distinguish bad input, undecodable paths, operations on unmaterialized
parts of lazy objects, and IO problems.
"""


class PercolimitError(Exception):
    """Base class for package errors."""


class InvalidInputError(PercolimitError, ValueError):
    """An argument violates a documented precondition."""


class DecodeError(InvalidInputError):
    """A path or file failed to decode; ``index`` names the first offender."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class MaterializationError(PercolimitError):
    """An operation needs a part of a lazy object that was never built."""


class GWOverflowError(PercolimitError):
    """A Galton-Watson subtree exceeded its vertex cap while materializing.

    Raised by samplers that must build whole trees; functions that can
    return a partial result report overflow as a value instead.
    """

    def __init__(self, message, cap=None):
        super().__init__(message)
        self.cap = cap


class TreeFileError(DecodeError):
    """A ``.pt`` file is malformed; carries line/column of the offender."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message, index=column)
        self.line = line
        self.column = column
