"""Exception types shared across the package."""


class GgmError(Exception):
    """Base class for all package errors."""


class InputError(GgmError, ValueError):
    """Malformed or inconsistent user input."""


class ParseError(InputError):
    """A text file could not be parsed.

    ``line`` is 1-based; ``column`` is 1-based or None when the whole line is bad.
    """

    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class DegenerateInputError(InputError):
    """Input is well formed but leaves nothing to compute (e.g. no missing vertex)."""


class ParameterError(GgmError, ValueError):
    """Model parameters outside their valid domain."""


class NumericalError(GgmError, ArithmeticError):
    """A factorization or solve failed."""
