from typing import Optional


class ISSVDError(Exception):
    """Base class for every error raised by the library."""


class DimensionError(ISSVDError, ValueError):
    pass


class NonFiniteError(ISSVDError, ValueError):
    pass


class DegenerateInputError(ISSVDError, ValueError):
    """Raised when an operation needs a non-zero matrix or vector and got zeros."""


class ConfigError(ISSVDError, ValueError):
    pass


class SchemaVersionError(ISSVDError, ValueError):
    pass


class NumericalError(ISSVDError, ArithmeticError):
    pass


class InputFileError(ISSVDError, ValueError):
    """
    A problem with a delimited input file, located as precisely as possible.

    Attributes
    ----------
    path : str
        The offending file.
    line : Optional[int]
        1-based line number in the file, if known.
    column : Optional[int]
        1-based column number in the file, if known.
    """

    def __init__(self, message: str, path: str, line: Optional[int] = None, column: Optional[int] = None) -> None:
        self.path = path
        self.line = line
        self.column = column
        where = path
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")


class GridError(ISSVDError, ValueError):
    """Raised when a λ grid is malformed or a requested λ is not on it."""
