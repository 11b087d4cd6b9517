"""Exception types raised across the package.

Everything derives from :class:`BinvecError` (itself a ``ValueError``) so
callers can catch one type. :class:`DataError` subclasses mark problems with
input data, which the command line reports with exit code 2.
"""


class BinvecError(ValueError):
    pass


class DataError(BinvecError):
    """Bad or inconsistent input data."""


class ParseError(DataError):
    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class EmptyInputError(DataError):
    pass


class DimensionError(DataError):
    pass


class LengthError(DataError):
    """Bit codes of different lengths were combined."""


class AlignmentError(DataError):
    """A code length that is not a multiple of 64 bits."""


class InsufficientDataError(DataError):
    pass


class ConsistencyError(DataError):
    """Two inputs that should share a vocabulary do not."""


class DegenerateQueryError(DataError):
    pass


class ConfigurationError(BinvecError):
    """Invalid parameters (code size, hyperparameters, ...)."""


class DomainError(BinvecError):
    """Argument outside the mathematical domain of a function."""
