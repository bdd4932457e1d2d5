"""Exception hierarchy shared by every module of the package."""


class EllipsoidPHError(Exception):
    """Base class for all package errors."""

    exit_code = 3


class ParseError(EllipsoidPHError, ValueError):
    """A point-cloud or barcode file could not be parsed."""

    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class EmptyInput(EllipsoidPHError, ValueError):
    """An input file or array holds no points."""


class InvalidArgument(EllipsoidPHError, ValueError):
    """An argument violates a documented precondition."""

    exit_code = 2


class NumericalError(EllipsoidPHError, ArithmeticError):
    """A linear solve or optimisation failed (e.g. non-SPD input)."""

    exit_code = 4


class InvalidComplex(EllipsoidPHError, ValueError):
    """A filtered complex violates monotonicity or closure."""


class InternalError(EllipsoidPHError, RuntimeError):
    """A state that the fixed templates make unreachable was reached."""
