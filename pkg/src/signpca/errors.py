"""Exception types shared across the package."""


class SignPcaError(Exception):
    """Base class for all package errors."""


class InvalidInputError(SignPcaError):
    """An argument violates a precondition (shape, finiteness, norm, ...)."""


class InvalidSpecError(SignPcaError):
    """A model or experiment specification is internally inconsistent."""


class NotConvergedError(SignPcaError):
    """An iterative solver hit its iteration budget.

    The best iterate found so far is attached as ``result`` so callers can
    decide whether to accept it anyway.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class DegenerateIterateError(SignPcaError):
    """A power-type iteration produced the zero vector."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class TooLargeError(SignPcaError):
    """Input dimension exceeds the guard of an exact-enumeration routine."""


class EmptySupportError(SignPcaError):
    """Thresholding removed every coordinate of an initializer vector."""


class CsvParseError(SignPcaError):
    """A CSV file could not be parsed; message carries line/column info."""
