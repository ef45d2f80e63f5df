"""Base exceptions shared by every package."""


class MixtureError(Exception):
    """Base class for all estimation errors."""
    pass


class ValidationError(MixtureError, ValueError):
    """Invalid argument or inconsistent domain object."""
    pass


class GridMismatchError(ValidationError):
    """Two density grids do not share the same abscissae."""
    pass


class DataError(MixtureError):
    """Input data cannot be used as given."""
    pass


class MalformedCSVError(DataError):
    """CSV input does not follow the expected layout."""

    def __init__(self, message: str, line: int = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericError(MixtureError):
    """A numerical procedure could not produce a result."""
    pass
