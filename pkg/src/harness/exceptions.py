"""Harness exceptions."""

from ..model.exceptions import NumericError, ValidationError


class ConfigError(ValidationError):
    """Experiment configuration is invalid or cannot be parsed."""

    def __init__(self, message: str, line: int = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ExperimentAbortedError(NumericError):
    """Too many Monte Carlo replications failed."""
    pass
