"""Kernel density estimation exceptions."""

from ..model.exceptions import NumericError


class DegenerateSampleError(NumericError):
    """Bandwidth selection needs at least two distinct values."""
    pass
