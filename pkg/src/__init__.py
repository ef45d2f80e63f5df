"""Two-step nonparametric mixture estimation."""

__version__ = "0.1.0"
