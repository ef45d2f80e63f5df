"""Clustering exceptions."""

from ..model.exceptions import DataError, NumericError


class ClusteringError(NumericError):
    """Base class for clustering failures."""
    pass


class FewerPointsThanClustersError(ClusteringError, DataError):
    """Fewer observations than requested clusters."""
    pass


class ClusterCountError(ClusteringError):
    """The radius graph cannot realize exactly M clusters."""
    pass


class IsolatedPointError(ClusteringError):
    """A point has no similarity mass at the chosen kernel width."""
    pass
