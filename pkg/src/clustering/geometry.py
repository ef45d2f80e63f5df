"""Point handling shared by the clusterers."""

import numpy as np
from scipy.spatial.distance import pdist, squareform

from ..model.exceptions import DataError, ValidationError


def as_points(points) -> np.ndarray:
    """Coerce covariates to an n x d float matrix (a vector becomes n x 1)."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    if points.ndim != 2 or points.shape[0] < 1:
        raise ValidationError("Covariates must be a nonempty vector or n x d matrix")
    if not np.all(np.isfinite(points)):
        raise DataError("Covariates contain non-finite values")
    return points


def pairwise_distances(points: np.ndarray) -> np.ndarray:
    """Dense Euclidean distance matrix."""
    if len(points) == 1:
        return np.zeros((1, 1))
    return squareform(pdist(points, metric="euclidean"))


def order_by_first_member(raw_labels) -> np.ndarray:
    """Renumber arbitrary cluster ids as 1..k in order of their smallest member index."""
    _, first, inverse = np.unique(raw_labels, return_index=True, return_inverse=True)
    ranks = np.empty(len(first), dtype=int)
    ranks[np.argsort(first)] = np.arange(1, len(first) + 1)
    return ranks[inverse.ravel()]
