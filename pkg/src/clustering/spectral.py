"""Spectral clustering with a Gaussian similarity and the symmetric normalized Laplacian."""

import logging
from typing import Optional, Union

import numpy as np
from scipy.linalg import eigh

from ..model.constants import SPECTRAL
from ..model.exceptions import ValidationError
from ..model.types import ClusterAssignment
from .constants import (SIGMA_AUTO, SIGMA_SEARCH, SIGMA_SEARCH_CANDIDATES,
                        SIGMA_SEARCH_MAX_DEGREE_SPREAD, SPECTRAL_KMEANS_RESTARTS)
from .exceptions import ClusteringError, FewerPointsThanClustersError, IsolatedPointError
from .geometry import as_points, pairwise_distances
from .kmeans import kmeans_cluster


def gaussian_similarity(distances: np.ndarray, sigma: float) -> np.ndarray:
    """W_kl = exp(-||X_k - X_l||^2 / (2 sigma^2)) with a zero diagonal."""
    similarity = np.exp(-distances ** 2 / (2.0 * sigma ** 2))
    np.fill_diagonal(similarity, 0.0)
    return similarity


def median_sigma(distances: np.ndarray) -> float:
    """Median of the nonzero pairwise distances."""
    nonzero = distances[np.triu_indices(len(distances), k=1)]
    nonzero = nonzero[nonzero > 0]
    if len(nonzero) == 0:
        raise ClusteringError("all covariates coincide; no kernel width can separate them")
    return float(np.median(nonzero))


def spectral_embedding(similarity: np.ndarray, k: int) -> np.ndarray:
    """Row-normalized eigenvectors of the k smallest eigenvalues of I - D^(-1/2) W D^(-1/2)."""
    degrees = similarity.sum(axis=1)
    if np.any(degrees <= 0) or not np.all(np.isfinite(degrees)):
        raise IsolatedPointError("isolated point at this sigma")
    inv_sqrt = 1.0 / np.sqrt(degrees)
    laplacian = np.eye(len(similarity)) - inv_sqrt[:, None] * similarity * inv_sqrt[None, :]
    try:
        _, vectors = eigh(laplacian, subset_by_index=[0, k - 1])
    except (np.linalg.LinAlgError, ValueError) as e:
        raise ClusteringError(f"eigendecomposition of the graph Laplacian failed: {e}")
    norms = np.linalg.norm(vectors, axis=1)
    if np.any(norms <= 1e-12):
        raise IsolatedPointError("isolated point at this sigma: zero embedding row")
    return vectors / norms[:, None]


def _cluster_embedding(distances, k, sigma, seed):
    embedding = spectral_embedding(gaussian_similarity(distances, sigma), k)
    return kmeans_cluster(embedding, k, restarts=SPECTRAL_KMEANS_RESTARTS, seed=seed)


def _search_sigma(distances: np.ndarray, k: int, seed: Optional[int]):
    """Kernel width whose embedding k-means has the smallest within-cluster sum of squares."""
    upper = distances[np.triu_indices(len(distances), k=1)]
    upper = upper[upper > 0]
    if len(upper) == 0:
        raise ClusteringError("all covariates coincide; no kernel width can separate them")

    best = None
    for sigma in np.geomspace(upper.min(), upper.max(), SIGMA_SEARCH_CANDIDATES):
        similarity = gaussian_similarity(distances, sigma)
        degrees = similarity.sum(axis=1)
        if np.any(degrees <= 0):
            continue
        inv_sqrt = 1.0 / np.sqrt(degrees)
        if inv_sqrt.max() - inv_sqrt.min() >= SIGMA_SEARCH_MAX_DEGREE_SPREAD:
            continue
        try:
            assignment = _cluster_embedding(distances, k, sigma, seed)
        except IsolatedPointError:
            continue
        logging.debug(f"Spectral width {sigma:.6g}: embedding WCSS {assignment.inertia:.6g}")
        if best is None or assignment.inertia < best[1].inertia:
            best = (float(sigma), assignment)
    if best is None:
        raise IsolatedPointError("isolated point at every candidate sigma")
    return best


def spectral_cluster(points, k: int, sigma: Union[float, str] = SIGMA_AUTO,
                     seed: Optional[int] = None) -> ClusterAssignment:
    """Normalized spectral clustering followed by k-means on the embedding.

    ``sigma`` is a positive width, ``"auto"`` (median pairwise distance)
    or ``"search"`` (width minimizing the embedding's k-means WCSS).
    """
    points = as_points(points)
    n = len(points)
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if n < k:
        raise FewerPointsThanClustersError(f"fewer points than clusters: n={n}, k={k}")
    if k == 1:
        return ClusterAssignment(np.ones(n, dtype=int), 1, SPECTRAL)

    distances = pairwise_distances(points)
    if sigma == SIGMA_SEARCH:
        width, assignment = _search_sigma(distances, k, seed)
    else:
        if sigma == SIGMA_AUTO:
            width = median_sigma(distances)
        elif isinstance(sigma, str):
            raise ValidationError(f"sigma must be positive, 'auto' or 'search', got {sigma}")
        else:
            width = float(sigma)
        if not width > 0:
            raise ValidationError(f"sigma must be positive, 'auto' or 'search', got {sigma}")
        assignment = _cluster_embedding(distances, k, width, seed)

    logging.debug(f"Spectral clustering with sigma={width:.6g}")
    return ClusterAssignment(assignment.predicted, k, SPECTRAL, inertia=assignment.inertia,
                             extras={"sigma": width})
