"""Lloyd's k-means with k-means++ seeding and restarts."""

import logging
from typing import List, Optional, Tuple

import numpy as np

from ..model.constants import KMEANS
from ..model.exceptions import ValidationError
from ..model.types import ClusterAssignment
from .constants import DEFAULT_KMEANS_RESTARTS, KMEANS_MAX_ITER
from .exceptions import ClusteringError, FewerPointsThanClustersError
from .geometry import as_points, order_by_first_member


def _squared_distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    return ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)


def kmeans_plusplus(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: each new center drawn with probability proportional to D(x)^2."""
    n = len(points)
    chosen = [int(rng.integers(n))]
    for _ in range(1, k):
        dist_sq = _squared_distances(points, points[chosen]).min(axis=1)
        total = dist_sq.sum()
        if total > 0:
            chosen.append(int(rng.choice(n, p=dist_sq / total)))
        else:
            # all remaining mass sits on chosen centers; pick any unused index
            unused = np.setdiff1d(np.arange(n), chosen)
            chosen.append(int(rng.choice(unused)))
    return points[chosen].copy()


def lloyd(points: np.ndarray, centers: np.ndarray,
          max_iter: int = KMEANS_MAX_ITER) -> Tuple[np.ndarray, np.ndarray, List[float]]:
    """Lloyd iterations until no assignment changes.

    Returns 0-based labels, final centers and the within-cluster sum of
    squares after every assignment step.
    """
    k = len(centers)
    centers = centers.copy()
    labels = None
    history = []
    for _ in range(max_iter):
        dist_sq = _squared_distances(points, centers)
        new_labels = np.argmin(dist_sq, axis=1)
        counts = np.bincount(new_labels, minlength=k)
        for j in np.flatnonzero(counts == 0):
            # an emptied cluster takes the point farthest from its center,
            # drawn only from clusters that keep at least one member
            own = dist_sq[np.arange(len(points)), new_labels]
            far = int(np.argmax(np.where(counts[new_labels] > 1, own, -1.0)))
            counts[new_labels[far]] -= 1
            new_labels[far] = j
            counts[j] += 1
        history.append(float(((points - centers[new_labels]) ** 2).sum()))
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        centers = np.array([points[labels == j].mean(axis=0) for j in range(k)])
    else:
        logging.debug(f"k-means stopped after {max_iter} iterations without converging")
    wcss = float(((points - centers[labels]) ** 2).sum())
    if wcss < history[-1]:
        history.append(wcss)
    return labels, centers, history


def kmeans_cluster(points, k: int, restarts: int = DEFAULT_KMEANS_RESTARTS,
                   seed: Optional[int] = None) -> ClusterAssignment:
    """Best of ``restarts`` k-means++ seeded Lloyd runs by within-cluster sum of squares."""
    points = as_points(points)
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if restarts < 1:
        raise ValidationError(f"restarts must be >= 1, got {restarts}")
    if len(points) < k:
        raise FewerPointsThanClustersError(f"fewer points than clusters: n={len(points)}, k={k}")

    best_labels, best_wcss = None, np.inf
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        labels, _, history = lloyd(points, kmeans_plusplus(points, k, rng))
        if np.isfinite(history[-1]) and history[-1] < best_wcss:
            best_labels, best_wcss = labels, history[-1]
    if best_labels is None:
        raise ClusteringError(f"no k-means restart reached a finite within-cluster sum of squares (k={k})")

    logging.debug(f"k-means: best WCSS {best_wcss:.6g} over {restarts} restarts")
    return ClusterAssignment(order_by_first_member(best_labels), k, KMEANS, inertia=best_wcss)
