"""Single-linkage radius-graph clustering.

Two observations are linked when their closed balls of radius r meet,
i.e. ||X_k - X_l|| <= 2r. The number of connected components M_r only
changes at half the edge lengths of a Euclidean minimum spanning tree, so
the smallest radius giving at most M components is read off the sorted
tree edges.
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ..model.constants import RADIUS_GRAPH
from ..model.exceptions import ValidationError
from ..model.types import ClusterAssignment
from .exceptions import ClusterCountError, FewerPointsThanClustersError
from .geometry import as_points, order_by_first_member, pairwise_distances


def affinity_components(points, r: float) -> List[List[int]]:
    """Connected components of the graph with A_kl = 1 iff ||X_k - X_l|| <= 2r.

    Depth-first search on the dense affinity matrix. Blocks hold 0-based
    indices, sorted, and are ordered by their smallest member.
    """
    if r < 0:
        raise ValidationError(f"Radius must be nonnegative, got {r}")
    points = as_points(points)
    adjacency = pairwise_distances(points) <= 2.0 * r
    n = len(points)
    seen = np.zeros(n, dtype=bool)
    blocks = []
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        stack = [start]
        block = []
        while stack:
            k = stack.pop()
            block.append(k)
            neighbours = np.flatnonzero(adjacency[k] & ~seen)
            seen[neighbours] = True
            stack.extend(int(v) for v in neighbours)
        blocks.append(sorted(block))
    return blocks


def minimum_spanning_tree(distances: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Prim's algorithm on a dense distance matrix.

    Returns the (n-1) x 2 edge array and the edge lengths. Zero distances
    are ordinary edges here, unlike sparse graph routines that read zeros
    as missing edges.
    """
    n = len(distances)
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    best = distances[0].copy()
    parent = np.zeros(n, dtype=int)
    edges = np.zeros((max(n - 1, 0), 2), dtype=int)
    lengths = np.zeros(max(n - 1, 0))
    for step in range(n - 1):
        k = int(np.argmin(np.where(in_tree, np.inf, best)))
        edges[step] = (parent[k], k)
        lengths[step] = best[k]
        in_tree[k] = True
        closer = ~in_tree & (distances[k] < best)
        best[closer] = distances[k][closer]
        parent[closer] = k
    return edges, lengths


@dataclass(frozen=True)
class RadiusProfile:
    """Critical radii at which the component count drops, in descending order."""
    merge_radii: Tuple[float, ...]
    n: int

    def component_count(self, r: float) -> int:
        """M_r = 1 + #{merge radii > r} (n components when r is below every merge)."""
        if self.n == 0:
            return 0
        return 1 + sum(1 for radius in self.merge_radii if radius > r)

    def radius_for(self, m: int) -> float:
        """Smallest r with M_r <= m."""
        if m < 1:
            raise ValidationError(f"Target cluster count must be >= 1, got {m}")
        if self.n <= m:
            return 0.0
        return self.merge_radii[m - 1]


def radius_profile(points) -> RadiusProfile:
    """The full map r -> M_r, stored as half the MST edge lengths."""
    points = as_points(points)
    if len(points) < 2:
        return RadiusProfile((), len(points))
    _, lengths = minimum_spanning_tree(pairwise_distances(points))
    return RadiusProfile(tuple(float(v) for v in sorted(lengths / 2.0, reverse=True)), len(points))


def select_radius(points, m: int) -> float:
    """r_n = inf{r > 0 : M_r <= m}: the m-th largest merge radius, or 0 when n <= m."""
    return radius_profile(points).radius_for(m)


def radius_graph_cluster(points, m: int) -> ClusterAssignment:
    """Exactly m clusters from the radius graph at the selected radius."""
    points = as_points(points)
    n = len(points)
    if m < 1:
        raise ValidationError(f"Target cluster count must be >= 1, got {m}")
    if n < m:
        raise FewerPointsThanClustersError(f"fewer points than clusters: n={n}, M={m}")

    edges, lengths = minimum_spanning_tree(pairwise_distances(points))
    halves = lengths / 2.0
    radius = 0.0 if n <= m else float(np.sort(halves)[::-1][m - 1])

    kept = edges[halves <= radius]
    graph = coo_matrix((np.ones(len(kept)), (kept[:, 0], kept[:, 1])), shape=(n, n))
    count, raw = connected_components(graph, directed=False)
    if count < m:
        raise ClusterCountError(
            f"cannot realize exactly M clusters: {count} component(s) at r={radius:.6g} for M={m}")

    logging.debug(f"Radius graph: r={radius:.6g}, cluster sizes {np.bincount(raw).tolist()}")
    return ClusterAssignment(order_by_first_member(raw), m, RADIUS_GRAPH, radius=radius)
