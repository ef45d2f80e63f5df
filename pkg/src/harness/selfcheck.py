"""Exact property checks of the estimators against brute-force oracles."""

import itertools
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from ..clustering.exceptions import ClusterCountError
from ..clustering.geometry import order_by_first_member, pairwise_distances
from ..clustering.radius import radius_graph_cluster, select_radius
from ..kde.bandwidth import BandwidthPolicy
from ..kde.estimator import oracle_estimate, two_step_estimate
from ..metrics.evaluation import misclassification_error
from ..model.constants import TRUTH
from ..model.types import ClusterAssignment, LabeledSample, Permutation
from ..scenarios.generators import derive_seed
from ..scenarios.laplace import laplace_thresholds, scan_level_set
from .constants import DEFAULT_SEED


class UnionFind:
    """Disjoint sets over 0..n-1 with path compression and union by rank."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        px, py = self.find(x), self.find(y)
        if px == py:
            return
        if self.rank[px] < self.rank[py]:
            px, py = py, px
        self.parent[py] = px
        if self.rank[px] == self.rank[py]:
            self.rank[px] += 1

    def labels(self) -> np.ndarray:
        return np.array([self.find(i) for i in range(len(self.parent))])


def radius_graph_components(distances: np.ndarray, r: float) -> np.ndarray:
    """Transitive closure of ||X_k - X_l|| <= 2r, labelled 1..k by first member."""
    n = len(distances)
    sets = UnionFind(n)
    for k, l in itertools.combinations(range(n), 2):
        if distances[k, l] <= 2.0 * r:
            sets.union(k, l)
    return order_by_first_member(sets.labels())


def brute_force_radius(points: np.ndarray, m: int) -> Tuple[float, np.ndarray]:
    """Smallest candidate radius with at most m components among 0 and all half distances.

    The component count never increases with r, so the sweep bisects the
    sorted candidates.
    """
    distances = pairwise_distances(points)
    candidates = np.unique(np.concatenate([[0.0], distances[np.triu_indices(len(points), 1)] / 2.0]))
    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if radius_graph_components(distances, candidates[mid]).max() <= m:
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo]), radius_graph_components(distances, candidates[lo])


@dataclass(frozen=True)
class CheckResult:
    name: str
    trials: int
    failures: int
    first_failure: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.failures == 0


def _run_trials(name: str, trials: int, seed: int, index: int,
                trial: Callable[[np.random.Generator], Optional[str]]) -> CheckResult:
    failures, first = 0, None
    for t in range(trials):
        problem = trial(np.random.default_rng(derive_seed(seed, index, t)))
        if problem is not None:
            failures += 1
            first = first or f"trial {t}: {problem}"
    return CheckResult(name, trials, failures, first)


def _radius_trial(rng: np.random.Generator) -> Optional[str]:
    n = int(rng.integers(1, 51))
    d = int(rng.integers(1, 4))
    m = int(rng.integers(2, 5))
    points = rng.normal(size=(n, d)) * rng.uniform(0.5, 3.0, size=d)
    if n < m:
        return None
    expected_r, expected_labels = brute_force_radius(points, m)
    r = select_radius(points, m)
    if r != expected_r:
        return f"select_radius {r!r} != brute force {expected_r!r} (n={n}, d={d}, M={m})"
    try:
        labels = radius_graph_cluster(points, m).predicted
    except ClusterCountError:
        if expected_labels.max() < m:
            return None
        return f"radius_graph_cluster refused a partition the sweep realizes (n={n}, M={m})"
    if not np.array_equal(labels, expected_labels):
        return f"partitions differ (n={n}, d={d}, M={m})"
    return None


def _identity_trial(rng: np.random.Generator) -> Optional[str]:
    m = int(rng.integers(2, 5))
    n = int(rng.integers(2 * m, 80))
    labels = rng.integers(1, m + 1, size=n)
    y = rng.normal(size=n) + 3.0 * labels
    sample = LabeledSample(y, rng.normal(size=n), m, labels)
    policy = BandwidthPolicy.silverman() if rng.random() < 0.5 else BandwidthPolicy.fixed(rng.uniform(0.1, 1.0))
    oracle = oracle_estimate(sample, policy)
    two_step = two_step_estimate(sample, ClusterAssignment(labels, m, TRUTH), policy)
    for i, (a, b) in enumerate(zip(oracle, two_step), start=1):
        if not (a.density.same_support(b.density) and np.array_equal(a.density.values, b.density.values)
                and a.weight == b.weight):
            return f"component {i} differs (n={n}, M={m}, {policy})"
    return None


def _permutation_trial(rng: np.random.Generator) -> Optional[str]:
    m = int(rng.integers(2, 5))
    n = int(rng.integers(1, 60))
    truth = rng.integers(1, m + 1, size=n)
    permutation = Permutation(tuple(int(v) for v in rng.permutation(m) + 1))
    relabelled, _ = misclassification_error(permutation.apply(truth), truth, m)
    if relabelled != 0:
        return f"relabelled truth scores {relabelled}"
    predicted = rng.integers(0, m + 1, size=n)
    error, _ = misclassification_error(predicted, truth, m)
    unpermuted = float(np.mean(predicted != truth))
    if error > unpermuted:
        return f"minimum {error} exceeds unpermuted {unpermuted}"
    return None


def _laplace_trial(rng: np.random.Generator) -> Optional[str]:
    while True:
        alpha1 = rng.uniform(0.05, 0.95)
        sigma = rng.uniform(0.3, 2.0)
        ell = sigma * rng.uniform(2.0, 10.0)
        thresholds = laplace_thresholds(alpha1, sigma, ell)
        # stay clear of the validity boundary
        if thresholds.valid and abs(np.log(alpha1 / (1.0 - alpha1))) < 0.8 * ell / sigma:
            break
    for fraction in (0.1, 0.5, 0.9):
        t = thresholds.t_star + fraction * (thresholds.t_upper - thresholds.t_star)
        count = scan_level_set(alpha1, sigma, ell, t)
        if count != 2:
            return f"{count} super-level interval(s) at t={t:.6g} (alpha1={alpha1:.4f}, sigma={sigma:.4f}, ell={ell:.4f})"
    return None


def run_selfcheck(seed: int = DEFAULT_SEED, radius_trials: int = 500, identity_trials: int = 100,
                  permutation_trials: int = 1000, laplace_trials: int = 50) -> List[CheckResult]:
    """Run every property check; each trial draws from its own derived seed."""
    results = [
        _run_trials("radius graph vs brute-force sweep", radius_trials, seed, 0, _radius_trial),
        _run_trials("perfect assignment equals oracle", identity_trials, seed, 1, _identity_trial),
        _run_trials("permutation-invariant error", permutation_trials, seed, 2, _permutation_trial),
        _run_trials("Laplace thresholds vs level-set scan", laplace_trials, seed, 3, _laplace_trial),
    ]
    for result in results:
        if result.passed:
            logging.info(f"PASS {result.name} ({result.trials} trials)")
        else:
            logging.error(f"FAIL {result.name}: {result.failures}/{result.trials} ({result.first_failure})")
    return results
