"""Error metrics for component estimates and clusterings."""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import trapezoid

from ..model.exceptions import GridMismatchError, NumericError, ValidationError
from ..model.types import ClusterAssignment, DensityGrid, Permutation, enumerate_permutations


def l1_distance(f: DensityGrid, g: DensityGrid) -> float:
    """Trapezoidal integral of |f - g| over a shared grid."""
    if not f.same_support(g):
        raise GridMismatchError(f"Grids differ: [{f.lo}, {f.hi}]x{f.g} vs [{g.lo}, {g.hi}]x{g.g}")
    return float(trapezoid(np.abs(f.values - g.values), dx=f.step))


def misclassification_error(predicted: Union[ClusterAssignment, np.ndarray], truth,
                            m: int) -> Tuple[float, Permutation]:
    """min over permutations pi of (1/n) #{k : pi(I_hat_k) != I_k}.

    Label 0 never matches a true label. Ties go to the first permutation in
    lexicographic order.
    """
    if isinstance(predicted, ClusterAssignment):
        predicted = predicted.predicted
    predicted = np.asarray(predicted, dtype=int)
    truth = np.asarray(truth, dtype=int)
    if predicted.shape != truth.shape or predicted.ndim != 1:
        raise ValidationError(f"Predicted shape {predicted.shape} does not match truth {truth.shape}")
    if np.any(truth < 1) or np.any(truth > m):
        raise ValidationError(f"True labels must lie in 1..{m}")
    if np.any(predicted < 0) or np.any(predicted > m):
        raise ValidationError(f"Predicted labels must lie in 0..{m}")

    # confusion[p, t]: predicted p in 0..m against truth t in 1..m
    confusion = np.zeros((m + 1, m + 1), dtype=np.int64)
    np.add.at(confusion, (predicted, truth), 1)
    rows = np.arange(1, m + 1)

    best_correct, best = -1, None
    for permutation in enumerate_permutations(m):
        correct = int(confusion[rows, list(permutation.mapping)].sum())
        if correct > best_correct:
            best_correct, best = correct, permutation
    n = len(truth)
    return (n - best_correct) / n, best


@dataclass(frozen=True)
class ReplicationRecord:
    """Errors of one clusterer on one Monte Carlo replication."""
    clusterer: str
    replication: int
    seed: int
    l1_two_step: Tuple[float, ...]
    l1_oracle: Tuple[float, ...]
    cluster_error: float
    weight_error: Tuple[float, ...] = ()
    rejected: int = 0
    l1_em: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if len(self.l1_two_step) != len(self.l1_oracle):
            raise ValidationError("Two-step and oracle errors cover different components")
        if self.l1_em is not None and len(self.l1_em) != len(self.l1_oracle):
            raise ValidationError("EM errors cover a different number of components")
        for value in self.l1_two_step + self.l1_oracle + (self.l1_em or ()):
            # L1 distance between densities is at most 2, up to quadrature error
            if not 0.0 <= value <= 2.0 + 1e-2:
                raise ValidationError(f"L1 error outside [0, 2]: {value}")
        if not 0.0 <= self.cluster_error <= 1.0:
            raise ValidationError(f"Clustering error outside [0, 1]: {self.cluster_error}")

    @property
    def m(self) -> int:
        return len(self.l1_oracle)


@dataclass(frozen=True)
class RatioStatistics:
    """Ratios of Monte Carlo mean L1 errors for one component."""
    component: int
    two_step_vs_em: Optional[float]
    oracle_vs_em: Optional[float]
    two_step_vs_oracle: float


def mean_and_standard_error(values: Sequence[float]) -> Tuple[float, float]:
    """Compensated mean and its Monte Carlo standard error."""
    values = [float(v) for v in values]
    if not values:
        raise ValidationError("Cannot average an empty collection")
    count = len(values)
    mean = math.fsum(values) / count
    if count < 2:
        return mean, 0.0
    variance = math.fsum((v - mean) ** 2 for v in values) / (count - 1)
    return mean, math.sqrt(variance / count)


def _mean(values) -> float:
    return math.fsum(values) / len(values)


def _ratio(numerator: float, denominator: float, label: str) -> float:
    if denominator == 0:
        raise NumericError(f"Zero mean L1 error in the denominator of {label}")
    return numerator / denominator


def ratio_statistics(records: Sequence[ReplicationRecord], component: int) -> RatioStatistics:
    """Ratios of mean errors (not means of ratios) for component i, 1-based."""
    if not records:
        raise ValidationError("Ratio statistics need at least one replication")
    if not 1 <= component <= records[0].m:
        raise ValidationError(f"Component must lie in 1..{records[0].m}, got {component}")
    i = component - 1
    two_step = _mean([r.l1_two_step[i] for r in records])
    oracle = _mean([r.l1_oracle[i] for r in records])

    two_step_vs_em = oracle_vs_em = None
    if all(r.l1_em is not None for r in records):
        em = _mean([r.l1_em[i] for r in records])
        two_step_vs_em = _ratio(two_step, em, "two-step vs EM")
        oracle_vs_em = _ratio(oracle, em, "oracle vs EM")
    return RatioStatistics(component, two_step_vs_em, oracle_vs_em,
                           _ratio(two_step, oracle, "two-step vs oracle"))


@dataclass(frozen=True)
class OracleDominance:
    """Monte Carlo comparison of two-step and oracle mean L1 errors."""
    component: int
    two_step_mean: float
    two_step_se: float
    oracle_mean: float
    oracle_se: float
    holds: bool


def oracle_dominance(records: Sequence[ReplicationRecord], component: int,
                     z: float = 3.0) -> OracleDominance:
    """Check mean(L1 two-step) >= mean(L1 oracle) - z standard errors."""
    if not records:
        raise ValidationError("Oracle dominance needs at least one replication")
    i = component - 1
    two_step, two_step_se = mean_and_standard_error([r.l1_two_step[i] for r in records])
    oracle, oracle_se = mean_and_standard_error([r.l1_oracle[i] for r in records])
    difference_se = math.sqrt(two_step_se ** 2 + oracle_se ** 2)
    return OracleDominance(component, two_step, two_step_se, oracle, oracle_se,
                           two_step >= oracle - z * difference_se)


def best_density_alignment(estimates: Sequence[DensityGrid],
                           truths: Sequence[DensityGrid]) -> Tuple[Permutation, List[float]]:
    """Permutation pi minimizing sum_i L1(estimates[pi(i)], truths[i]).

    Returns pi and the aligned per-component errors.
    """
    m = len(truths)
    if len(estimates) != m:
        raise ValidationError(f"{len(estimates)} estimates for {m} true components")
    errors = np.array([[l1_distance(e, t) for t in truths] for e in estimates])
    best, best_total = None, math.inf
    for permutation in enumerate_permutations(m):
        total = math.fsum(errors[permutation.mapping[i] - 1, i] for i in range(m))
        if total < best_total:
            best, best_total = permutation, total
    return best, [float(errors[best.mapping[i] - 1, i]) for i in range(m)]
