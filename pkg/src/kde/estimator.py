"""Oracle and two-step kernel density estimates of the mixture components."""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional

import numpy as np

from ..model.exceptions import ValidationError
from ..model.types import ClusterAssignment, DensityGrid, LabeledSample, make_grid
from .bandwidth import BandwidthPolicy, select_bandwidth
from .constants import DEFAULT_GRID_POINTS, GRID_PADDING_BANDWIDTHS
from .exceptions import DegenerateSampleError

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def gaussian_kernel(u):
    """Standard normal density (2 pi)^(-1/2) exp(-u^2 / 2)."""
    u = np.asarray(u, dtype=float)
    values = _INV_SQRT_2PI * np.exp(-0.5 * u * u)
    return float(values) if values.ndim == 0 else values


def kde_evaluate(points, h: float, t):
    """(1 / (N h)) sum_k K((t - Y_k) / h); zero when there are no points."""
    if not h > 0:
        raise ValidationError(f"Bandwidth must be positive, got {h}")
    points = np.asarray(points, dtype=float).ravel()
    t = np.asarray(t, dtype=float)
    if len(points) == 0:
        return 0.0 if t.ndim == 0 else np.zeros(t.shape)
    u = (t[..., None] - points) / h
    values = gaussian_kernel(u).sum(axis=-1) / (len(points) * h)
    return float(values) if values.ndim == 0 else values


@dataclass(frozen=True, eq=False)
class ComponentEstimate:
    """Estimated weight and tabulated density of one mixture component."""
    weight: float
    density: DensityGrid
    support_count: int
    bandwidth: Optional[float]

    def __post_init__(self):
        if not 0.0 <= self.weight <= 1.0:
            raise ValidationError(f"Component weight must lie in [0, 1], got {self.weight}")
        if self.support_count < 0:
            raise ValidationError("Support count cannot be negative")
        if self.support_count == 0 and np.any(self.density.values != 0):
            raise ValidationError("An empty component must have an identically zero density")


@dataclass(frozen=True, eq=False)
class ComponentFit:
    """Points and bandwidth of one component, before tabulation."""
    points: np.ndarray
    bandwidth: Optional[float]
    n: int

    @property
    def support_count(self) -> int:
        return len(self.points)

    @property
    def weight(self) -> float:
        return self.support_count / self.n

    def tabulate(self, grid: DensityGrid) -> ComponentEstimate:
        if self.support_count == 0:
            values = np.zeros(grid.g)
        else:
            values = kde_evaluate(self.points, self.bandwidth, grid.abscissae)
        return ComponentEstimate(self.weight, grid.with_values(values), self.support_count, self.bandwidth)


def fit_components(y, labels, m: int, policy: BandwidthPolicy) -> List[ComponentFit]:
    """Split y by label 1..m and select one bandwidth per nonempty component.

    Label 0 observations belong to no component. A component whose points
    cannot support a data-driven bandwidth borrows the bandwidth of the
    pooled sample.
    """
    y = np.asarray(y, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if labels.shape != y.shape:
        raise ValidationError(f"labels have shape {labels.shape}, expected {y.shape}")

    pooled = None
    fits = []
    for i in range(1, m + 1):
        points = y[labels == i]
        if len(points) == 0:
            fits.append(ComponentFit(points, None, len(y)))
            continue
        try:
            h = select_bandwidth(points, policy)
        except DegenerateSampleError:
            if pooled is None:
                pooled = select_bandwidth(y, policy)
            logging.warning(f"Component {i} has {len(points)} point(s) without spread; "
                            f"using pooled bandwidth {pooled:.6g}")
            h = pooled
        fits.append(ComponentFit(points, h, len(y)))
    return fits


def auto_grid(y, bandwidths: Iterable[Optional[float]], g: int = DEFAULT_GRID_POINTS) -> DensityGrid:
    """Grid spanning [min(y) - 5 h_max, max(y) + 5 h_max]."""
    y = np.asarray(y, dtype=float)
    finite = [h for h in bandwidths if h is not None]
    h_max = max(finite) if finite else 1.0
    pad = GRID_PADDING_BANDWIDTHS * h_max
    return make_grid(float(np.min(y) - pad), float(np.max(y) + pad), g)


def tabulate(fits: List[ComponentFit], grid: Optional[DensityGrid] = None) -> List[ComponentEstimate]:
    """Tabulate fitted components on a shared grid (automatic when omitted)."""
    if grid is None:
        pooled = np.concatenate([f.points for f in fits] + [np.zeros(0)])
        if len(pooled) == 0:
            raise ValidationError("Cannot build an automatic grid without any assigned point")
        grid = auto_grid(pooled, [f.bandwidth for f in fits])
    return [fit.tabulate(grid) for fit in fits]


def oracle_estimate(sample: LabeledSample, policy: BandwidthPolicy,
                    grid: Optional[DensityGrid] = None) -> List[ComponentEstimate]:
    """Component estimates built from the true labels."""
    if not sample.has_labels:
        raise ValidationError("The oracle estimate needs the true labels")
    fits = fit_components(sample.y, sample.labels, sample.m, policy)
    return tabulate(fits, grid if grid is not None else auto_grid(sample.y, [f.bandwidth for f in fits]))


def two_step_estimate(sample: LabeledSample, assignment: ClusterAssignment, policy: BandwidthPolicy,
                      grid: Optional[DensityGrid] = None) -> List[ComponentEstimate]:
    """Component estimates built from the labels predicted by a clusterer."""
    if assignment.n != sample.n:
        raise ValidationError(f"Assignment covers {assignment.n} observations, sample has {sample.n}")
    if assignment.m != sample.m:
        raise ValidationError(f"Assignment has {assignment.m} clusters, sample has {sample.m} components")
    fits = fit_components(sample.y, assignment.predicted, sample.m, policy)
    return tabulate(fits, grid if grid is not None else auto_grid(sample.y, [f.bandwidth for f in fits]))
