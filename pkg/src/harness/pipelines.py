"""File pipelines: two-step estimates from a generic CSV and from consumption curves."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from ..kde.bandwidth import BandwidthPolicy
from ..kde.constants import DEFAULT_GRID_POINTS
from ..kde.estimator import ComponentEstimate, auto_grid, fit_components, tabulate, two_step_estimate
from ..metrics.evaluation import misclassification_error
from ..model.constants import KMEANS, RADIUS_GRAPH
from ..model.exceptions import DataError, MalformedCSVError, ValidationError
from ..model.types import ClusterAssignment, LabeledSample, Permutation, make_grid
from ..scenarios.constants import CURVE_LENGTH, DERIVED_VARIABLE_COUNT, V54_LITERAL
from ..scenarios.erdf import erdf_features, synthetic_erdf_curves
from ..utils.csv_handler import CSVHandler
from .config import ClustererSpec, Grid

ERDF_CLUSTERS = 2


def sidecar_path(output_path: Union[str, Path], suffix: str) -> Path:
    """``out.csv`` -> ``out_<suffix>.csv``."""
    path = Path(output_path)
    return path.with_name(f"{path.stem}_{suffix}{path.suffix or '.csv'}")


@dataclass(frozen=True, eq=False)
class EstimateResult:
    assignment: ClusterAssignment
    estimates: List[ComponentEstimate]


def read_sample(input_path: str, m: int) -> LabeledSample:
    """Read a ``y, x1..xd`` CSV into an unlabeled sample."""
    header, table = CSVHandler(input_path).read_table(min_columns=2)
    expected = ["y"] + [f"x{j}" for j in range(1, len(header))]
    if header != expected:
        raise MalformedCSVError(f"expected columns {', '.join(expected)}, got {', '.join(header)}", line=1)
    return LabeledSample(table[:, 0], table[:, 1:], m)


def estimate_from_csv(input_path: str, m: int, clusterer: Union[ClustererSpec, str],
                      bandwidth: BandwidthPolicy, grid: Optional[Grid], output_path: str,
                      seed: Optional[int] = None) -> EstimateResult:
    """Cluster the x columns, estimate each component from y, and write the results.

    Writes the density table (t, fhat_1..fhat_M) to output_path and the
    ``_labels`` and ``_weights`` sidecars beside it.
    """
    if isinstance(clusterer, str):
        clusterer = ClustererSpec.parse(clusterer)
    sample = read_sample(input_path, m)
    logging.info(f"Read {sample.n} observations with {sample.d} covariate(s) from {input_path}")

    assignment = clusterer.cluster(sample.x, m, seed=seed)
    estimates = two_step_estimate(sample, assignment, bandwidth,
                                  make_grid(*grid) if grid is not None else None)

    density_grid = estimates[0].density
    columns = ["t"] + [f"fhat_{i}" for i in range(1, m + 1)]
    values = np.column_stack([density_grid.abscissae] + [e.density.values for e in estimates])
    CSVHandler(output_path).write_rows(columns, values.tolist())
    CSVHandler(str(sidecar_path(output_path, "labels"))).write_rows(
        ["row_index", "predicted_label"], enumerate(assignment.predicted.tolist(), start=1))
    CSVHandler(str(sidecar_path(output_path, "weights"))).write_rows(
        ["component", "weight", "support_count", "bandwidth"],
        [(i, e.weight, e.support_count, e.bandwidth) for i, e in enumerate(estimates, start=1)])

    sizes = ", ".join(str(c) for c in assignment.support_counts())
    logging.info(f"{clusterer} clusters of size {sizes}; densities written to {output_path}")
    return EstimateResult(assignment, estimates)


@dataclass(frozen=True, eq=False)
class ErdfResult:
    x: np.ndarray
    y: np.ndarray
    radius_labels: np.ndarray
    kmeans_labels: np.ndarray
    agreement: float
    estimates: List[List[ComponentEstimate]]


def orient_by_first_feature(labels: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Relabel two clusters so cluster 1 has the smaller mean first covariate."""
    means = [np.mean(x[labels == i, 0]) if np.any(labels == i) else np.inf for i in (1, 2)]
    if means[1] < means[0]:
        return Permutation((2, 1)).apply(labels)
    return labels


def read_curves(curves_csv: str) -> np.ndarray:
    header, table = CSVHandler(curves_csv).read_table()
    if len(header) != CURVE_LENGTH:
        raise DataError(f"{curves_csv}: expected {CURVE_LENGTH} consumption columns, got {len(header)}")
    return table


def write_synthetic_curves(path: str, n: int, seed: Optional[int] = None) -> np.ndarray:
    """Write the synthetic curve fixture; returns its construction labels."""
    curves, labels = synthetic_erdf_curves(n, seed)
    CSVHandler(path).write_rows([f"z{j}" for j in range(1, CURVE_LENGTH + 1)], curves.tolist())
    logging.info(f"Wrote {n} synthetic consumption curves to {path}")
    return labels


def erdf_pipeline(curves_csv: str, output_path: str, convention: str = V54_LITERAL,
                  bandwidth: Optional[BandwidthPolicy] = None, grid_points: int = DEFAULT_GRID_POINTS,
                  seed: Optional[int] = None) -> ErdfResult:
    """Features, radius-graph and k-means clusterings, and per-variable component densities.

    Densities come from the radius-graph clusters. Each derived variable gets
    its own automatic grid, listed in the ``_grids`` sidecar.
    """
    bandwidth = bandwidth or BandwidthPolicy.silverman()
    curves = read_curves(curves_csv)
    x, y = erdf_features(curves, convention)
    logging.info(f"Computed features of {len(curves)} curves ({convention} variations)")

    radius = ClustererSpec(RADIUS_GRAPH).cluster(x, ERDF_CLUSTERS)
    radius_labels = orient_by_first_feature(radius.predicted, x)
    kmeans = ClustererSpec(KMEANS).cluster(x, ERDF_CLUSTERS, seed=seed)
    disagreement, permutation = misclassification_error(kmeans.predicted, radius_labels, ERDF_CLUSTERS)
    kmeans_labels = permutation.apply(kmeans.predicted)
    agreement = 1.0 - disagreement
    logging.info(f"Radius-graph clusters of size {np.bincount(radius_labels, minlength=3)[1:].tolist()}; "
                 f"k-means agrees on {agreement:.1%} of curves")

    estimates, grids = [], []
    for j in range(DERIVED_VARIABLE_COUNT):
        fits = fit_components(y[:, j], radius_labels, ERDF_CLUSTERS, bandwidth)
        grid = auto_grid(y[:, j], [f.bandwidth for f in fits], g=grid_points)
        estimates.append(tabulate(fits, grid))
        grids.append((f"y{j + 1}", grid.lo, grid.hi, grid.g))

    _write_erdf_outputs(output_path, x, y, radius_labels, kmeans_labels, agreement, estimates, grids)
    return ErdfResult(x, y, radius_labels, kmeans_labels, agreement, estimates)


def _write_erdf_outputs(output_path, x, y, radius_labels, kmeans_labels, agreement, estimates,
                        grids: List[Tuple[str, float, float, int]]) -> None:
    columns = ["grid_index"]
    series = []
    for j, pair in enumerate(estimates, start=1):
        for i, estimate in enumerate(pair, start=1):
            columns.append(f"f{i}_y{j}")
            series.append(estimate.density.values)
    g = len(series[0])
    if any(len(s) != g for s in series):
        raise ValidationError("Every derived variable must share the grid size")
    rows = np.column_stack([np.arange(g)] + series).tolist()
    for row in rows:
        row[0] = int(row[0])
    CSVHandler(output_path).write_rows(columns, rows)

    n = len(x)
    CSVHandler(str(sidecar_path(output_path, "features"))).write_rows(
        ["row_index", "x1", "x2"] + [f"y{j}" for j in range(1, DERIVED_VARIABLE_COUNT + 1)],
        ([k + 1] + x[k].tolist() + y[k].tolist() for k in range(n)))
    CSVHandler(str(sidecar_path(output_path, "labels"))).write_rows(
        ["row_index", RADIUS_GRAPH, KMEANS],
        ((k + 1, int(radius_labels[k]), int(kmeans_labels[k])) for k in range(n)))
    CSVHandler(str(sidecar_path(output_path, "grids"))).write_rows(["variable", "lo", "hi", "points"], grids)
    CSVHandler(str(sidecar_path(output_path, "agreement"))).write_rows(["method", "agreement"],
                                                                       [(KMEANS, agreement)])
    logging.info(f"Wrote component densities of {DERIVED_VARIABLE_COUNT} variables to {output_path}")
