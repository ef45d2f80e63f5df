"""Reproduction of the simulation tables and the toy interval-clusterer study."""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..clustering.interval import interval_cluster
from ..kde.bandwidth import BandwidthPolicy
from ..model.constants import RADIUS_GRAPH, UNASSIGNED_LABEL
from ..model.exceptions import ValidationError
from ..scenarios.generators import derive_seed, sample_scenario
from ..scenarios.models import (CircleSquareX, ConcentricX, GaussianMixtureY, LaplaceX, ScenarioSpec,
                                ToyUniformX, UniformX)
from ..utils.csv_handler import CSVHandler
from .config import ClustererSpec, ExperimentConfig, Grid
from .constants import (CLUSTERER_TABLE_CLUSTERERS, CLUSTERER_TABLE_SIZES, DEFAULT_REPLICATIONS, DEFAULT_SEED,
                        TABLE1_LAPLACE_SHIFTS, TABLE1_SAMPLE_SIZE, TABLE1_UNIFORM_GAPS, TABLE1_Y_SEPARATIONS,
                        TABLE2_OFFSETS, TABLE3_OUTER_RADII, TABLE_IDS, TOY_BOUND_CONSTANT, TOY_REPLICATIONS,
                        TOY_SAMPLE_SIZES)
from .experiment import run_experiment

TABLE_FIELDS = (
    "table", "cell", "family", "parameter", "value", "y_separation", "n", "clusterer", "component",
    "replications", "failed", "ratio_two_step_em", "ratio_oracle_em", "ratio_two_step_oracle",
    "mean_cluster_error", "mean_weight_error",
)

TOY_FIELDS = (
    "n", "lam", "replications", "mean_error", "bound", "within_bound",
    "all_classified_correct", "mean_rejected_fraction",
)


@dataclass(frozen=True)
class TableCell:
    """One scenario of a table and the clusterers it compares."""
    family: str
    parameter: str
    value: float
    scenario: ScenarioSpec
    clusterers: Sequence[str]
    include_em: bool
    y_separation: Optional[float] = None


def table_cells(table_id: str) -> List[TableCell]:
    """Full factorial grid of one table, in row order."""
    table_id = str(table_id)
    cells = []
    if table_id == "1":
        for delta in TABLE1_Y_SEPARATIONS:
            y_model = GaussianMixtureY.separated(delta)
            for gap in TABLE1_UNIFORM_GAPS:
                cells.append(TableCell(UniformX.name, "delta", gap,
                                       ScenarioSpec(y_model, UniformX(gap), TABLE1_SAMPLE_SIZE),
                                       (RADIUS_GRAPH,), True, delta))
            for shift in TABLE1_LAPLACE_SHIFTS:
                cells.append(TableCell(LaplaceX.name, "ell", shift,
                                       ScenarioSpec(y_model, LaplaceX(shift), TABLE1_SAMPLE_SIZE),
                                       (RADIUS_GRAPH,), True, delta))
    elif table_id == "2":
        for a in TABLE2_OFFSETS:
            for n in CLUSTERER_TABLE_SIZES:
                cells.append(TableCell(CircleSquareX.name, "a", a,
                                       ScenarioSpec(GaussianMixtureY.balanced(), CircleSquareX(a), n),
                                       CLUSTERER_TABLE_CLUSTERERS, False))
    elif table_id == "3":
        for r2 in TABLE3_OUTER_RADII:
            for n in CLUSTERER_TABLE_SIZES:
                cells.append(TableCell(ConcentricX.name, "r2", r2,
                                       ScenarioSpec(GaussianMixtureY.balanced(), ConcentricX(r2), n),
                                       CLUSTERER_TABLE_CLUSTERERS, False))
    else:
        raise ValidationError(f"Unknown table '{table_id}', expected one of {', '.join(TABLE_IDS)}")
    return cells


def reproduce_table(table_id, replications: int = DEFAULT_REPLICATIONS, master_seed: int = DEFAULT_SEED,
                    bandwidth: Optional[BandwidthPolicy] = None, workers: int = 1,
                    output_path: Optional[str] = None, grid: Optional[Grid] = None) -> List[Dict]:
    """Run every cell of a table; one row per cell, clusterer and component.

    Cell c uses the master seed derive_seed(master_seed, c). A None grid
    keeps the automatic per-replication grid.
    """
    bandwidth = bandwidth or BandwidthPolicy.silverman()
    rows = []
    cells = table_cells(table_id)
    for index, cell in enumerate(cells):
        logging.info(f"Table {table_id} cell {index + 1}/{len(cells)}: {cell.family} "
                     f"{cell.parameter}={cell.value}, n={cell.scenario.n}")
        config = ExperimentConfig(
            scenario=cell.scenario,
            clusterers=tuple(ClustererSpec.parse(c) for c in cell.clusterers),
            bandwidth=bandwidth,
            replications=replications,
            master_seed=derive_seed(master_seed, index),
            include_em=cell.include_em,
            grid=grid,
            workers=workers,
        )
        report = run_experiment(config)
        for aggregate in report.aggregates():
            rows.append({
                "table": str(table_id),
                "cell": index + 1,
                "family": cell.family,
                "parameter": cell.parameter,
                "value": cell.value,
                "y_separation": cell.y_separation,
                "n": cell.scenario.n,
                **{key: aggregate[key] for key in TABLE_FIELDS if key in aggregate},
            })
    if output_path:
        CSVHandler(output_path).write_records(TABLE_FIELDS, rows)
        logging.info(f"Wrote {len(rows)} table rows to {output_path}")
    return rows


def table_value(rows: Sequence[Dict], column: str, **selectors) -> float:
    """Single value of a column in the rows matching every selector."""
    matches = [row for row in rows if all(row[k] == v for k, v in selectors.items())]
    if len(matches) != 1:
        raise ValidationError(f"{len(matches)} rows match {selectors}")
    return matches[0][column]


def interval_study(ns: Sequence[int] = TOY_SAMPLE_SIZES, replications: int = TOY_REPLICATIONS,
                   seed: int = DEFAULT_SEED, output_path: Optional[str] = None) -> List[Dict]:
    """Interval clusterer on the toy uniform model with lam = n^(-1/2).

    Reports the mean misclassification rate (rejected points count as errors)
    against lam + 10 log(n) / n, and whether every classified point received
    its true label.
    """
    rows = []
    for size_index, n in enumerate(ns):
        lam = 1.0 / math.sqrt(n)
        spec = ScenarioSpec(GaussianMixtureY.balanced(), ToyUniformX(lam), n)
        errors, rejected, all_correct = [], [], True
        for r in range(replications):
            sample = sample_scenario(spec, derive_seed(seed, size_index, r))
            assignment = interval_cluster(sample.x[:, 0])
            predicted = assignment.predicted
            classified = predicted != UNASSIGNED_LABEL
            all_correct = all_correct and bool(np.all(predicted[classified] == sample.labels[classified]))
            errors.append(float(np.mean(predicted != sample.labels)))
            rejected.append(assignment.rejected / n)
        mean_error = math.fsum(errors) / replications
        bound = lam + TOY_BOUND_CONSTANT * math.log(n) / n
        logging.info(f"Toy model n={n}: mean error {mean_error:.4f} (bound {bound:.4f}), "
                     f"all classified correct: {all_correct}")
        rows.append({
            "n": n,
            "lam": lam,
            "replications": replications,
            "mean_error": mean_error,
            "bound": bound,
            "within_bound": mean_error <= bound,
            "all_classified_correct": all_correct,
            "mean_rejected_fraction": math.fsum(rejected) / replications,
        })
    if output_path:
        CSVHandler(output_path).write_records(TOY_FIELDS, rows)
    return rows
