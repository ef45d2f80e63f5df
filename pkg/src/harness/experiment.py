"""Seeded Monte Carlo replications of the two-step estimator and their report."""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .. import __version__
from ..clustering.em import em_gaussian_1d, gaussian_density_grid
from ..kde.estimator import auto_grid, fit_components, tabulate
from ..metrics.evaluation import (ReplicationRecord, best_density_alignment, l1_distance,
                                  mean_and_standard_error, misclassification_error, ratio_statistics)
from ..model.exceptions import MixtureError, ValidationError
from ..model.types import LabeledSample, make_grid
from ..scenarios.generators import derive_seed, sample_scenario, true_component_density
from ..utils.csv_handler import CSVHandler
from .config import ExperimentConfig, render_config
from .constants import MAX_FAILED_FRACTION
from .exceptions import ExperimentAbortedError

AGGREGATE_FIELDS = (
    "clusterer", "component", "replications", "failed",
    "ratio_two_step_em", "ratio_oracle_em", "ratio_two_step_oracle",
    "mean_l1_two_step", "mean_l1_oracle", "mean_l1_em",
    "mean_cluster_error", "se_cluster_error", "mean_weight_error", "mean_rejected",
)


@dataclass(frozen=True)
class ReplicationFailure:
    """A replication aborted by an estimation error."""
    replication: int
    seed: int
    message: str


@dataclass
class ReplicationOutcome:
    replication: int
    seed: int
    records: List[ReplicationRecord] = field(default_factory=list)
    failure: Optional[ReplicationFailure] = None


def replication_fieldnames(m: int) -> List[str]:
    """Per-replication CSV columns for M components."""
    names = ["clusterer", "replication", "seed", "cluster_error", "rejected"]
    for prefix in ("l1_two_step", "l1_oracle", "l1_em", "weight_error"):
        names += [f"{prefix}_{i}" for i in range(1, m + 1)]
    return names


def record_to_row(record: ReplicationRecord) -> List:
    em = record.l1_em if record.l1_em is not None else (None,) * record.m
    return ([record.clusterer, record.replication, record.seed, record.cluster_error, record.rejected]
            + list(record.l1_two_step) + list(record.l1_oracle) + list(em) + list(record.weight_error))


def record_from_row(row: Dict[str, str], m: int) -> ReplicationRecord:
    """Inverse of record_to_row on a CSV dictionary row."""
    def floats(prefix):
        return tuple(float(row[f"{prefix}_{i}"]) for i in range(1, m + 1))

    has_em = all(row[f"l1_em_{i}"] != "" for i in range(1, m + 1))
    return ReplicationRecord(
        clusterer=row["clusterer"],
        replication=int(row["replication"]),
        seed=int(row["seed"]),
        l1_two_step=floats("l1_two_step"),
        l1_oracle=floats("l1_oracle"),
        cluster_error=float(row["cluster_error"]),
        weight_error=floats("weight_error"),
        rejected=int(row["rejected"]),
        l1_em=floats("l1_em") if has_em else None,
    )


def aggregate_records(records: Sequence[ReplicationRecord], clusterers: Sequence[str], m: int,
                      failed: int = 0) -> List[Dict]:
    """One aggregate row per clusterer and component.

    Only compensated sums over the record multiset enter, so the rows do not
    depend on record order.
    """
    rows = []
    for clusterer in clusterers:
        subset = sorted((r for r in records if r.clusterer == clusterer), key=lambda r: r.replication)
        if not subset:
            continue
        error_mean, error_se = mean_and_standard_error([r.cluster_error for r in subset])
        rejected = math.fsum(r.rejected for r in subset) / len(subset)
        for component in range(1, m + 1):
            i = component - 1
            ratios = ratio_statistics(subset, component)
            has_em = ratios.two_step_vs_em is not None
            rows.append({
                "clusterer": clusterer,
                "component": component,
                "replications": len(subset),
                "failed": failed,
                "ratio_two_step_em": ratios.two_step_vs_em,
                "ratio_oracle_em": ratios.oracle_vs_em,
                "ratio_two_step_oracle": ratios.two_step_vs_oracle,
                "mean_l1_two_step": math.fsum(r.l1_two_step[i] for r in subset) / len(subset),
                "mean_l1_oracle": math.fsum(r.l1_oracle[i] for r in subset) / len(subset),
                "mean_l1_em": math.fsum(r.l1_em[i] for r in subset) / len(subset) if has_em else None,
                "mean_cluster_error": error_mean,
                "se_cluster_error": error_se,
                "mean_weight_error": math.fsum(r.weight_error[i] for r in subset) / len(subset),
                "mean_rejected": rejected,
            })
    return rows


@dataclass
class ExperimentReport:
    """Per-replication records, failures and the aggregates derived from them."""
    config: ExperimentConfig
    records: List[ReplicationRecord]
    failures: List[ReplicationFailure] = field(default_factory=list)
    version: str = __version__

    @property
    def clusterers(self) -> List[str]:
        return [str(c) for c in self.config.clusterers]

    @property
    def m(self) -> int:
        return self.config.scenario.m

    def records_for(self, clusterer: str) -> List[ReplicationRecord]:
        return [r for r in self.records if r.clusterer == clusterer]

    def aggregates(self) -> List[Dict]:
        return aggregate_records(self.records, self.clusterers, self.m, failed=len(self.failures))

    def aggregate_for(self, clusterer: str, component: int = 1) -> Dict:
        for row in self.aggregates():
            if row["clusterer"] == clusterer and row["component"] == component:
                return row
        raise ValidationError(f"No aggregate for clusterer '{clusterer}', component {component}")

    def write(self, path: str) -> Tuple[Path, Path, Path]:
        """Write aggregates to path plus the replications CSV and config echo beside it."""
        path = Path(path)
        replications_path = path.with_name(f"{path.stem}_replications.csv")
        config_path = path.with_name(f"{path.stem}_config.txt")

        CSVHandler(str(path)).write_records(AGGREGATE_FIELDS, self.aggregates())
        CSVHandler(str(replications_path)).write_rows(replication_fieldnames(self.m),
                                                      (record_to_row(r) for r in self.records))
        config_path.parent.mkdir(parents=True, exist_ok=True)
        with open(config_path, 'w', newline='\n', encoding='utf-8') as f:
            f.write(render_config(self.config))
            for failure in self.failures:
                f.write(f"# failed replication {failure.replication} (seed {failure.seed}): {failure.message}\n")
        logging.info(f"Wrote {path}, {replications_path.name} and {config_path.name}")
        return path, replications_path, config_path


def _replication_grid(config: ExperimentConfig, sample: LabeledSample, bandwidths):
    if config.grid is not None:
        return make_grid(*config.grid)
    return auto_grid(sample.y, bandwidths)


def run_replication(config: ExperimentConfig, replication: int) -> ReplicationOutcome:
    """One replication: sample, cluster with every clusterer, estimate and score.

    Any estimation error aborts the whole replication and is returned as a
    failure carrying its seed.
    """
    seed = derive_seed(config.master_seed, replication)
    outcome = ReplicationOutcome(replication, seed)
    scenario = config.scenario
    m = scenario.m
    try:
        sample = sample_scenario(scenario, seed)
        hidden = sample.hide_labels()
        oracle_fits = fit_components(sample.y, sample.labels, m, config.bandwidth)

        clustered = []
        for index, clusterer in enumerate(config.clusterers):
            assignment = clusterer.cluster(hidden.x, m, seed=derive_seed(seed, index))
            error, permutation = misclassification_error(assignment, sample.labels, m)
            aligned = assignment.relabel(permutation)
            fits = fit_components(sample.y, aligned.predicted, m, config.bandwidth)
            clustered.append((str(clusterer), aligned, error, fits))

        bandwidths = [f.bandwidth for f in oracle_fits]
        for _, _, _, fits in clustered:
            bandwidths += [f.bandwidth for f in fits]
        grid = _replication_grid(config, sample, bandwidths)
        truths = [true_component_density(scenario, i, grid) for i in range(1, m + 1)]

        oracle = tabulate(oracle_fits, grid)
        l1_oracle = tuple(l1_distance(e.density, t) for e, t in zip(oracle, truths))

        l1_em = None
        if config.include_em:
            em_fit = em_gaussian_1d(sample.y, m, seed=derive_seed(seed, len(config.clusterers)))
            em_grids = [gaussian_density_grid(em_fit, i, grid) for i in range(1, m + 1)]
            _, aligned_errors = best_density_alignment(em_grids, truths)
            l1_em = tuple(aligned_errors)

        weights = scenario.y_model.weights
        for label, aligned, error, fits in clustered:
            estimates = tabulate(fits, grid)
            outcome.records.append(ReplicationRecord(
                clusterer=label,
                replication=replication,
                seed=seed,
                l1_two_step=tuple(l1_distance(e.density, t) for e, t in zip(estimates, truths)),
                l1_oracle=l1_oracle,
                cluster_error=error,
                weight_error=tuple(abs(e.weight - w) for e, w in zip(estimates, weights)),
                rejected=aligned.rejected,
                l1_em=l1_em,
            ))
    except MixtureError as e:
        logging.warning(f"Replication {replication} (seed {seed}) failed: {e}")
        outcome.records = []
        outcome.failure = ReplicationFailure(replication, seed, str(e))
    return outcome


def _run_replication_task(task: Tuple[ExperimentConfig, int]) -> ReplicationOutcome:
    return run_replication(*task)


def run_experiment(config: ExperimentConfig, workers: Optional[int] = None) -> ExperimentReport:
    """Run every replication and assemble the report in replication order."""
    workers = workers or config.workers
    scenario = config.scenario
    logging.info(f"Running {config.replications} replication(s) of {scenario.x_model.name} "
                 f"(n={scenario.n}) with {', '.join(str(c) for c in config.clusterers)}")

    tasks = [(config, r) for r in range(config.replications)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_replication_task, tasks))
    else:
        outcomes = [_run_replication_task(task) for task in tasks]
    outcomes.sort(key=lambda o: o.replication)

    records = [record for o in outcomes for record in o.records]
    failures = [o.failure for o in outcomes if o.failure is not None]
    if len(failures) > MAX_FAILED_FRACTION * config.replications:
        raise ExperimentAbortedError(
            f"{len(failures)} of {config.replications} replications failed; first: "
            f"replication {failures[0].replication} (seed {failures[0].seed}): {failures[0].message}")
    if failures:
        logging.warning(f"{len(failures)} of {config.replications} replications failed and were skipped")

    report = ExperimentReport(config, records, failures)
    for row in report.aggregates():
        if row["component"] == 1:
            logging.info(f"  {row['clusterer']}: R(two-step/oracle)={row['ratio_two_step_oracle']:.4f} "
                         f"err_n={row['mean_cluster_error']:.4f}")
    return report

