import numpy as np
import pytest
from scipy.integrate import trapezoid

from src.clustering.exceptions import ClusterCountError
from src.harness.config import (ClustererSpec, ExperimentConfig, build_config, format_grid, load_config_text,
                                parse_grid, render_config)
from src.harness.exceptions import ConfigError, ExperimentAbortedError
from src.harness.experiment import (ReplicationFailure, ReplicationOutcome, aggregate_records, record_from_row,
                                    run_experiment, run_replication)
from src.harness.pipelines import erdf_pipeline, estimate_from_csv, sidecar_path
from src.harness.selfcheck import brute_force_radius, radius_graph_components, run_selfcheck
from src.harness.tables import interval_study, table_cells, table_value
from src.kde.bandwidth import BandwidthPolicy
from src.metrics.evaluation import misclassification_error
from src.model.exceptions import DataError, MalformedCSVError, ValidationError
from src.scenarios.erdf import synthetic_erdf_curves
from src.scenarios.generators import derive_seed
from src.scenarios.models import ConcentricX, GaussianMixtureY, ToyUniformX, UniformX
from src.utils.csv_handler import CSVHandler


def _config(**overrides):
    values = {"scenario": "uniform", "delta": "1.0", "n": "100", "replications": "4", "seed": "3"}
    values.update(overrides)
    return build_config(values)


class TestConfigParsing:
    def test_key_value_lines_with_comments(self):
        values = load_config_text("# experiment\nscenario = laplace\nell = 5.5  # shift\n\nN = 250\n")
        assert values == {"scenario": "laplace", "ell": "5.5", "n": "250"}

    @pytest.mark.parametrize("text, fragment", [
        ("scenario = uniform\ncolour = red\n", "line 2: unknown key 'colour'"),
        ("n = 10\nn = 20\n", "line 2: key 'n' given twice"),
        ("scenario uniform\n", "line 1: expected 'key = value'"),
    ])
    def test_errors_name_the_line(self, text, fragment):
        with pytest.raises(ConfigError) as info:
            load_config_text(text)
        assert fragment in str(info.value)

    def test_defaults(self):
        config = build_config({})
        assert config.scenario.x_model == UniformX(0.1)
        assert config.scenario.y_model == GaussianMixtureY.separated(1.0)
        assert config.scenario.n == 300
        assert config.clusterers == (ClustererSpec("radius_graph"),)
        assert config.replications == 100 and config.master_seed == 0
        assert config.grid is None and not config.include_em

    def test_overrides_win_and_none_is_skipped(self):
        config = build_config({"n": "200", "seed": "5"}, {"n": "150", "seed": None})
        assert config.scenario.n == 150
        assert config.master_seed == 5

    def test_toy_model_defaults_to_inverse_root_n(self):
        config = build_config({"scenario": "toy_uniform", "n": "400", "clusterers": "interval"})
        assert config.scenario.x_model == ToyUniformX(0.05)

    @pytest.mark.parametrize("values, fragment", [
        ({"n": "abc"}, "'n' must be an integer"),
        ({"delta": "wide"}, "'delta' must be a number"),
        ({"include_em": "maybe"}, "'include_em' must be true or false"),
        ({"scenario": "spiral"}, "Unknown scenario"),
        ({"y_model": "skewed"}, "'y_model' must be"),
        ({"clusterers": "kmeans,kmeans"}, "listed twice"),
        ({"replications": "0"}, "replications must be a positive integer"),
    ])
    def test_invalid_values(self, values, fragment):
        with pytest.raises(ValidationError, match=fragment):
            build_config(values)

    def test_echo_round_trips(self):
        config = build_config({
            "scenario": "concentric", "r2": "0.8", "y_model": "balanced", "n": "250",
            "clusterers": "kmeans,spectral:search,spectral:0.25", "grid": "-6:6:512",
            "bandwidth": "fixed:0.3", "include_em": "true", "seed": "17",
        })
        text = render_config(config)
        assert text.startswith("# twostep-mixture ")
        assert "output" not in text and "workers" not in text
        assert build_config(load_config_text(text)) == config

    def test_echo_of_laplace_scenario(self):
        config = build_config({"scenario": "laplace", "ell": "6.5", "sigma_x": "2.0", "y_delta": "0.5"})
        echoed = load_config_text(render_config(config))
        assert echoed["ell"] == "6.5" and echoed["sigma_x"] == "2.0" and echoed["y_delta"] == "0.5"
        assert build_config(echoed) == config


class TestGrid:
    def test_parse(self):
        assert parse_grid("auto") is None
        assert parse_grid("-1:1:5") == (-1.0, 1.0, 5)
        assert format_grid((-1.0, 1.0, 5)) == "-1.0:1.0:5"

    @pytest.mark.parametrize("text", ["1:0:5", "0:1:1", "0:1", "a:b:c"])
    def test_invalid(self, text):
        with pytest.raises(ConfigError):
            parse_grid(text)


class TestClustererSpec:
    @pytest.mark.parametrize("text, rendered", [
        ("radius_graph", "radius_graph"),
        ("KMeans", "kmeans"),
        ("spectral", "spectral:auto"),
        ("spectral:search", "spectral:search"),
        ("spectral:0.5", "spectral:0.5"),
        ("interval", "interval"),
    ])
    def test_parse_and_render(self, text, rendered):
        assert str(ClustererSpec.parse(text)) == rendered

    @pytest.mark.parametrize("text", ["dbscan", "kmeans:3", "spectral:-1", "spectral:wide"])
    def test_invalid(self, text):
        with pytest.raises(ValidationError):
            ClustererSpec.parse(text)

    def test_interval_needs_univariate_covariates(self):
        with pytest.raises(ValidationError):
            ClustererSpec("interval").cluster(np.zeros((4, 2)), 2)

    def test_dispatch(self, separated_blobs):
        points, labels = separated_blobs
        for text in ("radius_graph", "kmeans", "spectral:1.0"):
            assignment = ClustererSpec.parse(text).cluster(points, 2, seed=1)
            assert misclassification_error(assignment, labels, 2)[0] == 0.0

    def test_experiment_config_needs_a_clusterer(self):
        config = _config()
        with pytest.raises(ConfigError):
            ExperimentConfig(config.scenario, (), config.bandwidth)


class TestExperiment:
    def test_perfect_clustering_passes_through(self):
        report = run_experiment(_config())
        assert len(report.records) == 4 and not report.failures
        for record in report.records:
            assert record.cluster_error == 0.0 and record.rejected == 0
            assert record.l1_two_step == record.l1_oracle
        assert report.aggregate_for("radius_graph", 1)["ratio_two_step_oracle"] == 1.0

    def test_passthrough_whenever_clustering_is_perfect(self):
        report = run_experiment(_config(delta="0.5", replications="10"))
        perfect = [r for r in report.records if r.cluster_error == 0.0 and r.rejected == 0]
        assert perfect
        for record in perfect:
            assert record.l1_two_step == record.l1_oracle

    def test_replication_seeds(self):
        config = _config()
        outcome = run_replication(config, 2)
        assert outcome.seed == derive_seed(3, 2)
        assert all(r.seed == outcome.seed for r in outcome.records)

    def test_identical_reports(self, tmp_path):
        config = _config(clusterers="radius_graph,kmeans", include_em="true")
        paths_a = run_experiment(config).write(str(tmp_path / "a" / "sim.csv"))
        paths_b = run_experiment(config).write(str(tmp_path / "b" / "sim.csv"))
        for a, b in zip(paths_a, paths_b):
            assert a.read_bytes() == b.read_bytes()

    def test_worker_count_does_not_change_the_report(self, tmp_path):
        config = _config(clusterers="radius_graph,kmeans")
        serial = run_experiment(config, workers=1).write(str(tmp_path / "serial" / "sim.csv"))
        parallel = run_experiment(config, workers=2).write(str(tmp_path / "parallel" / "sim.csv"))
        for a, b in zip(serial, parallel):
            assert a.read_bytes() == b.read_bytes()

    def test_aggregates_recompute_from_replications(self, tmp_path):
        report = run_experiment(_config(clusterers="radius_graph,kmeans", include_em="true"))
        _, replications_path, config_path = report.write(str(tmp_path / "sim.csv"))
        records = [record_from_row(row, 2) for row in CSVHandler(str(replications_path)).read_records()]
        assert aggregate_records(records, report.clusterers, 2) == report.aggregates()
        assert build_config(load_config_text(config_path.read_text())) == report.config

    def test_em_benchmark_columns(self):
        report = run_experiment(_config(include_em="true", y_delta="2.0", replications="3"))
        row = report.aggregate_for("radius_graph", 1)
        assert row["ratio_two_step_em"] > 0 and row["mean_l1_em"] > 0
        assert row["ratio_oracle_em"] == pytest.approx(row["mean_l1_oracle"] / row["mean_l1_em"])
        assert all(r.l1_em is not None for r in report.records)

    def test_failed_replication_is_recorded(self):
        config = _config(scenario="circle_square", clusterers="interval")
        outcome = run_replication(config, 0)
        assert outcome.records == []
        assert outcome.failure.seed == derive_seed(3, 0)
        assert "one-dimensional" in outcome.failure.message

    def test_too_many_failures_abort(self):
        with pytest.raises(ExperimentAbortedError, match="4 of 4 replications failed"):
            run_experiment(_config(scenario="circle_square", clusterers="interval"))

    def test_report_files(self, tmp_path):
        report = run_experiment(_config(replications="2"))
        aggregates, replications, config = report.write(str(tmp_path / "out" / "sim.csv"))
        assert aggregates.name == "sim.csv"
        assert replications.name == "sim_replications.csv"
        assert config.name == "sim_config.txt"
        rows = CSVHandler(str(aggregates)).read_records()
        assert [row["component"] for row in rows] == ["1", "2"]
        assert rows[0]["ratio_two_step_em"] == ""


class TestTables:
    @pytest.mark.parametrize("table_id, count", [("1", 24), ("2", 6), ("3", 4)])
    def test_cell_counts(self, table_id, count):
        assert len(table_cells(table_id)) == count

    def test_first_table_layout(self):
        cells = table_cells("1")
        assert [c.family for c in cells[:6]] == ["uniform"] * 3 + ["laplace"] * 3
        assert all(c.include_em and c.clusterers == ("radius_graph",) for c in cells)
        assert cells[-1].y_separation == 2.0 and cells[-1].value == 6.5
        assert all(c.scenario.n == 300 for c in cells)

    def test_clusterer_tables_use_balanced_mixture(self):
        for cell in table_cells("2") + table_cells("3"):
            assert cell.scenario.y_model == GaussianMixtureY.balanced()
            assert len(cell.clusterers) == 3 and not cell.include_em
        assert table_cells("3")[0].scenario.x_model == ConcentricX(0.75)

    def test_unknown_table(self):
        with pytest.raises(ValidationError):
            table_cells("4")

    def test_table_value_needs_one_match(self):
        rows = [{"cell": 1, "component": 1, "x": 0.5}, {"cell": 1, "component": 2, "x": 0.7}]
        assert table_value(rows, "x", cell=1, component=2) == 0.7
        with pytest.raises(ValidationError):
            table_value(rows, "x", cell=1)

    def test_interval_study(self, tmp_path):
        output = tmp_path / "toy.csv"
        rows = interval_study(ns=(100, 400), replications=20, seed=1, output_path=str(output))
        assert [row["n"] for row in rows] == [100, 400]
        for row in rows:
            assert row["all_classified_correct"] and row["within_bound"]
            assert row["lam"] == pytest.approx(row["n"] ** -0.5)
            assert 0 <= row["mean_rejected_fraction"] <= row["mean_error"]
        assert len(CSVHandler(str(output)).read_records()) == 2


class TestEstimatePipeline:
    def test_four_row_example(self, write_csv, tmp_path):
        path = write_csv("sample.csv", ["y", "x1"], [(0, 0), (0, 0.1), (10, 5), (10, 5.1)])
        output = tmp_path / "densities.csv"
        result = estimate_from_csv(path, 2, "radius_graph", BandwidthPolicy.silverman(), None, str(output))
        assert result.assignment.predicted.tolist() == [1, 1, 2, 2]
        assert [e.weight for e in result.estimates] == [0.5, 0.5]

        header, table = CSVHandler(str(output)).read_table()
        assert header == ["t", "fhat_1", "fhat_2"]
        for column in (1, 2):
            assert trapezoid(table[:, column], table[:, 0]) == pytest.approx(1.0, abs=1e-3)
        labels = CSVHandler(str(sidecar_path(output, "labels"))).read_records()
        assert [row["predicted_label"] for row in labels] == ["1", "1", "2", "2"]
        weights = CSVHandler(str(sidecar_path(output, "weights"))).read_records()
        assert [float(row["weight"]) for row in weights] == [0.5, 0.5]

    def test_explicit_grid(self, write_csv, tmp_path):
        path = write_csv("sample.csv", ["y", "x1", "x2"],
                         [(0, 0, 0), (0.5, 0.1, 0), (10, 5, 5), (10.5, 5.1, 5)])
        output = tmp_path / "densities.csv"
        estimate_from_csv(path, 2, "kmeans", BandwidthPolicy.fixed(1.0), (-5.0, 15.0, 101), str(output), seed=0)
        _, table = CSVHandler(str(output)).read_table()
        assert table.shape == (101, 3)
        assert table[0, 0] == -5.0 and table[-1, 0] == 15.0

    def test_constant_covariate(self, write_csv, tmp_path):
        path = write_csv("sample.csv", ["y", "x1"], [(0, 1), (1, 1), (2, 1), (3, 1)])
        with pytest.raises(ClusterCountError, match="cannot realize exactly M clusters"):
            estimate_from_csv(path, 2, "radius_graph", BandwidthPolicy.silverman(), None,
                              str(tmp_path / "out.csv"))

    def test_malformed_row(self, write_csv, tmp_path):
        path = write_csv("sample.csv", ["y", "x1"], [(0, 1), (1, "abc"), (2, 1)])
        with pytest.raises(MalformedCSVError, match="line 3"):
            estimate_from_csv(path, 2, "radius_graph", BandwidthPolicy.silverman(), None,
                              str(tmp_path / "out.csv"))

    def test_header_must_name_columns(self, write_csv, tmp_path):
        path = write_csv("sample.csv", ["response", "x1"], [(0, 1), (1, 2)])
        with pytest.raises(MalformedCSVError, match="line 1"):
            estimate_from_csv(path, 2, "radius_graph", BandwidthPolicy.silverman(), None,
                              str(tmp_path / "out.csv"))


class TestErdfPipeline:
    @pytest.fixture
    def curves_path(self, tmp_path):
        curves, labels = synthetic_erdf_curves(200, seed=5)
        curves = np.vstack([curves, np.full((1, 9), 1.2)])
        path = tmp_path / "curves.csv"
        CSVHandler(str(path)).write_rows([f"z{j}" for j in range(1, 10)], curves.tolist())
        return str(path), np.append(labels, 2)

    def test_recovers_the_dipping_curves(self, curves_path, tmp_path):
        path, labels = curves_path
        output = tmp_path / "erdf.csv"
        result = erdf_pipeline(path, str(output), seed=0)

        sizes = np.bincount(result.radius_labels, minlength=3)[1:]
        assert abs(sizes[0] - 100) <= 10 and abs(sizes[1] - 101) <= 10
        assert misclassification_error(result.radius_labels, labels, 2)[0] < 0.05
        assert result.radius_labels[-1] == 2
        assert result.x[-1].tolist() == [0.0, 0.0]
        assert result.agreement > 0.95

    def test_output_schema(self, curves_path, tmp_path):
        path, _ = curves_path
        output = tmp_path / "erdf.csv"
        erdf_pipeline(path, str(output), seed=0, grid_points=256)
        header, table = CSVHandler(str(output)).read_table()
        assert len(header) == 13 and header[0] == "grid_index"
        assert header[1:3] == ["f1_y1", "f2_y1"]
        assert table.shape == (256, 13)
        labels = CSVHandler(str(sidecar_path(output, "labels"))).read_records()
        assert list(labels[0]) == ["row_index", "radius_graph", "kmeans"]
        grids = CSVHandler(str(sidecar_path(output, "grids"))).read_records()
        assert [row["variable"] for row in grids] == [f"y{j}" for j in range(1, 7)]
        assert sidecar_path(output, "features").exists()
        assert sidecar_path(output, "agreement").exists()

    def test_wrong_column_count(self, write_csv, tmp_path):
        path = write_csv("curves.csv", [f"z{j}" for j in range(1, 9)], [[1.0] * 8])
        with pytest.raises(DataError, match="9 consumption columns"):
            erdf_pipeline(path, str(tmp_path / "erdf.csv"))


class TestSelfcheck:
    def test_brute_force_radius_on_a_line(self):
        points = np.array([[0.0], [1.0], [5.0], [6.0]])
        r, labels = brute_force_radius(points, 2)
        assert r == 0.5
        assert labels.tolist() == [1, 1, 2, 2]

    def test_union_find_components(self):
        distances = np.array([[0.0, 1.0, 9.0], [1.0, 0.0, 9.0], [9.0, 9.0, 0.0]])
        assert radius_graph_components(distances, 0.5).tolist() == [1, 1, 2]
        assert radius_graph_components(distances, 4.5).tolist() == [1, 1, 1]

    def test_small_run_passes(self):
        results = run_selfcheck(seed=4, radius_trials=25, identity_trials=5, permutation_trials=50,
                                laplace_trials=3)
        assert len(results) == 4
        assert all(result.passed for result in results), [r.first_failure for r in results]


def _cell_report(table_id, predicate, replications=100, seed=0):
    cells = [c for c in table_cells(table_id) if predicate(c)]
    assert len(cells) == 1
    cell = cells[0]
    config = ExperimentConfig(cell.scenario, tuple(ClustererSpec.parse(c) for c in cell.clusterers),
                              BandwidthPolicy.silverman(), replications=replications, master_seed=seed,
                              include_em=cell.include_em)
    return run_experiment(config)


@pytest.mark.slow
class TestTableAnchors:
    def test_uniform_column_of_first_table(self):
        anchors = {0.1: 0.464, 0.5: 0.679, 1.0: 0.844, 2.0: 1.702}
        for delta, anchor in anchors.items():
            report = _cell_report("1", lambda c: c.family == "uniform" and c.value == 0.1
                                  and c.y_separation == delta)
            row = report.aggregate_for("radius_graph", 1)
            assert abs(row["ratio_two_step_em"] - row["ratio_oracle_em"]) <= 0.05
            assert row["ratio_two_step_em"] == pytest.approx(anchor, rel=0.15)

    def test_ordering_across_separations(self):
        for family, value in (("uniform", 0.1), ("laplace", 6.5)):
            low = _cell_report("1", lambda c: c.family == family and c.value == value and c.y_separation == 0.1)
            high = _cell_report("1", lambda c: c.family == family and c.value == value and c.y_separation == 2.0)
            assert low.aggregate_for("radius_graph", 1)["ratio_two_step_em"] < 1.0
            assert high.aggregate_for("radius_graph", 1)["ratio_two_step_em"] > 1.0

    def test_degradation_with_closer_supports(self):
        for family, values in (("uniform", (0.03, 0.05, 0.1)), ("laplace", (4.5, 5.5, 6.5))):
            ratios = [
                _cell_report("1", lambda c: c.family == family and c.value == v and c.y_separation == 2.0)
                .aggregate_for("radius_graph", 1)["ratio_two_step_em"]
                for v in values
            ]
            assert ratios[0] > ratios[1] > ratios[2]

    def test_circle_square_offset_three(self):
        report = _cell_report("2", lambda c: c.value == 3.0 and c.scenario.n == 250)
        errors = {c: report.aggregate_for(c, 1)["mean_cluster_error"] for c in report.clusterers}
        assert errors["kmeans"] == pytest.approx(0.043, abs=0.02)
        assert errors["kmeans"] < errors["spectral:search"] < errors["radius_graph"]
        assert errors["radius_graph"] >= 0.3

    def test_concentric_inner_gap(self):
        report = _cell_report("3", lambda c: c.value == 0.75 and c.scenario.n == 500)
        rows = {c: report.aggregate_for(c, 1) for c in report.clusterers}
        assert rows["kmeans"]["mean_cluster_error"] == pytest.approx(0.478, abs=0.05)
        assert rows["spectral:search"]["mean_cluster_error"] <= 0.02
        assert rows["radius_graph"]["mean_cluster_error"] <= 0.06
        assert (rows["kmeans"]["ratio_two_step_oracle"] > rows["radius_graph"]["ratio_two_step_oracle"]
                >= rows["spectral:search"]["ratio_two_step_oracle"])

    def test_interval_clusterer_on_the_toy_model(self):
        for row in interval_study():
            assert row["all_classified_correct"]
            assert row["within_bound"]


class TestFailureThreshold:
    def _fail_replications(self, monkeypatch, failing):
        def patched(config, replication):
            if replication in failing:
                outcome = ReplicationOutcome(replication, derive_seed(config.master_seed, replication))
                outcome.failure = ReplicationFailure(replication, outcome.seed, "forced failure")
                return outcome
            return run_replication(config, replication)
        monkeypatch.setattr("src.harness.experiment.run_replication", patched)

    def test_one_in_ten_is_tolerated(self, monkeypatch):
        self._fail_replications(monkeypatch, {4})
        report = run_experiment(_config(replications="10"))
        assert [f.replication for f in report.failures] == [4]
        assert len(report.records) == 9
        assert report.aggregate_for("radius_graph", 1)["failed"] == 1

    def test_two_in_ten_abort(self, monkeypatch):
        self._fail_replications(monkeypatch, {2, 7})
        with pytest.raises(ExperimentAbortedError, match="2 of 10 replications failed"):
            run_experiment(_config(replications="10"))

    def test_linear_algebra_failure_is_one_failed_replication(self, monkeypatch):
        def broken(*args, **kwargs):
            raise np.linalg.LinAlgError("eigenvalues did not converge")
        monkeypatch.setattr("src.clustering.spectral.eigh", broken)
        outcome = run_replication(_config(clusterers="spectral:1.0"), 0)
        assert outcome.records == []
        assert "eigendecomposition" in outcome.failure.message


@pytest.mark.slow
class TestSpectralAnchors:
    def test_circle_square_offset_four(self):
        report = _cell_report("2", lambda c: c.value == 4.0 and c.scenario.n == 250)
        error = report.aggregate_for("spectral:search", 1)["mean_cluster_error"]
        assert error == pytest.approx(0.018, abs=0.02)

    def test_concentric_wider_gap(self):
        report = _cell_report("3", lambda c: c.value == 0.80 and c.scenario.n == 500)
        assert report.aggregate_for("spectral:search", 1)["mean_cluster_error"] <= 0.01
