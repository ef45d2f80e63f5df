import logging

import numpy as np
import pytest
from scipy.integrate import trapezoid

from src.kde.bandwidth import (BandwidthPolicy, lscv_candidates, lscv_score, select_bandwidth,
                               silverman_bandwidth)
from src.kde.estimator import (auto_grid, fit_components, gaussian_kernel, kde_evaluate, oracle_estimate,
                               two_step_estimate)
from src.kde.exceptions import DegenerateSampleError
from src.model.constants import KMEANS, TRUTH
from src.model.exceptions import NumericError, ValidationError
from src.model.types import ClusterAssignment, LabeledSample, make_grid


def test_gaussian_kernel_peak():
    assert gaussian_kernel(0.0) == pytest.approx(0.3989422804014327)
    assert gaussian_kernel(np.array([-1.0, 1.0])).tolist() == pytest.approx([0.24197072451914337] * 2)


def test_kde_evaluate_single_point():
    assert kde_evaluate([0.0], 2.0, 0.0) == pytest.approx(0.3989422804014327 / 2.0)


def test_kde_evaluate_without_points_is_zero():
    assert kde_evaluate([], 1.0, 0.5) == 0.0
    assert kde_evaluate([], 1.0, np.zeros(4)).tolist() == [0.0] * 4


def test_kde_evaluate_rejects_nonpositive_bandwidth():
    with pytest.raises(ValidationError):
        kde_evaluate([0.0], 0.0, 0.0)


class TestBandwidth:
    def test_silverman_rule(self):
        points = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
        expected = 1.06 * min(np.std(points, ddof=1), 2.0 / 1.34) * 5 ** -0.2
        assert silverman_bandwidth(points) == pytest.approx(expected)

    def test_silverman_with_zero_iqr_uses_standard_deviation(self):
        points = np.array([0.0] * 7 + [1.0])
        expected = 1.06 * np.std(points, ddof=1) * 8 ** -0.2
        assert silverman_bandwidth(points) == pytest.approx(expected)

    @pytest.mark.parametrize("points", [[3.0], [2.0, 2.0, 2.0]])
    def test_degenerate_samples(self, points):
        with pytest.raises(DegenerateSampleError, match="degenerate sample"):
            select_bandwidth(points, BandwidthPolicy.silverman())
        assert issubclass(DegenerateSampleError, NumericError)

    def test_fixed_bandwidth_ignores_the_data(self):
        assert select_bandwidth([2.0, 2.0], BandwidthPolicy.fixed(0.3)) == 0.3

    def test_lscv_score_matches_numerical_criterion(self, rng):
        points = rng.normal(size=25)
        h = 0.4
        t = np.linspace(-8, 8, 8001)
        f = kde_evaluate(points, h, t)
        integral_f2 = trapezoid(f * f, t)
        leave_one_out = np.mean([kde_evaluate(np.delete(points, k), h, points[k]) for k in range(len(points))])
        assert lscv_score(points, h) == pytest.approx(integral_f2 - 2.0 * leave_one_out, rel=1e-6)

    def test_lscv_picks_a_candidate(self, rng):
        points = rng.normal(size=60)
        policy = BandwidthPolicy.lscv([0.05, 0.2, 0.4, 0.8, 3.0])
        h = select_bandwidth(points, policy)
        scores = {c: lscv_score(points, c) for c in policy.candidates}
        assert h == min(scores, key=scores.get)

    def test_default_lscv_candidates_scale_silverman(self, rng):
        points = rng.normal(size=40)
        candidates = lscv_candidates(points, BandwidthPolicy.lscv())
        h = silverman_bandwidth(points)
        assert len(candidates) == 40
        assert candidates[0] == pytest.approx(0.05 * h)
        assert candidates[-1] == pytest.approx(1.5 * h)

    @pytest.mark.parametrize("text", ["silverman", "lscv", "fixed:0.25"])
    def test_policy_text_round_trip(self, text):
        assert str(BandwidthPolicy.parse(text)) == text

    @pytest.mark.parametrize("text", ["scott", "fixed:-1", "fixed:abc"])
    def test_policy_rejects_bad_text(self, text):
        with pytest.raises(ValidationError):
            BandwidthPolicy.parse(text)

    def test_lscv_candidates_must_increase(self):
        with pytest.raises(ValidationError):
            BandwidthPolicy.lscv([0.5, 0.2])


class TestEstimates:
    def test_perfect_assignment_equals_oracle(self, labeled_sample):
        policy = BandwidthPolicy.silverman()
        oracle = oracle_estimate(labeled_sample, policy)
        truth = ClusterAssignment(labeled_sample.labels, 2, TRUTH)
        two_step = two_step_estimate(labeled_sample, truth, policy)
        for a, b in zip(oracle, two_step):
            assert np.array_equal(a.density.values, b.density.values)
            assert a.weight == b.weight and a.bandwidth == b.bandwidth

    def test_component_densities_integrate_to_one(self, labeled_sample):
        estimates = oracle_estimate(labeled_sample, BandwidthPolicy.silverman())
        for estimate in estimates:
            assert estimate.density.integral() == pytest.approx(1.0, abs=1e-3)
        assert [e.weight for e in estimates] == [0.6, 0.4]
        assert [e.support_count for e in estimates] == [60, 40]

    def test_empty_component_has_zero_mass(self, labeled_sample):
        assignment = ClusterAssignment(np.ones(labeled_sample.n, dtype=int), 2, KMEANS)
        estimates = two_step_estimate(labeled_sample, assignment, BandwidthPolicy.silverman())
        assert estimates[1].weight == 0.0 and estimates[1].support_count == 0
        assert not np.any(estimates[1].density.values)
        assert estimates[0].density.integral() == pytest.approx(1.0, abs=1e-3)

    def test_rejected_observations_are_left_out(self, labeled_sample):
        predicted = labeled_sample.labels.copy()
        predicted[:10] = 0
        estimates = two_step_estimate(labeled_sample, ClusterAssignment(predicted, 2, KMEANS),
                                      BandwidthPolicy.silverman())
        assert [e.support_count for e in estimates] == [50, 40]
        assert sum(e.weight for e in estimates) == pytest.approx(0.9)

    def test_degenerate_component_borrows_pooled_bandwidth(self, caplog):
        y = np.array([5.0, 5.0, 0.0, 1.0, 2.0, 3.0])
        labels = np.array([1, 1, 2, 2, 2, 2])
        policy = BandwidthPolicy.silverman()
        with caplog.at_level(logging.WARNING):
            fits = fit_components(y, labels, 2, policy)
        assert fits[0].bandwidth == pytest.approx(silverman_bandwidth(y))
        assert fits[1].bandwidth == pytest.approx(silverman_bandwidth(y[2:]))
        assert "pooled bandwidth" in caplog.text

    def test_explicit_grid_is_used(self, labeled_sample):
        grid = make_grid(-6.0, 6.0, 257)
        estimates = oracle_estimate(labeled_sample, BandwidthPolicy.fixed(0.5), grid)
        assert all(e.density.same_support(grid) for e in estimates)

    def test_auto_grid_pads_by_five_bandwidths(self):
        grid = auto_grid(np.array([0.0, 2.0]), [0.1, None, 0.4])
        assert (grid.lo, grid.hi, grid.g) == (pytest.approx(-2.0), pytest.approx(4.0), 1024)

    def test_oracle_needs_labels(self, labeled_sample):
        with pytest.raises(ValidationError):
            oracle_estimate(labeled_sample.hide_labels(), BandwidthPolicy.silverman())

    def test_assignment_must_cover_the_sample(self, labeled_sample):
        short = ClusterAssignment([1, 2], 2, KMEANS)
        with pytest.raises(ValidationError):
            two_step_estimate(labeled_sample, short, BandwidthPolicy.silverman())

    def test_unlabelled_sample_is_enough_for_two_step(self):
        sample = LabeledSample([0.0, 0.5, 10.0, 10.5], [0.0, 0.1, 5.0, 5.1], 2)
        estimates = two_step_estimate(sample, ClusterAssignment([1, 1, 2, 2], 2, KMEANS),
                                      BandwidthPolicy.fixed(0.5))
        assert [e.weight for e in estimates] == [0.5, 0.5]


class TestKdeProperties:
    def test_point_order_does_not_matter(self, rng):
        points = rng.normal(size=200)
        t = np.linspace(-4.0, 4.0, 41)
        expected = kde_evaluate(points, 0.4, t)
        assert kde_evaluate(rng.permutation(points), 0.4, t) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("scale", [0.1, 3.0, 250.0])
    def test_scaling_equivariance(self, rng, scale):
        points = rng.normal(size=100)
        t = np.linspace(-3.0, 3.0, 25)
        scaled = kde_evaluate(scale * points, scale * 0.5, scale * t)
        assert scaled == pytest.approx(kde_evaluate(points, 0.5, t) / scale, rel=1e-10)

    def test_lscv_is_not_wider_than_silverman_on_bimodal_samples(self):
        narrower = 0
        for seed in range(100):
            rng = np.random.default_rng(seed)
            points = np.where(rng.random(200) < 0.5, -3.0, 3.0) + rng.standard_normal(200)
            if select_bandwidth(points, BandwidthPolicy.lscv()) <= silverman_bandwidth(points):
                narrower += 1
        assert narrower >= 90
