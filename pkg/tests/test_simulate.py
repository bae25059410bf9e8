"""Sampling, MAP classification, and the empirical error exponent."""

import math

import numpy as np
import pytest

from chernoff import (
    TreeSpec,
    build_covariance,
    chernoff_from_spectrum,
    chernoff_information,
    estimate_error_exponent,
    hypothesis_set,
    map_classify,
    min_pairwise_chernoff,
    optimal_reduction,
    reduced_pair,
    sample_sequence,
    spectrum_from_values,
)
from chernoff.errors import DimensionMismatch, NotPositiveDefinite, ValidationError

WELL_SEPARATED = ([[9.0]], [[1.0]])


def _fit_slope(ts, ys):
    design = np.column_stack([ts, np.ones_like(ts)])
    coef, *_ = np.linalg.lstsq(design, ys, rcond=None)
    return coef[0]


class TestHypothesisSet:
    def test_priors_must_sum_to_one(self):
        with pytest.raises(ValidationError):
            hypothesis_set([np.eye(2), 2 * np.eye(2)], [0.5, 0.6])

    def test_priors_must_be_positive(self):
        with pytest.raises(ValidationError):
            hypothesis_set([np.eye(2), 2 * np.eye(2)], [1.0, 0.0])

    def test_needs_two_models(self):
        with pytest.raises(ValidationError):
            hypothesis_set([np.eye(2)], [1.0])

    def test_dimensions_must_match(self):
        with pytest.raises(DimensionMismatch):
            hypothesis_set([np.eye(2), np.eye(3)], [0.5, 0.5])


class TestSampleSequence:
    def test_deterministic_given_seed(self):
        a = sample_sequence(np.eye(2), 4, 123)
        b = sample_sequence(np.eye(2), 4, 123)
        assert a.shape == (4, 2)
        assert np.array_equal(a, b)

    def test_single_draw(self):
        assert sample_sequence(np.eye(3), 1, 0).shape == (1, 3)

    def test_length_must_be_positive(self):
        with pytest.raises(ValidationError):
            sample_sequence(np.eye(2), 0, 1)

    def test_rejects_indefinite_matrix(self):
        with pytest.raises(NotPositiveDefinite):
            sample_sequence([[1.0, 2.0], [2.0, 1.0]], 3, 1)

    def test_sample_covariance_converges(self):
        cov = build_covariance(TreeSpec(3, ((1, 2, 0.5), (2, 3, 0.6))))
        draws = sample_sequence(cov, 100_000, 7)
        empirical = draws.T @ draws / draws.shape[0]
        assert np.abs(empirical - cov.matrix).max() < 0.02


class TestMapClassify:
    def test_separated_models_classified_correctly(self):
        hyps = hypothesis_set(list(WELL_SEPARATED), [0.5, 0.5])
        hits = 0
        for trial in range(200):
            x = sample_sequence(WELL_SEPARATED[0], 200, [11, trial])
            hits += map_classify(x, hyps) == 0
        assert hits >= 198

    def test_tie_breaks_toward_first_model(self):
        hyps = hypothesis_set([np.eye(2), np.eye(2)], [0.5, 0.5])
        x = sample_sequence(np.eye(2), 5, 3)
        assert map_classify(x, hyps) == 0

    def test_prior_dominates_weak_evidence(self):
        hyps = hypothesis_set([[[1.0]], [[1.01]]], [0.999, 0.001])
        for trial in range(50):
            x = sample_sequence([[1.01]], 1, [5, trial])
            assert map_classify(x, hyps) == 0

    def test_dimension_mismatch(self):
        hyps = hypothesis_set(list(WELL_SEPARATED), [0.5, 0.5])
        with pytest.raises(DimensionMismatch):
            map_classify(np.zeros((3, 2)), hyps)


class TestEstimateErrorExponent:
    def test_identical_models_have_no_exponent(self):
        hyps = hypothesis_set([np.eye(1), np.eye(1)], [0.5, 0.5])
        est = estimate_error_exponent(hyps, [2, 6, 10, 14], 4000, 13)
        assert all(abs(r - 0.5) < 0.05 for r in est.error_rates)
        assert abs(est.fitted_exponent) < 0.01
        assert est.predicted == pytest.approx(0.0, abs=1e-12)

    def test_separated_pair_tracks_chernoff(self):
        hyps = hypothesis_set(list(WELL_SEPARATED), [0.5, 0.5])
        est = estimate_error_exponent(hyps, list(range(2, 21, 2)), 20_000, 17)
        ci = chernoff_from_spectrum(spectrum_from_values([9.0])).ci
        assert est.predicted == pytest.approx(ci, abs=1e-9)
        assert 0.7 * ci < est.fitted_exponent < 1.4 * ci

    def test_three_models_track_minimum_pair(self):
        hyps = hypothesis_set([[[9.0]], [[1.0]], [[1.05]]], [1 / 3, 1 / 3, 1 / 3])
        est = estimate_error_exponent(hyps, [2, 6, 10, 14], 6000, 19)
        near_identical = chernoff_information([[1.0]], [[1.05]]).ci
        strong = chernoff_information([[9.0]], [[1.0]]).ci
        assert est.predicted == pytest.approx(near_identical, abs=1e-12)
        assert est.fitted_exponent < 0.3 * strong

    def test_deterministic_given_seed(self):
        hyps = hypothesis_set(list(WELL_SEPARATED), [0.5, 0.5])
        a = estimate_error_exponent(hyps, [2, 4, 6], 3000, 23)
        b = estimate_error_exponent(hyps, [2, 4, 6], 3000, 23)
        assert a.error_rates == b.error_rates
        assert a.fitted_exponent == b.fitted_exponent

    def test_zero_errors_reported_not_raised(self):
        hyps = hypothesis_set([[[100.0]], [[1.0]]], [0.5, 0.5])
        est = estimate_error_exponent(hyps, [60, 80], 100, 29)
        assert est.fitted_exponent == math.inf
        assert any("all_errors_zero" in d for d in est.diagnostics)

    def test_prior_weighted_allocation(self):
        hyps = hypothesis_set(list(WELL_SEPARATED), [0.75, 0.25])
        est = estimate_error_exponent(hyps, [4], 1000, 31)
        assert est.trials == 1000

    def test_bad_grid_rejected(self):
        hyps = hypothesis_set(list(WELL_SEPARATED), [0.5, 0.5])
        with pytest.raises(ValidationError):
            estimate_error_exponent(hyps, [4, 2], 100, 1)
        with pytest.raises(ValidationError):
            estimate_error_exponent(hyps, [], 100, 1)
        with pytest.raises(ValidationError):
            estimate_error_exponent(hyps, [2, 4], 0, 1)

    def test_exponent_bounded_by_prediction_plus_noise(self):
        # bootstrap the per-length error counts; the slope's lower
        # confidence bound must not exceed predicted + 3 standard errors.
        # Larger lengths keep the 1/(2t) prefactor bias inside the noise.
        hyps = hypothesis_set(list(WELL_SEPARATED), [0.5, 0.5])
        est = estimate_error_exponent(hyps, [12, 15, 18, 21, 24], 100_000, 37)
        rng = np.random.default_rng(0)
        ts, counts = [], []
        for t, count in zip(est.sample_lengths, est.error_counts):
            if t in est.fit_lengths:
                ts.append(t)
                counts.append(count)
        ts = np.array(ts, dtype=float)
        counts = np.array(counts)
        slopes = []
        for _ in range(300):
            resampled = rng.binomial(est.trials, counts / est.trials)
            resampled = np.maximum(resampled, 1)
            slopes.append(_fit_slope(ts, -np.log(resampled / est.trials)))
        lo = np.percentile(slopes, 2.5)
        se = float(np.std(slopes))
        assert lo <= est.predicted + 3.0 * se


class TestReducedDataWorkflow:
    def test_reduced_exponent_matches_reduced_ci(self):
        rng = np.random.default_rng(41)
        s1 = build_covariance(TreeSpec(3, ((1, 2, 0.8), (2, 3, 0.75))))
        s2 = build_covariance(TreeSpec(3, ((1, 2, 0.15), (2, 3, 0.1))))
        best = optimal_reduction(s1, s2, 1)
        r1, r2 = reduced_pair(best.matrix, s1, s2)

        full = hypothesis_set([s1, s2], [0.5, 0.5])
        reduced = hypothesis_set([r1, r2], [0.5, 0.5])
        grid = list(range(4, 29, 4))
        est_full = estimate_error_exponent(full, grid, 15_000, 43)
        est_reduced = estimate_error_exponent(reduced, grid, 15_000, 43)

        assert est_reduced.predicted == pytest.approx(best.ci.ci, abs=1e-9)
        # reduction cannot help: allow three standard errors of slack
        noise = 3.0 * (est_full.slope_stderr + est_reduced.slope_stderr) + 0.05
        assert est_reduced.fitted_exponent <= est_full.fitted_exponent + noise
        assert est_reduced.fitted_exponent == pytest.approx(
            est_reduced.predicted, rel=0.35
        )


class TestMinPairwiseChernoff:
    def test_matches_direct_minimum(self):
        models = [[[9.0]], [[1.0]], [[1.2]]]
        hyps = hypothesis_set(models, [0.2, 0.3, 0.5])
        direct = min(
            chernoff_information(models[a], models[b]).ci
            for a in range(3)
            for b in range(a + 1, 3)
        )
        assert min_pairwise_chernoff(hyps) == pytest.approx(direct, abs=1e-15)
