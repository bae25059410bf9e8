"""Generalized eigenvalues and the simultaneous diagonalizer."""

import numpy as np
import pytest

from chernoff import (
    build_covariance,
    generalized_eigenvalues,
    simultaneous_diagonalizer,
    spectrum_from_values,
    unit_eigenvalue_count,
)
from chernoff.errors import DimensionMismatch, NonPositiveEigenvalue, NotPositiveDefinite
from helpers import dense_generalized_eigenvalues, random_invertible, random_spd, random_tree


class TestGeneralizedEigenvalues:
    def test_identical_pair_gives_unit_spectrum(self):
        rng = np.random.default_rng(0)
        s = random_spd(rng, 5)
        spectrum = generalized_eigenvalues(s, s)
        assert np.abs(spectrum.values - 1.0).max() < 1e-12
        assert unit_eigenvalue_count(spectrum) == 5

    def test_scalar_matrices(self):
        spectrum = generalized_eigenvalues(2.0 * np.eye(3), np.eye(3))
        assert np.abs(spectrum.values - 2.0).max() < 1e-12

    def test_matches_nonsymmetric_eigensolver(self):
        rng = np.random.default_rng(1)
        s1, s2 = random_spd(rng, 6), random_spd(rng, 6)
        spectrum = generalized_eigenvalues(s1, s2)
        oracle = dense_generalized_eigenvalues(s1, s2)
        assert np.abs(spectrum.values - oracle).max() < 1e-8

    def test_positivity(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            n = int(rng.integers(1, 9))
            spectrum = generalized_eigenvalues(random_spd(rng, n), random_spd(rng, n))
            assert spectrum.values.min() > 0

    def test_swap_reciprocity(self):
        rng = np.random.default_rng(3)
        s1, s2 = random_spd(rng, 7), random_spd(rng, 7)
        fwd = generalized_eigenvalues(s1, s2).values
        rev = generalized_eigenvalues(s2, s1).values
        assert np.abs(rev - np.sort(1.0 / fwd)).max() < 1e-9

    def test_congruence_invariance(self):
        rng = np.random.default_rng(4)
        s1, s2 = random_spd(rng, 6), random_spd(rng, 6)
        k = random_invertible(rng, 6)
        base = generalized_eigenvalues(s1, s2).values
        moved = generalized_eigenvalues(k @ s1 @ k.T, k @ s2 @ k.T).values
        assert np.abs(base - moved).max() < 1e-8

    def test_beta_equals_determinant_ratio(self):
        rng = np.random.default_rng(5)
        s1, s2 = random_spd(rng, 6), random_spd(rng, 6)
        spectrum = generalized_eigenvalues(s1, s2)
        ratio = np.linalg.det(s1) / np.linalg.det(s2)
        assert spectrum.beta == pytest.approx(ratio, rel=1e-8)
        assert spectrum.beta == pytest.approx(float(np.prod(spectrum.values)), rel=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            generalized_eigenvalues(np.eye(3), np.eye(4))

    def test_not_positive_definite(self):
        with pytest.raises(NotPositiveDefinite):
            generalized_eigenvalues(np.diag([1.0, -1.0]), np.eye(2))


class TestSimultaneousDiagonalizer:
    def _check_contract(self, s1, s2, tol=1e-8):
        diag = simultaneous_diagonalizer(s1, s2)
        p = diag.matrix
        s1 = np.asarray(s1, float)
        s2 = np.asarray(s2, float)
        assert np.abs(p @ s2 @ p.T - np.eye(s2.shape[0])).max() < tol
        assert np.abs(p @ s1 @ p.T - np.diag(diag.spectrum.values)).max() < tol
        svals = np.linalg.svd(p, compute_uv=False)
        assert svals[-1] > 1e-12 * svals[0]
        return diag

    def test_already_diagonal(self):
        diag = self._check_contract(np.diag([3.0, 1.0]), np.eye(2))
        assert np.abs(diag.spectrum.values - [1.0, 3.0]).max() < 1e-12

    def test_repeated_eigenvalues(self):
        rng = np.random.default_rng(6)
        s2 = random_spd(rng, 4)
        self._check_contract(2.0 * s2, s2)

    def test_random_tree_pair(self):
        rng = np.random.default_rng(7)
        s1 = build_covariance(random_tree(rng, 7)).matrix
        s2 = build_covariance(random_tree(rng, 7)).matrix
        diag = self._check_contract(s1, s2)
        assert np.abs(
            diag.spectrum.values - generalized_eigenvalues(s1, s2).values
        ).max() < 1e-10

    def test_rows_ascend_with_spectrum(self):
        diag = simultaneous_diagonalizer(np.diag([5.0, 0.5, 2.0]), np.eye(3))
        assert np.all(np.diff(diag.spectrum.values) >= 0)


class TestSpectrumFromValues:
    def test_sorts_and_products(self):
        spectrum = spectrum_from_values([2.0, 0.5, 1.0])
        assert np.array_equal(spectrum.values, [0.5, 1.0, 2.0])
        assert spectrum.beta == pytest.approx(1.0)
        assert spectrum.dim == 3

    def test_rejects_nonpositive(self):
        with pytest.raises(NonPositiveEigenvalue):
            spectrum_from_values([1.0, 0.0])
        with pytest.raises(NonPositiveEigenvalue):
            spectrum_from_values([-2.0, 1.0])
        with pytest.raises(NonPositiveEigenvalue):
            spectrum_from_values([])
