"""Classification-oriented linear dimension reduction.

In the joint eigenbasis of an SPD pair the variables decouple: under the
second hypothesis each transformed coordinate is N(0,1), under the first
N(0, v_i) with v_i the corresponding generalized eigenvalue.  Coordinates
with v_i far from 1 carry classification information; unit ones carry
none.  The optimal N_O x N projection therefore keeps whole rows of the
diagonalizer: k rows for the k largest eigenvalues plus N_O - k rows for
the smallest, where k ranges over

    max(N_O + m - N, 0) <= k <= min(m, N_O),    m = #{v_i > 1},

and the best candidate over that range maximizes the reduced-pair Chernoff
information over all full-rank N_O x N projections.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .divergence import ChernoffResult, chernoff_from_spectrum
from .errors import InvalidBudget, RankDeficientProjection
from .gaussian_tree import CovarianceMatrix, as_covariance, covariance_from_matrix
from .geneig import simultaneous_diagonalizer, spectrum_from_values

UNIT_CLASSIFICATION_TOL = 1e-12


@dataclass(frozen=True)
class ReductionCandidate:
    """One admissible projection: ``k`` rows from the large-eigenvalue end.

    ``row_indices`` index the ascending spectrum (and the rows of the
    diagonalizer); ``matrix`` is the N_O x N projection built from those
    rows; ``ci`` is the Chernoff result of the reduced pair.
    """

    k: int
    row_indices: tuple[int, ...]
    matrix: np.ndarray
    ci: ChernoffResult


def candidate_reductions(sigma1, sigma2, n_out: int) -> list[ReductionCandidate]:
    """All admissible row selections, sorted by reduced CI descending.

    Ties in CI are broken toward smaller k.  Eigenvalues count as "greater
    than one" only beyond a 1e-12 margin, so unit eigenvalues are never
    preferentially selected.
    """
    diag = simultaneous_diagonalizer(sigma1, sigma2)
    values = diag.spectrum.values
    n = diag.spectrum.dim
    if not 1 <= n_out <= n:
        raise InvalidBudget(f"n_out must lie in 1..{n}, got {n_out}")
    m = int(np.sum(values > 1.0 + UNIT_CLASSIFICATION_TOL))
    k_lo = max(n_out + m - n, 0)
    k_hi = min(m, n_out)
    candidates = []
    for k in range(k_lo, k_hi + 1):
        rows = tuple(range(n_out - k)) + tuple(range(n - k, n))
        matrix = diag.matrix[list(rows), :]
        matrix.setflags(write=False)
        ci = chernoff_from_spectrum(spectrum_from_values(values[list(rows)]))
        candidates.append(
            ReductionCandidate(k=k, row_indices=rows, matrix=matrix, ci=ci)
        )
    candidates.sort(key=lambda c: (-c.ci.ci, c.k))
    return candidates


def optimal_reduction(sigma1, sigma2, n_out: int) -> ReductionCandidate:
    """The admissible candidate with maximal reduced Chernoff information."""
    return candidate_reductions(sigma1, sigma2, n_out)[0]


def reduced_pair(a, sigma1, sigma2) -> tuple[CovarianceMatrix, CovarianceMatrix]:
    """(A S1 A^T, A S2 A^T) for a full-row-rank projection A."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise RankDeficientProjection(f"projection must be 2-d, got shape {a.shape}")
    s1 = as_covariance(sigma1, name="sigma1").matrix
    s2 = as_covariance(sigma2, name="sigma2").matrix
    if a.shape[1] != s1.shape[0] or s1.shape[0] != s2.shape[0]:
        raise RankDeficientProjection(
            f"projection shape {a.shape} does not match dimension {s1.shape[0]}"
        )
    svals = np.linalg.svd(a, compute_uv=False)
    if a.shape[0] > a.shape[1] or svals[-1] <= 1e-12 * svals[0]:
        raise RankDeficientProjection("projection rows are not linearly independent")
    r1 = a @ s1 @ a.T
    r2 = a @ s2 @ a.T
    return (
        covariance_from_matrix(0.5 * (r1 + r1.T), name="reduced sigma1"),
        covariance_from_matrix(0.5 * (r2 + r2.T), name="reduced sigma2"),
    )


def pca_baseline(sigma, n_out: int) -> np.ndarray:
    """Variance-maximizing baseline: top-``n_out`` eigenvectors as rows.

    Uses a single covariance matrix and ignores the second hypothesis, so
    it can discard every discriminative direction; kept for comparison.
    """
    cov = as_covariance(sigma, name="sigma")
    if not 1 <= n_out <= cov.dim:
        raise InvalidBudget(f"n_out must lie in 1..{cov.dim}, got {n_out}")
    vals, vecs = np.linalg.eigh(cov.matrix)
    order = np.argsort(vals)[::-1][:n_out]
    return vecs[:, order].T.copy()


def per_dimension_divergence(value: float, lam: float) -> float:
    """Contribution ln(u) + 1/u - 1 with u = (1-lam) + lam*value.

    This is one coordinate's share of D(S_lam || S1); it vanishes at
    value = 1 and increases monotonically as value moves away from 1 on
    either side.  Exposed for the dominance test harness.
    """
    u = (1.0 - lam) + lam * value
    return float(np.log(u) + 1.0 / u - 1.0)
