"""Rank-based comparison of methods across problems: Friedman test and
Nemenyi post-hoc pairwise p-values."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as st


@dataclass(frozen=True)
class RankTable:
    """Problems x methods matrix of performance ranks (1 = best, average
    ranks for ties)."""

    ranks: np.ndarray
    methods: tuple = ()

    @property
    def num_problems(self) -> int:
        return self.ranks.shape[0]

    @property
    def num_methods(self) -> int:
        return self.ranks.shape[1]


def rank_methods(median_mse: np.ndarray, methods=()) -> RankTable:
    """Rank methods per problem by ascending median MSE, average ranks for
    ties."""
    median_mse = np.asarray(median_mse, dtype=float)
    if not np.isfinite(median_mse).all():
        raise ValueError("median MSE matrix must be finite")
    ranks = np.array([st.rankdata(row, method="average") for row in median_mse])
    return RankTable(ranks=ranks, methods=tuple(methods))


def median_ranks(table: RankTable) -> np.ndarray:
    return np.median(table.ranks, axis=0)


def _tie_correction(ranks: np.ndarray) -> float:
    """Correction factor from the tie structure of each rank row."""
    n, k = ranks.shape
    ties = 0.0
    for row in ranks:
        _, counts = np.unique(row, return_counts=True)
        ties += float((counts ** 3 - counts).sum())
    return 1.0 - ties / (k * (k * k - 1) * n)


def friedman_test(table: RankTable, tie_correction: bool = True) -> float:
    """Friedman chi-square p-value for the null that all methods perform
    alike; k - 1 degrees of freedom."""
    ranks = table.ranks
    n, k = ranks.shape
    if n < 2 or k < 2:
        raise ValueError("need >= 2 problems and >= 2 methods")
    col_sums = ranks.sum(axis=0)
    chi2 = 12.0 / (n * k * (k + 1)) * float((col_sums ** 2).sum()) - 3.0 * n * (k + 1)
    if tie_correction:
        c = _tie_correction(ranks)
        if c == 0:
            return 1.0  # every row fully tied: no evidence against the null
        chi2 /= c
    return float(st.chi2.sf(chi2, k - 1))


def nemenyi_posthoc(table: RankTable) -> np.ndarray:
    """Pairwise p-value matrix from the studentized-range distribution
    applied to mean-rank differences; symmetric with unit diagonal."""
    ranks = table.ranks
    n, k = ranks.shape
    if n < 2 or k < 2:
        raise ValueError("need >= 2 problems and >= 2 methods")
    mean_ranks = ranks.mean(axis=0)
    scale = np.sqrt(k * (k + 1) / (6.0 * n))
    diff = np.abs(mean_ranks[:, None] - mean_ranks[None, :])
    q = diff / scale * np.sqrt(2.0)
    p = st.studentized_range.sf(q, k, np.inf)
    p = np.minimum(1.0, np.where(np.isnan(p), 1.0, p))  # sf(0) returns nan on some scipy builds
    np.fill_diagonal(p, 1.0)
    return (p + p.T) / 2.0
