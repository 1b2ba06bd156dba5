"""Per-generation selection of the active training-case subset.

Strategies: ``nds`` (all cases), ``rds`` (fresh uniform subset each
generation), ``ids`` (farthest-first traversal over Euclidean case
distances estimated from sampled parents, distances refreshed every g
generations).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .selection import round_half_up

STRATEGY_IDS = ("nds", "rds", "ids")


@dataclass(frozen=True)
class DownsampleConfig:
    strategy: str = "nds"
    d: float = 1.0  # fraction of training cases active per generation
    s: float = 0.01  # fraction of parents evaluated on all cases
    g: int = 10  # generations between distance recomputations
    # redraw the informed subset every generation from cached distances
    # (fresh random start), or freeze it until the next recomputation
    refresh_each_generation: bool = True

    def __post_init__(self):
        if self.strategy not in STRATEGY_IDS:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if not 0 < self.d <= 1:
            raise ValueError("d must be in (0, 1]")
        if not 0 < self.s <= 1:
            raise ValueError("s must be in (0, 1]")
        if self.g < 1:
            raise ValueError("g must be >= 1")
        if self.strategy == "nds" and self.d != 1.0:
            raise ValueError("strategy 'nds' requires d = 1.0")


@dataclass
class DownsampleState:
    """Cache carried across generations of one run (ids only)."""

    distances: np.ndarray = None
    generation_computed: int = -1
    frozen_subset: np.ndarray = None


def subset_size(num_cases: int, d: float) -> int:
    return max(1, round_half_up(d * num_cases))


def random_subsample(num_cases: int, d: float,
                     rng: np.random.Generator) -> np.ndarray:
    """Uniform sample without replacement of max(1, round(d * n)) cases."""
    if num_cases < 1:
        raise ValueError("need at least one case")
    return rng.choice(num_cases, size=subset_size(num_cases, d), replace=False)


def case_distance_matrix(parent_errors: np.ndarray) -> np.ndarray:
    """Pairwise Euclidean distances between case solve vectors.

    ``parent_errors`` is (sampled_parents x all_train_cases); column t is
    case t's error vector across the sampled parents.
    """
    parent_errors = np.asarray(parent_errors, dtype=float)
    if parent_errors.ndim != 2 or parent_errors.shape[0] < 1:
        raise ValueError("parent_errors must be a nonempty 2-D matrix")
    cols = parent_errors.T  # (cases, parents)
    diff = cols[:, None, :] - cols[None, :, :]
    dm = np.sqrt((diff ** 2).sum(axis=2))
    np.fill_diagonal(dm, 0.0)
    return dm


def farthest_first_subset(dm: np.ndarray, size: int,
                          rng: np.random.Generator) -> np.ndarray:
    """Greedy k-center: random start, then repeatedly add the case whose
    minimum distance to the chosen set is largest; ties uniform."""
    dm = np.asarray(dm, dtype=float)
    n = dm.shape[0]
    if not 1 <= size <= n:
        raise ValueError(f"size {size} out of range [1, {n}]")
    start = int(rng.integers(n))
    chosen = [start]
    min_dist = dm[start].copy()
    remaining = np.ones(n, dtype=bool)
    remaining[start] = False
    while len(chosen) < size:
        best = min_dist[remaining].max()
        candidates = np.flatnonzero(remaining & (min_dist == best))
        pick = int(candidates[rng.integers(candidates.size)])
        chosen.append(pick)
        remaining[pick] = False
        np.minimum(min_dist, dm[pick], out=min_dist)
    return np.array(chosen)


def next_subset(cfg: DownsampleConfig, generation: int, state: DownsampleState,
                num_train_cases: int, rng: np.random.Generator,
                parent_errors: np.ndarray = None) -> np.ndarray:
    """The active case subset for this generation.

    For ids, ``parent_errors`` (sampled parents evaluated on all training
    cases) must be supplied on recomputation generations
    (generation % g == 0, including generation 0).
    """
    if cfg.strategy == "nds":
        return np.arange(num_train_cases)
    if cfg.strategy == "rds":
        return random_subsample(num_train_cases, cfg.d, rng)

    size = subset_size(num_train_cases, cfg.d)
    if generation % cfg.g == 0:
        if parent_errors is None:
            raise ValueError("ids recomputation generation needs parent_errors")
        state.distances = case_distance_matrix(parent_errors)
        state.generation_computed = generation
        state.frozen_subset = None
    elif state.distances is None:
        raise ValueError("ids has no cached distance matrix and no parent sample")

    if not cfg.refresh_each_generation:
        if state.frozen_subset is None:
            state.frozen_subset = farthest_first_subset(state.distances, size, rng)
        return state.frozen_subset
    return farthest_first_subset(state.distances, size, rng)
