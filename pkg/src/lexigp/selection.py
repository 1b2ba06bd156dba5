"""Parent selection operators over a population x cases error matrix.

Six methods behind one vocabulary of stable identifiers:
``tourn``, ``fps``, ``lex``, ``eps-lex``, ``eps-plex``, ``batch-tourn``,
``batch-eps-lex``. All selectors take an explicit numpy Generator and
return a population index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

METHOD_IDS = ("tourn", "fps", "lex", "eps-lex", "eps-plex",
              "batch-tourn", "batch-eps-lex")

FPS_ZERO_SHIFT = 1e-10


def round_half_up(x: float) -> int:
    """round() with ties away from zero, used for batch and subset sizing."""
    return int(np.floor(x + 0.5))


@dataclass
class SelectionContext:
    """Per-generation selection parameters and the BTSS batch cursor."""

    method: str = "tourn"
    k: int = 5
    b: float = 0.1
    alpha: float = 1.0
    batches: list = field(default_factory=list)
    batch_cursor: int = 0
    # "pool" recomputes the MAD threshold over the shrinking candidate pool
    # at each filtering step; "population" precomputes it once per case.
    eps_scope: str = "pool"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("tournament size k must be >= 1")
        if not 0 < self.b <= 1:
            raise ValueError("batch fraction b must be in (0, 1]")
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")


def validate_error_matrix(em: np.ndarray) -> np.ndarray:
    em = np.asarray(em, dtype=float)
    if em.ndim != 2 or em.shape[0] < 1 or em.shape[1] < 1:
        raise ValueError(f"error matrix must be 2-D and nonempty, got {em.shape}")
    if not np.isfinite(em).all() or (em < 0).any():
        raise ValueError("error matrix entries must be finite and >= 0")
    return em


def aggregate_mse(em: np.ndarray) -> np.ndarray:
    """Per-individual mean error over all active cases."""
    return validate_error_matrix(em).mean(axis=1)


def tournament_select(fitness: np.ndarray, k: int, rng: np.random.Generator) -> int:
    """k participants drawn with replacement; lowest fitness wins, ties
    broken uniformly among the tied participants."""
    fitness = np.asarray(fitness, dtype=float)
    if fitness.size == 0:
        raise ValueError("empty population")
    participants = rng.integers(fitness.size, size=k)
    scores = fitness[participants]
    winners = participants[scores == scores.min()]
    return int(winners[rng.integers(winners.size)])


def fps_select(fitness: np.ndarray, rng: np.random.Generator) -> int:
    """Fitness-proportionate selection on inverse MSE.

    A zero MSE anywhere shifts every MSE by 1e-10 first so the inverse
    stays finite.
    """
    fitness = np.asarray(fitness, dtype=float)
    if fitness.size == 0:
        raise ValueError("empty population")
    if (fitness == 0).any():
        fitness = fitness + FPS_ZERO_SHIFT
    weights = 1.0 / fitness
    probs = weights / weights.sum()
    return int(rng.choice(fitness.size, p=probs))


def mad(values) -> float:
    """Median absolute deviation; even-length medians average the central pair."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("mad of empty vector")
    return float(np.median(np.abs(values - np.median(values))))


def _lexicase_core(em: np.ndarray, rng: np.random.Generator, epsilon) -> int:
    """Shared filtering loop for lexicase and its epsilon variants.

    ``epsilon`` is None for strict lexicase, a callable
    (case_index, pool_errors_on_case) -> threshold slack otherwise.
    """
    em = validate_error_matrix(em)
    pool = np.arange(em.shape[0])
    for t in rng.permutation(em.shape[1]):
        if pool.size == 1:
            break
        col = em[pool, t]
        best = col.min()
        if epsilon is None:
            pool = pool[col == best]
        else:
            pool = pool[col <= best + epsilon(t, col)]
    return int(pool[rng.integers(pool.size)])


def lexicase_select(em: np.ndarray, rng: np.random.Generator) -> int:
    """Standard lexicase: shuffle cases, keep per-case elites, random pick
    from the survivors."""
    return _lexicase_core(em, rng, epsilon=None)


def epsilon_lexicase_select(em: np.ndarray, rng: np.random.Generator,
                            eps_scope: str = "pool",
                            epsilon_override: float = None) -> int:
    """Lexicase with pass band e <= e* + eps, eps from the MAD of the
    case's errors.

    eps_scope="pool" (default) recomputes the MAD over the current
    candidate pool at each step; "population" fixes it per case over the
    whole population up front. ``epsilon_override`` forces a constant
    slack instead (0 reduces exactly to strict lexicase).
    """
    if epsilon_override is not None:
        eps = lambda t, col: epsilon_override
    elif eps_scope == "pool":
        eps = lambda t, col: mad(col)
    elif eps_scope == "population":
        em = validate_error_matrix(em)
        fixed = np.array([mad(em[:, t]) for t in range(em.shape[1])])
        eps = lambda t, col: fixed[t]
    else:
        raise ValueError(f"unknown eps_scope {eps_scope!r}")
    return _lexicase_core(em, rng, epsilon=eps)


def plexicase_probabilities(em: np.ndarray, alpha: float = 1.0) -> np.ndarray:
    """Selection distribution over the eps-relaxed Pareto boundary.

    An individual dominated by another (worse by more than eps_t on some
    case, never better by more than eps_t on any) gets probability 0.
    Each boundary individual is weighted by 1 plus the number of pairwise
    dominations it scores, sharpened by ``alpha`` and renormalized.
    """
    em = validate_error_matrix(em)
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    n = em.shape[0]
    eps = np.array([mad(em[:, t]) for t in range(em.shape[1])])

    # dominates[i, j]: j is worse than i by more than eps on >= 1 case and
    # never better than i by more than eps
    worse = (em[None, :, :] > em[:, None, :] + eps).any(axis=2)
    better = (em[None, :, :] < em[:, None, :] - eps).any(axis=2)
    dominates = worse & ~better
    np.fill_diagonal(dominates, False)

    dominated = dominates.any(axis=0)
    weights = np.where(dominated, 0.0, 1.0 + dominates.sum(axis=1))
    weights = weights ** alpha
    return weights / weights.sum()


def plexicase_select(em: np.ndarray, rng: np.random.Generator,
                     alpha: float = 1.0) -> int:
    probs = plexicase_probabilities(em, alpha)
    return int(rng.choice(probs.size, p=probs))


def make_batches(case_indices, b: float, rng: np.random.Generator) -> list:
    """Shuffle cases and chop into consecutive batches of size
    max(1, round(b * n)); a short final batch is kept."""
    case_indices = np.asarray(case_indices)
    if case_indices.size < 1:
        raise ValueError("need at least one case")
    if not 0 < b <= 1:
        raise ValueError("batch fraction b must be in (0, 1]")
    shuffled = rng.permutation(case_indices)
    size = max(1, round_half_up(b * case_indices.size))
    return [shuffled[i:i + size] for i in range(0, shuffled.size, size)]


def batch_error_matrix(em: np.ndarray, batches) -> np.ndarray:
    """Collapse per-case errors to per-batch MSE columns."""
    em = validate_error_matrix(em)
    return np.column_stack([em[:, np.asarray(batch)].mean(axis=1)
                            for batch in batches])


def batch_tournament_select(ctx: SelectionContext, batch_mse: np.ndarray,
                            rng: np.random.Generator) -> int:
    """BTSS: tournament on the batch-MSE column at the cursor, then advance
    the cursor so the next selection event uses the next batch."""
    batch_mse = validate_error_matrix(batch_mse)
    col = ctx.batch_cursor % batch_mse.shape[1]
    winner = tournament_select(batch_mse[:, col], ctx.k, rng)
    ctx.batch_cursor += 1
    return winner


def batch_epsilon_lexicase_select(batch_mse: np.ndarray,
                                  rng: np.random.Generator,
                                  eps_scope: str = "pool") -> int:
    """Epsilon-lexicase applied to per-batch MSE columns."""
    return epsilon_lexicase_select(batch_mse, rng, eps_scope=eps_scope)
