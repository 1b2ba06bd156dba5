"""The generational evolutionary loop.

One run: ramped half-and-half init, per-generation down-sampled
evaluation, parent selection, subtree crossover/mutation with a depth-17
guard, hall-of-fame tracking on validation MSE, and per-generation
trajectory records. Deterministic given (seed, config) except for
wall-clock-driven termination.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from . import expr as ex
from . import selection as sel
from .data import SplitDataset, mse, squared_errors
from .downsampling import DownsampleConfig, DownsampleState, next_subset


@dataclass
class RunConfig:
    problem: str = ""
    method: str = "tourn"
    k: int = None  # default: 5 for tourn, 64 for batch-tourn
    b: float = 0.1
    alpha: float = 1.0
    downsampling: DownsampleConfig = field(default_factory=DownsampleConfig)
    population_size: int = 500
    base_generations: int = 100
    max_depth: int = 17
    init_depth_min: int = 0
    init_depth_max: int = 4
    crossover_prob: float = 0.8
    mutation_prob: float = 0.05
    time_budget_s: float = None  # wall-clock cap; None = generations only
    seed: int = 0
    split_seed: int = 0
    eps_scope: str = "pool"

    def __post_init__(self):
        if self.method not in sel.METHOD_IDS:
            raise ValueError(f"unknown selection method {self.method!r}")
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.base_generations < 1:
            raise ValueError("base_generations must be >= 1")
        for p in (self.crossover_prob, self.mutation_prob):
            if not 0 <= p <= 1:
                raise ValueError("probabilities must be in [0, 1]")
        if self.k is None:
            self.k = 64 if self.method == "batch-tourn" else 5


@dataclass
class HallOfFame:
    best: ex.Expr = None
    val_mse: float = math.inf
    test_mse: float = math.inf
    generation_found: int = -1


@dataclass
class GenerationRecord:
    gen: int
    elapsed_ms: float
    val_mse: float
    test_mse: float
    median_tree_size: float
    subset_size: int


@dataclass
class RunResult:
    records: list
    hall_of_fame: HallOfFame
    generations_completed: int
    termination: str  # "generations" | "time"
    train_evaluations: int  # training-case evaluations in generations 1..G
    final_population: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "records": [asdict(r) for r in self.records],
            "best_expr": ex.to_sexpr(self.hall_of_fame.best),
            "val_mse": self.hall_of_fame.val_mse,
            "test_mse": self.hall_of_fame.test_mse,
            "generation_found": self.hall_of_fame.generation_found,
            "generations_completed": self.generations_completed,
            "termination": self.termination,
            "train_evaluations": self.train_evaluations,
        }


def generational_limit(G: int, cfg: DownsampleConfig) -> int:
    """Evaluation-budget-equivalent generation count for a strategy."""
    if cfg.strategy == "nds":
        return G
    if cfg.strategy == "rds":
        return int(G / cfg.d)
    return int(G / (cfg.d + cfg.s * (1 - cfg.d) / cfg.g))


def update_hall_of_fame(hof: HallOfFame, candidates, split: SplitDataset,
                        generation: int) -> HallOfFame:
    """Install the candidate with the lowest validation MSE if it strictly
    improves on the incumbent."""
    if not candidates:
        raise ValueError("no candidates")
    val_x, val_y = split.validation
    for cand in candidates:
        v = mse(ex.evaluate(cand, val_x), val_y)
        if v < hof.val_mse:
            hof.best = cand
            hof.val_mse = v
            hof.generation_found = generation
            test_x, test_y = split.test
            hof.test_mse = mse(ex.evaluate(cand, test_x), test_y)
    return hof


def _make_selector(config: RunConfig, em: np.ndarray, ctx: sel.SelectionContext,
                   rng: np.random.Generator):
    """Bind a zero-argument select() for this generation's error matrix."""
    method = config.method
    if method == "tourn":
        fitness = sel.aggregate_mse(em)
        return lambda: sel.tournament_select(fitness, config.k, rng)
    if method == "fps":
        fitness = sel.aggregate_mse(em)
        return lambda: sel.fps_select(fitness, rng)
    if method == "lex":
        return lambda: sel.lexicase_select(em, rng)
    if method == "eps-lex":
        return lambda: sel.epsilon_lexicase_select(em, rng, config.eps_scope)
    if method == "eps-plex":
        probs = sel.plexicase_probabilities(em, config.alpha)
        return lambda: int(rng.choice(probs.size, p=probs))
    if method == "batch-tourn":
        bm = sel.batch_error_matrix(em, ctx.batches)
        return lambda: sel.batch_tournament_select(ctx, bm, rng)
    if method == "batch-eps-lex":
        bm = sel.batch_error_matrix(em, ctx.batches)
        return lambda: sel.batch_epsilon_lexicase_select(bm, rng, config.eps_scope)
    raise ValueError(f"unknown selection method {method!r}")


def run(config: RunConfig, split: SplitDataset) -> RunResult:
    """Execute one evolutionary run on a pre-split dataset."""
    rng = np.random.default_rng(config.seed)
    train_x, train_y = split.train
    num_train = train_x.shape[0]
    pset = ex.PrimitiveSet(num_features=train_x.shape[1])
    ds_cfg = config.downsampling
    limit = generational_limit(config.base_generations, ds_cfg)

    population = ex.ramped_half_and_half(
        pset, config.population_size,
        config.init_depth_min, config.init_depth_max, rng)

    hof = HallOfFame()
    ds_state = DownsampleState()
    records = []
    train_evals = 0
    termination = "generations"
    t0 = time.perf_counter()

    gen = 0
    while True:
        assert len(population) == config.population_size
        # active case subset (ids refreshes distances every g generations
        # from a small parent sample evaluated on all training cases)
        parent_errors = None
        if ds_cfg.strategy == "ids" and gen % ds_cfg.g == 0:
            n_parents = math.ceil(ds_cfg.s * config.population_size)
            parent_idx = rng.choice(config.population_size, size=n_parents,
                                    replace=False)
            parent_errors = np.array([
                squared_errors(ex.evaluate(population[i], train_x), train_y)
                for i in parent_idx])
            if gen > 0:
                train_evals += n_parents * num_train
        subset = next_subset(ds_cfg, gen, ds_state, num_train, rng,
                             parent_errors=parent_errors)

        sub_x = train_x[subset]
        sub_y = train_y[subset]
        em = np.array([squared_errors(ex.evaluate(ind, sub_x), sub_y)
                       for ind in population])
        if gen > 0:
            train_evals += config.population_size * subset.size

        # one validation probe per generation: the training-aggregate best
        best_idx = int(np.argmin(em.mean(axis=1)))
        update_hall_of_fame(hof, [population[best_idx]], split, gen)

        sizes = [ex.tree_size(ind) for ind in population]
        records.append(GenerationRecord(
            gen=gen,
            elapsed_ms=(time.perf_counter() - t0) * 1000.0,
            val_mse=hof.val_mse,
            test_mse=hof.test_mse,
            median_tree_size=float(np.median(sizes)),
            subset_size=int(subset.size),
        ))

        if gen >= limit:
            break
        if (config.time_budget_s is not None
                and time.perf_counter() - t0 >= config.time_budget_s):
            termination = "time"
            break

        ctx = sel.SelectionContext(method=config.method, k=config.k,
                                   b=config.b, alpha=config.alpha,
                                   eps_scope=config.eps_scope)
        if config.method in ("batch-tourn", "batch-eps-lex"):
            ctx.batches = sel.make_batches(np.arange(subset.size), config.b, rng)
        select = _make_selector(config, em, ctx, rng)

        offspring = []
        for _ in range(config.population_size):
            if rng.random() < config.crossover_prob:
                p1 = population[select()]
                p2 = population[select()]
                child = ex.subtree_crossover(p1, p2, config.max_depth, rng)
            else:
                child = population[select()]
            if rng.random() < config.mutation_prob:
                child = ex.subtree_mutation(child, pset, config.max_depth, rng)
            assert ex.tree_depth(child) <= config.max_depth
            offspring.append(child)
        population = offspring
        gen += 1

    return RunResult(records=records, hall_of_fame=hof,
                     generations_completed=gen, termination=termination,
                     train_evaluations=train_evals,
                     final_population=population)
