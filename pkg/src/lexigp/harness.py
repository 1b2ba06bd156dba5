"""Campaign orchestration: problems x methods x strategies grids of runs,
budget snapshots, rank tables, Friedman/Nemenyi analysis, and report files.

Every run is persisted as its own JSON file under
``out_dir/<problem>/<strategy>-<method>[__b<b>]/run_<i>.json``, so an
interrupted campaign resumes by skipping files that already exist.
"""

from __future__ import annotations

import csv
import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .data import load_dataset, split
from .downsampling import DownsampleConfig
from .engine import RunConfig, run
from .stats import RankTable, rank_methods, median_ranks, friedman_test, nemenyi_posthoc

BATCH_METHODS = ("batch-tourn", "batch-eps-lex")
DEFAULT_BATCH_SIZES = (0.05, 0.075, 0.1)


@dataclass
class CampaignSpec:
    problems: list
    methods: list
    strategies: list
    out_dir: str
    batch_sizes: list = field(default_factory=lambda: list(DEFAULT_BATCH_SIZES))
    runs: int = 30
    population_size: int = 500
    base_generations: int = 100
    time_budget_s: float = None
    d: float = 0.1
    s: float = 0.01
    g: int = 10
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not self.problems or not self.methods or not self.strategies:
            raise ValueError("problems, methods, and strategies must be nonempty")

    @classmethod
    def from_file(cls, path) -> "CampaignSpec":
        with open(path) as fh:
            raw = yaml.safe_load(fh)
        return cls(**raw)


def stable_seed(*parts) -> int:
    """Deterministic 63-bit seed from arbitrary labels; stable across
    processes and Python versions (unlike hash())."""
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def cell_name(strategy: str, method: str, b: float = None) -> str:
    name = f"{strategy}-{method}"
    if b is not None:
        name += f"__b{b:g}"
    return name


def _downsample_config(spec: CampaignSpec, strategy: str) -> DownsampleConfig:
    if strategy == "nds":
        return DownsampleConfig(strategy="nds", d=1.0)
    return DownsampleConfig(strategy=strategy, d=spec.d, s=spec.s, g=spec.g)


def _jobs(spec: CampaignSpec):
    """All (problem_path, config, out_file) triples in the campaign grid."""
    out_root = Path(spec.out_dir)
    for problem_path in spec.problems:
        problem = Path(problem_path).stem
        split_seed = stable_seed(spec.seed, problem, "split")
        for strategy in spec.strategies:
            for method in spec.methods:
                bs = spec.batch_sizes if method in BATCH_METHODS else [None]
                for b in bs:
                    for i in range(spec.runs):
                        config = RunConfig(
                            problem=problem,
                            method=method,
                            b=b if b is not None else 0.1,
                            downsampling=_downsample_config(spec, strategy),
                            population_size=spec.population_size,
                            base_generations=spec.base_generations,
                            time_budget_s=spec.time_budget_s,
                            seed=stable_seed(spec.seed, problem, method,
                                             strategy, b, i),
                            split_seed=split_seed,
                        )
                        out_file = (out_root / problem
                                    / cell_name(strategy, method, b)
                                    / f"run_{i:03d}.json")
                        yield problem_path, config, out_file


def _execute_job(job) -> str:
    problem_path, config, out_file = job
    dataset = load_dataset(problem_path)
    sd = split(dataset, config.split_seed)
    result = run(config, sd)
    out_file.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "problem": config.problem,
        "method": config.method,
        "strategy": config.downsampling.strategy,
        "b": config.b if config.method in BATCH_METHODS else None,
        "seed": config.seed,
        "split_seed": config.split_seed,
        **result.to_dict(),
    }
    tmp = out_file.with_suffix(".tmp")
    tmp.write_text(json.dumps(payload))
    tmp.rename(out_file)
    return str(out_file)


def run_campaign(spec: CampaignSpec) -> dict:
    """Execute the whole grid; completed run files are skipped, dataset
    failures abort only their problem's cells."""
    done, skipped, failures = [], [], []
    pending = []
    for job in _jobs(spec):
        if job[2].exists():
            skipped.append(str(job[2]))
        else:
            pending.append(job)

    # time-budget campaigns stay single-threaded for wall-clock comparability
    parallel = spec.workers > 1 and spec.time_budget_s is None
    if parallel:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            futures = {pool.submit(_execute_job, job): job for job in pending}
            for fut, job in futures.items():
                try:
                    done.append(fut.result())
                except Exception as err:
                    failures.append({"job": str(job[2]), "error": str(err)})
    else:
        for job in pending:
            try:
                done.append(_execute_job(job))
            except Exception as err:
                failures.append({"job": str(job[2]), "error": str(err)})

    return {"completed": done, "skipped": skipped, "failures": failures}


def load_results(out_dir) -> list:
    results = []
    for path in sorted(Path(out_dir).glob("*/*/run_*.json")):
        results.append(json.loads(path.read_text()))
    return results


def snapshot_at(records: list, budget: dict) -> dict:
    """Best-so-far state at a budget point.

    ``budget`` is {"type": "evaluations"} (final record of the
    generational-limit run) or {"type": "time", "seconds": s} (last record
    with elapsed_ms <= s * 1000).
    """
    if not records:
        raise ValueError("no generation records")
    if budget["type"] == "evaluations":
        rec = records[-1]
    elif budget["type"] == "time":
        limit_ms = budget["seconds"] * 1000.0
        eligible = [r for r in records if r["elapsed_ms"] <= limit_ms]
        if not eligible:
            raise ValueError("budget earlier than generation 0")
        rec = eligible[-1]
    else:
        raise ValueError(f"unknown budget type {budget['type']!r}")
    return {"gen": rec["gen"], "test_mse": rec["test_mse"],
            "val_mse": rec["val_mse"],
            "median_tree_size": rec["median_tree_size"]}


def pick_batch_sizes(results: list) -> dict:
    """Winning batch size per (problem, strategy, method): lowest mean
    final validation MSE across runs."""
    by_key = {}
    for r in results:
        if r.get("b") is None:
            continue
        key = (r["problem"], r["strategy"], r["method"])
        by_key.setdefault(key, {}).setdefault(r["b"], []).append(r["val_mse"])
    return {key: min(groups, key=lambda b: float(np.mean(groups[b])))
            for key, groups in by_key.items()}


def collect_median_mse(results: list, budget: dict):
    """Problems x method-labels matrix of median snapshot test MSE.

    Batch methods contribute only their per-problem winning batch size.
    Returns (matrix, problems, labels, per_run) where per_run maps
    (problem, label) -> list of per-run snapshot test MSEs.
    """
    if not results:
        raise ValueError("no results to report")
    winners = pick_batch_sizes(results)
    per_run = {}
    for r in results:
        key = (r["problem"], r["strategy"], r["method"])
        if r.get("b") is not None and winners.get(key) != r["b"]:
            continue
        label = f"{r['strategy']}-{r['method']}"
        snap = snapshot_at(r["records"], budget)
        per_run.setdefault((r["problem"], label), []).append(snap["test_mse"])

    problems = sorted({p for p, _ in per_run})
    labels = sorted({m for _, m in per_run})
    matrix = np.full((len(problems), len(labels)), np.nan)
    for (p, m), values in per_run.items():
        matrix[problems.index(p), labels.index(m)] = float(np.median(values))
    if np.isnan(matrix).any():
        raise ValueError("incomplete campaign: some problem/method cells have no runs")
    return matrix, problems, labels, per_run


def _write_csv(path: Path, header: list, rows: list):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def emit_reports(results_dir, out_dir, budget: dict,
                 render_figures: bool = True) -> dict:
    """Write the per-budget report files: median-MSE table, rank table,
    median-ranking summary, Friedman/Nemenyi CSVs, rank-distribution data,
    and (optionally) a rank boxplot figure."""
    results = load_results(results_dir)
    matrix, problems, labels, _ = collect_median_mse(results, budget)
    table = rank_methods(matrix, methods=labels)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {}

    files["median_mse"] = out / "median_test_mse.csv"
    _write_csv(files["median_mse"], ["problem"] + labels,
               [[p] + [f"{v:.6g}" for v in matrix[i]]
                for i, p in enumerate(problems)])

    files["ranks"] = out / "ranks.csv"
    _write_csv(files["ranks"], ["problem"] + labels,
               [[p] + list(table.ranks[i]) for i, p in enumerate(problems)])

    files["median_ranking"] = out / "median_ranking.csv"
    order = np.argsort(median_ranks(table))
    _write_csv(files["median_ranking"], ["method", "median_rank"],
               [[labels[j], median_ranks(table)[j]] for j in order])

    # the tests are undefined for a single problem or single method
    if table.num_problems >= 2 and table.num_methods >= 2:
        files["friedman"] = out / "friedman.csv"
        _write_csv(files["friedman"], ["n_problems", "n_methods", "p_value"],
                   [[table.num_problems, table.num_methods,
                     f"{friedman_test(table):.6g}"]])

        pmat = nemenyi_posthoc(table)
        files["nemenyi"] = out / "nemenyi.csv"
        _write_csv(files["nemenyi"], ["method"] + labels,
                   [[labels[i]] + [f"{v:.6g}" for v in pmat[i]]
                    for i in range(len(labels))])

    files["rank_distribution"] = out / "rank_distribution.csv"
    _write_csv(files["rank_distribution"], ["method", "problem", "rank"],
               [[labels[j], p, table.ranks[i, j]]
                for i, p in enumerate(problems) for j in range(len(labels))])

    if render_figures:
        from .plots import rank_boxplot
        files["rank_boxplot"] = out / "rank_boxplot.png"
        rank_boxplot(table, labels, files["rank_boxplot"])

    return files
