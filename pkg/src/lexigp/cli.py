"""Command-line interface: single runs, campaigns, and report generation."""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

import click

from .data import load_dataset, split
from .downsampling import DownsampleConfig, STRATEGY_IDS
from .engine import RunConfig, run
from .harness import CampaignSpec, emit_reports, run_campaign
from .selection import METHOD_IDS


@click.group()
def main():
    """GP symbolic regression with lexicase-based selection and
    down-sampling strategies."""


@main.command("run")
@click.option("--problem", required=True, type=click.Path(exists=True),
              help="CSV/TSV dataset with a 'target' column.")
@click.option("--selection", "method", required=True,
              type=click.Choice(METHOD_IDS))
@click.option("--downsampling", "strategy", default="nds",
              type=click.Choice(STRATEGY_IDS))
@click.option("--d", default=0.1, show_default=True,
              help="Down-sample rate (rds/ids).")
@click.option("--s", default=0.01, show_default=True,
              help="Parent sampling rate (ids).")
@click.option("--g", default=10, show_default=True,
              help="Distance recomputation interval in generations (ids).")
@click.option("--batch-size", "b", default=0.1, show_default=True,
              help="Batch fraction for batch methods.")
@click.option("--k", default=None, type=int,
              help="Tournament size (default 5; 64 for batch-tourn).")
@click.option("--alpha", default=1.0, show_default=True,
              help="Sharpening exponent for eps-plex.")
@click.option("--population", default=500, show_default=True)
@click.option("--generations", default=100, show_default=True,
              help="Base generation budget G; down-sampling scales it.")
@click.option("--time-budget", default=None, type=float,
              help="Wall-clock budget in seconds.")
@click.option("--seed", default=0, show_default=True)
@click.option("--split-seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(),
              help="Output directory for log and summary.")
def run_cmd(problem, method, strategy, d, s, g, b, k, alpha, population,
            generations, time_budget, seed, split_seed, out):
    """Execute one evolutionary run and write its trajectory log."""
    ds_cfg = (DownsampleConfig(strategy="nds", d=1.0) if strategy == "nds"
              else DownsampleConfig(strategy=strategy, d=d, s=s, g=g))
    config = RunConfig(
        problem=Path(problem).stem, method=method, k=k, b=b, alpha=alpha,
        downsampling=ds_cfg, population_size=population,
        base_generations=generations, time_budget_s=time_budget,
        seed=seed, split_seed=split_seed)

    dataset = load_dataset(problem)
    result = run(config, split(dataset, split_seed))

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    log_path = out_dir / "generations.jsonl"
    with open(log_path, "w") as fh:
        for rec in result.records:
            fh.write(json.dumps(asdict(rec)) + "\n")
    summary = result.to_dict()
    del summary["records"]
    summary_path = out_dir / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2))
    click.echo(f"wrote {log_path} and {summary_path}")
    click.echo(f"best: {summary['best_expr']}")
    click.echo(f"test MSE: {summary['test_mse']:.6g} "
               f"({summary['generations_completed']} generations, "
               f"terminated by {summary['termination']})")


@main.command("campaign")
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True),
              help="YAML campaign spec.")
def campaign_cmd(spec_path):
    """Run a problems x methods x strategies campaign (resumable)."""
    spec = CampaignSpec.from_file(spec_path)
    outcome = run_campaign(spec)
    click.echo(f"completed: {len(outcome['completed'])}, "
               f"skipped: {len(outcome['skipped'])}, "
               f"failures: {len(outcome['failures'])}")
    for failure in outcome["failures"]:
        click.echo(f"  FAILED {failure['job']}: {failure['error']}", err=True)


@main.command("report")
@click.option("--in", "results_dir", required=True, type=click.Path(exists=True),
              help="Campaign results directory.")
@click.option("--at", "budget", default="evaluations", show_default=True,
              help="Budget point: 'evaluations' or a time in seconds like '900'.")
@click.option("--out", default=None, type=click.Path(),
              help="Report directory (default: <in>/report_<budget>).")
@click.option("--figures/--no-figures", default=True, show_default=True,
              help="Also render the rank boxplot to PNG.")
def report_cmd(results_dir, budget, out, figures):
    """Emit median-MSE, rank, Friedman, and Nemenyi tables at a budget point."""
    if budget == "evaluations":
        budget_spec = {"type": "evaluations"}
        tag = "evaluations"
    else:
        budget_spec = {"type": "time", "seconds": float(budget)}
        tag = f"{float(budget):g}s"
    out = out or str(Path(results_dir) / f"report_{tag}")
    files = emit_reports(results_dir, out, budget_spec, render_figures=figures)
    for name, path in files.items():
        click.echo(f"{name}: {path}")


if __name__ == "__main__":
    main()
