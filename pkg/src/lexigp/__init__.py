"""lexigp: GP symbolic regression with lexicase-based selection,
down-sampling strategies, and a benchmark harness."""

from .data import Dataset, SplitDataset, load_dataset, mse, split, squared_errors
from .downsampling import DownsampleConfig
from .engine import RunConfig, RunResult, generational_limit, run
from .expr import Expr, PrimitiveSet
from .harness import CampaignSpec, emit_reports, run_campaign, snapshot_at
from .stats import RankTable, friedman_test, nemenyi_posthoc, rank_methods

__all__ = [
    "Dataset", "SplitDataset", "load_dataset", "mse", "split", "squared_errors",
    "DownsampleConfig", "RunConfig", "RunResult", "generational_limit", "run",
    "Expr", "PrimitiveSet", "CampaignSpec", "emit_reports", "run_campaign",
    "snapshot_at", "RankTable", "friedman_test", "nemenyi_posthoc",
    "rank_methods",
]

__version__ = "0.1.0"
