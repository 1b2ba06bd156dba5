"""Figure rendering for report output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .stats import RankTable, median_ranks


def rank_boxplot(table: RankTable, labels, out_path):
    """Boxplot of per-problem ranks, one box per method, ordered by median
    rank (best first)."""
    order = np.argsort(median_ranks(table))
    data = [table.ranks[:, j] for j in order]
    names = [labels[j] for j in order]

    fig, ax = plt.subplots(figsize=(max(6, 0.6 * len(names)), 4.5))
    ax.boxplot(data, tick_labels=names)
    ax.set_ylabel("rank (lower is better)")
    ax.set_xlabel("method")
    plt.setp(ax.get_xticklabels(), rotation=45, ha="right")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
