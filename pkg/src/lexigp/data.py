"""Dataset ingestion, train/validation/test splitting, and error metrics."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class IngestionError(ValueError):
    """Raised when a dataset file cannot be parsed into a clean Dataset."""


@dataclass(frozen=True)
class Dataset:
    name: str
    features: np.ndarray  # (instances, num_features)
    targets: np.ndarray  # (instances,)

    @property
    def num_instances(self) -> int:
        return self.features.shape[0]

    @property
    def num_features(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class SplitDataset:
    """70/15/15 split; floor for train and validation, remainder to test."""

    train: tuple
    validation: tuple
    test: tuple
    split_seed: int


def load_dataset(path) -> Dataset:
    """Load a CSV/TSV file with a header row and a ``target`` column.

    All non-target columns become features, in header order. Rejects
    non-numeric and missing cells outright (PMLB-style files are clean).
    """
    path = Path(path)
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.strip():
            raise IngestionError(f"{path}: empty file")
        delimiter = "\t" if "\t" in first else ","
        fh.seek(0)
        reader = csv.reader(fh, delimiter=delimiter)
        header = next(reader)
        if "target" not in header:
            raise IngestionError(f"{path}: no 'target' column in header {header}")
        target_col = header.index("target")
        rows = []
        for r, row in enumerate(reader):
            if not row:
                continue
            if len(row) != len(header):
                raise IngestionError(f"{path}: row {r + 2} has {len(row)} cells, "
                                     f"expected {len(header)}")
            parsed = []
            for c, cell in enumerate(row):
                try:
                    v = float(cell)
                except ValueError:
                    raise IngestionError(f"{path}: non-numeric cell at row {r + 2}, "
                                         f"column {header[c]!r}: {cell!r}") from None
                if not np.isfinite(v):
                    raise IngestionError(f"{path}: non-finite value at row {r + 2}, "
                                         f"column {header[c]!r}")
                parsed.append(v)
            rows.append(parsed)
    if not rows:
        raise IngestionError(f"{path}: header only, no data rows")
    data = np.array(rows, dtype=float)
    feature_cols = [i for i in range(len(header)) if i != target_col]
    return Dataset(name=path.stem, features=data[:, feature_cols],
                   targets=data[:, target_col])


def split(dataset: Dataset, seed: int) -> SplitDataset:
    """Deterministic uniformly random 70/15/15 split under ``seed``."""
    n = dataset.num_instances
    if n < 3:
        raise ValueError("need at least 3 instances to split")
    perm = np.random.default_rng(seed).permutation(n)
    n_train = int(n * 0.70)
    n_val = int(n * 0.15)
    idx_train = perm[:n_train]
    idx_val = perm[n_train:n_train + n_val]
    idx_test = perm[n_train + n_val:]

    def part(idx):
        return dataset.features[idx], dataset.targets[idx]

    return SplitDataset(train=part(idx_train), validation=part(idx_val),
                        test=part(idx_test), split_seed=seed)


def squared_errors(predictions, targets) -> np.ndarray:
    predictions = np.asarray(predictions, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if predictions.shape != targets.shape:
        raise ValueError(f"length mismatch: {predictions.shape} vs {targets.shape}")
    return (targets - predictions) ** 2


def mse(predictions, targets) -> float:
    errs = squared_errors(predictions, targets)
    if errs.size == 0:
        raise ValueError("mse of empty input")
    return float(errs.mean())
