import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lexigp.data import Dataset


def synthetic_dataset(name, n_instances, seed, kind="product"):
    """Small learnable regression problems built from the engine's own
    primitive vocabulary plus Gaussian noise."""
    rng = np.random.default_rng(seed)
    X = rng.uniform(-2, 2, size=(n_instances, 2))
    if kind == "product":
        y = X[:, 0] * X[:, 1] + np.sin(X[:, 0])
    elif kind == "quotient":
        y = X[:, 0] / np.sqrt(1 + X[:, 1] ** 2) + np.cos(X[:, 1])
    else:
        raise ValueError(kind)
    y = y + 0.05 * rng.normal(size=n_instances)
    return Dataset(name, X, y)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def toy_dataset():
    return synthetic_dataset("toy_product", 100, seed=7)
