import numpy as np
import pytest

from src.core.types import MultiViewData
from src.parameters import FitConfig


def planted_views(n=50, dims=(500, 500), rows=10, cols=100, seed=0):
    """Noiseless views with one block of U(0.5, 1) entries in rows 0..rows-1, cols 0..cols-1."""
    rng = np.random.default_rng(seed)
    views = []
    for p in dims:
        x = np.zeros((n, p))
        x[:rows, :cols] = rng.uniform(0.5, 1.0, size=(rows, cols))
        views.append(x)
    return MultiViewData(tuple(views))


@pytest.fixture
def planted_data():
    return planted_views()


@pytest.fixture
def fast_config():
    return FitConfig(n_subsamples=30, max_iters=20, seed=7)
