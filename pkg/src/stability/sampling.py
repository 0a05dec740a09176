import numpy as np
from numpy.typing import NDArray
from typing import Callable, Optional, Sequence, Union
from src.core.errors import DimensionError

ROLE_U = 0
ROLE_V = 1

RngSource = Union[np.random.Generator, Callable[[int], np.random.Generator]]


class SeedStreams:
    """
    Derives independent generators from one master seed.

    Every stream is keyed by a tuple of counters (layer, iteration, role, step),
    so a draw depends only on its key and not on what was drawn before it.
    """

    def __init__(self, seed: int) -> None:
        self.seed = int(seed)

    def generator(self, *key: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=tuple(int(k) for k in key)))

    def factory(self, *prefix: int) -> Callable[[int], np.random.Generator]:
        """Generator per search step under a fixed key prefix."""
        return lambda step: self.generator(*prefix, step)


def rng_for_step(rng: RngSource, step: int) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else rng(step)


def subsample_size(fraction: float, dim: int) -> int:
    return max(1, min(dim, int(np.ceil(fraction * dim))))


class ScoreSampler:
    """
    Produces the pre-threshold scores a stability search counts over.

    Attributes
    ----------
    m : int
        Number of coefficients being selected.

    Methods
    -------
    full_scores() -> NDArray:
        Scores on the full data, shape (m,).
    draw(rng: np.random.Generator, count: int, fraction: float) -> NDArray:
        Scores on `count` fresh subsamples, shape (count, m).
    """

    m: int

    def full_scores(self) -> NDArray:
        raise NotImplementedError("Derived classes should implement this method")

    def draw(self, rng: np.random.Generator, count: int, fraction: float) -> NDArray:
        raise NotImplementedError("Derived classes should implement this method")


class ColumnSubsampleScores(ScoreSampler):
    """
    Scores X·v for the shared left vector, with variables subsampled within
    every view independently while all samples are kept.

    Parameters
    ----------
    views : Sequence[NDArray]
        Current (deflated) views, each (n, p^(d)).
    v_parts : Sequence[NDArray]
        Current right vectors, one per view.
    row_mask : Optional[NDArray]
        0/1 weights over samples; masked samples always score 0.
    """

    def __init__(self, views: Sequence[NDArray], v_parts: Sequence[NDArray], row_mask: Optional[NDArray] = None) -> None:
        if len(views) != len(v_parts):
            raise DimensionError("one right vector per view is required")
        self.views = list(views)
        self.v_parts = [np.asarray(v, dtype=np.float64) for v in v_parts]
        self.m = self.views[0].shape[0]
        self.row_mask = np.ones(self.m) if row_mask is None else np.asarray(row_mask, dtype=np.float64)

    def full_scores(self) -> NDArray:
        scores = sum(x @ v for x, v in zip(self.views, self.v_parts))
        return scores * self.row_mask

    def draw(self, rng: np.random.Generator, count: int, fraction: float) -> NDArray:
        scores = np.zeros((count, self.m), dtype=np.float64)

        for x, v in zip(self.views, self.v_parts):
            p = v.size
            k = subsample_size(fraction, p)
            weights = np.zeros((count, p), dtype=np.float64)
            for s in range(count):
                cols = rng.choice(p, size=k, replace=False)
                weights[s, cols] = v[cols]
            scores += weights @ x.T

        return scores * self.row_mask


class RowSubsampleScores(ScoreSampler):
    """
    Scores X^(d)ᵀ·u for one view's right vector, with samples subsampled.

    Row draws consume the generator identically for every view, so views
    searched with the same stream see the same sample subsets.
    """

    def __init__(self, view: NDArray, u: NDArray, col_mask: Optional[NDArray] = None) -> None:
        self.view = view
        self.u = np.asarray(u, dtype=np.float64)
        if self.u.size != view.shape[0]:
            raise DimensionError(f"u has length {self.u.size} for a view with {view.shape[0]} rows")
        self.m = view.shape[1]
        self.col_mask = np.ones(self.m) if col_mask is None else np.asarray(col_mask, dtype=np.float64)

    def full_scores(self) -> NDArray:
        return (self.view.T @ self.u) * self.col_mask

    def draw(self, rng: np.random.Generator, count: int, fraction: float) -> NDArray:
        n = self.u.size
        k = subsample_size(fraction, n)
        weights = np.zeros((count, n), dtype=np.float64)

        for s in range(count):
            rows = rng.choice(n, size=k, replace=False)
            weights[s, rows] = self.u[rows]

        return (weights @ self.view) * self.col_mask
