import numpy as np
from dataclasses import dataclass
from numpy.typing import NDArray
from typing import FrozenSet, Sequence, Union
from src.core.errors import DimensionError, GridError
from src.utils.jit_funcs import nbselection_counts


@dataclass(frozen=True, eq=False)
class StabilityPath:
    """
    Selection probabilities over a λ grid.

    Attributes
    ----------
    lambdas : NDArray
        Strictly increasing grid of penalties, shape (G,).
    probs : NDArray
        Selection probabilities, shape (G, m); probs[g, i] is the fraction of
        subsamples whose coefficient i survives soft-thresholding at lambdas[g].
    q_avg : float
        Average selected count, averaged over the grid.
    n_subsamples : int
        Number of subsamples behind each probability.
    """

    lambdas: NDArray
    probs: NDArray
    q_avg: float
    n_subsamples: int

    @property
    def selected_counts(self) -> NDArray:
        """Expected number of selected coefficients at each grid point."""
        return self.probs.sum(axis=1)

    def index_of(self, lam: float) -> int:
        hits = np.flatnonzero(self.lambdas == lam)
        if hits.size == 0:
            raise GridError(f"λ={lam} is not on the grid")
        return int(hits[0])

    def is_monotone(self) -> bool:
        return bool(np.all(np.diff(self.probs, axis=0) <= 0))


def _check_grid_(lambda_grid) -> NDArray:
    grid = np.asarray(lambda_grid, dtype=np.float64).ravel()
    if grid.size == 0:
        raise GridError("λ grid is empty")
    if np.any(np.diff(grid) <= 0):
        raise GridError("λ grid must be strictly increasing")
    if grid[0] < 0:
        raise GridError("λ grid must be non-negative")
    return grid


def selection_probabilities(scores_per_subsample: Union[NDArray, Sequence[NDArray]], lambda_grid) -> StabilityPath:
    """
    Estimates selection probabilities from per-subsample scores.

    Parameters
    ----------
    scores_per_subsample : Union[NDArray, Sequence[NDArray]]
        One m-vector of pre-threshold scores per subsample, or an array of shape (I, m).
    lambda_grid : array-like
        Strictly increasing non-negative penalties.

    Returns
    -------
    StabilityPath
        probs[g, i] = #{subsamples : |score_i| > λ_g / 2} / I.

    Raises
    ------
    DimensionError
        If no subsamples are given or the score vectors differ in length.
    """
    if len(scores_per_subsample) == 0:
        raise DimensionError("no subsample scores given")

    try:
        scores = np.ascontiguousarray(np.asarray(scores_per_subsample, dtype=np.float64))
    except ValueError as e:
        raise DimensionError(f"subsample score vectors differ in length: {e}")
    if scores.ndim != 2:
        raise DimensionError(f"expected I score vectors of equal length, got shape {scores.shape}")

    grid = _check_grid_(lambda_grid)
    counts = nbselection_counts(scores, grid / 2.0)
    probs = counts / scores.shape[0]

    return StabilityPath(
        lambdas=grid,
        probs=probs,
        q_avg=float(probs.sum(axis=1).mean()),
        n_subsamples=scores.shape[0],
    )


def stable_set(path: StabilityPath, lam: float, pi_thr: float) -> FrozenSet[int]:
    """
    Selected coefficients whose probability at λ reaches `pi_thr`; never-selected
    coefficients are excluded even when `pi_thr` is 0.
    """
    g = path.index_of(lam)
    row = path.probs[g]
    return frozenset(np.flatnonzero((row >= pi_thr) & (row > 0)).tolist())
