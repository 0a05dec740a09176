import numpy as np
from numba import njit, float64
from numpy.typing import NDArray

@njit(float64[:](float64[:], float64), cache=True)
def nbsoftthresh(x: NDArray, lam: float) -> NDArray:
    """
    Componentwise sign(x) * (|x| - lam/2)_+ , the closed-form lasso coordinate solution.
    """
    half = lam / 2.0
    out = np.zeros(x.size, dtype=np.float64)
    for i in range(x.size):
        excess = np.abs(x[i]) - half
        if excess > 0.0:
            out[i] = np.sign(x[i]) * excess
    return out

@njit(cache=True)
def nbselection_counts(scores: NDArray, thresholds: NDArray) -> NDArray:
    """
    Counts, for every threshold and coefficient, the subsamples whose absolute
    score is strictly above the threshold.

    Parameters
    ----------
    scores : NDArray
        Array of shape (n_subsamples, m), one row of pre-threshold scores per subsample.
    thresholds : NDArray
        Strictly increasing thresholds of shape (G,).

    Returns
    -------
    NDArray
        Integer counts of shape (G, m).

    Notes
    -----
    - Relies on `thresholds` being increasing, so each count row is non-increasing
      along the threshold axis by construction.
    """
    n_sub, m = scores.shape
    n_thr = thresholds.size
    counts = np.zeros((n_thr, m), dtype=np.int64)

    for s in range(n_sub):
        for i in range(m):
            a = np.abs(scores[s, i])
            for g in range(n_thr):
                if a > thresholds[g]:
                    counts[g, i] += 1
                else:
                    break

    return counts

@njit(float64(float64, float64, float64), cache=True)
def nbclip(val: float, min: float, max: float) -> float:
    if val < min:
        return min
    elif val > max:
        return max
    else:
        return val
