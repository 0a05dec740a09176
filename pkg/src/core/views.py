import numpy as np
from numpy.typing import NDArray
from typing import List, Sequence
from src.core.errors import ConfigError, DimensionError
from src.core.types import MultiViewData

STANDARDIZATIONS = ("none", "center", "scale", "center_scale", "frobenius")


def view_offsets(dims: Sequence[int]) -> NDArray:
    """
    Start offsets of each view's block in the stacked column space, plus the total.

    Examples
    --------
    >>> view_offsets([2, 3, 1])
    array([0, 2, 5, 6])
    """
    return np.concatenate(([0], np.cumsum(np.asarray(dims, dtype=np.int64))))


def concat_views(data: MultiViewData) -> NDArray:
    """
    Stacks the views column-wise into one n x sum(p^(d)) matrix, blocks in view order.
    """
    return np.hstack(data.views)


def split_vector(v: NDArray, dims: Sequence[int]) -> List[NDArray]:
    """
    Splits a stacked vector back into its per-view pieces.

    Parameters
    ----------
    v : NDArray
        Vector of length sum(dims).
    dims : Sequence[int]
        Per-view lengths; zero-length pieces are allowed.

    Returns
    -------
    List[NDArray]
        One vector per view, copies of the corresponding slices.

    Raises
    ------
    DimensionError
        If the length of `v` does not match sum(dims).
    """
    v = np.asarray(v)
    offsets = view_offsets(dims)
    if v.ndim != 1 or v.size != offsets[-1]:
        raise DimensionError(f"vector of length {v.size} cannot be split into dims {tuple(dims)}")
    return [v[offsets[d]:offsets[d + 1]].copy() for d in range(len(dims))]


def standardize_views(data: MultiViewData, method: str = "none") -> MultiViewData:
    """
    Applies one of the per-view preprocessing options before fitting.

    Steps:
    1. "center" subtracts each variable's mean.
    2. "scale" divides each variable by its standard deviation (constant variables are left as is).
    3. "center_scale" does both, giving mean 0 and variance 1 per variable.
    4. "frobenius" divides each view by its Frobenius norm.
    5. "none" returns the data unchanged.
    """
    if method not in STANDARDIZATIONS:
        raise ConfigError(f"unknown standardization '{method}', expected one of {STANDARDIZATIONS}")
    if method == "none":
        return data

    out = []
    for x in data.views:
        y = np.array(x, dtype=np.float64, copy=True)

        if method in ("center", "center_scale"):
            y -= y.mean(axis=0)

        if method in ("scale", "center_scale"):
            sd = y.std(axis=0, ddof=1) if y.shape[0] > 1 else np.ones(y.shape[1])
            sd[sd == 0] = 1.0
            y /= sd

        if method == "frobenius":
            norm = np.linalg.norm(y)
            if norm > 0:
                y /= norm

        out.append(y)

    return data.with_views(out)
