import numpy as np
from numpy.typing import NDArray
from typing import NamedTuple, Sequence, Tuple
from src.core.errors import ConfigError, DimensionError
from src.utils.jit_funcs import nbsoftthresh


class Iterate(NamedTuple):
    """One alternation's unit vectors and per-view scales."""
    u: NDArray
    v: Tuple[NDArray, ...]
    s: Tuple[float, ...]


def soft_threshold(x: NDArray, lam: float) -> NDArray:
    """
    sign(x)·(|x| - λ/2)_+ componentwise; the minimiser of w² - 2·w·x + λ·|w| per coordinate.

    Examples
    --------
    >>> soft_threshold(np.array([3.0, -1.0]), 2.0)
    array([2., 0.])
    """
    if lam < 0:
        raise ConfigError(f"penalty must be non-negative, got {lam}")
    return nbsoftthresh(np.ascontiguousarray(x, dtype=np.float64).ravel(), float(lam))


def update_v(X_d: NDArray, u: NDArray, lam: float) -> NDArray:
    """
    Unnormalised sparse right vector of one view: soft_threshold(X_dᵀu, λ).
    A zero result is legal and means no variable survives.
    """
    if X_d.shape[0] != u.size:
        raise DimensionError(f"u has length {u.size} for a view with {X_d.shape[0]} rows")
    return soft_threshold(X_d.T @ u, lam)


def update_u(X: NDArray, v: NDArray, lam: float) -> NDArray:
    """
    Unnormalised sparse left vector on the stacked data: soft_threshold(X·v, λ).
    """
    if X.shape[1] != v.size:
        raise DimensionError(f"v has length {v.size} for stacked data with {X.shape[1]} columns")
    return soft_threshold(X @ v, lam)


def objective(views: Sequence[NDArray], it: Iterate, sq_norms: Sequence[float]) -> float:
    """
    Σ_d ‖X^(d) - s^(d)·u·v^(d)ᵀ‖²_F, expanded so no rank-one matrix is formed.
    """
    total = 0.0
    uu = float(it.u @ it.u)
    for x, v, s, sq in zip(views, it.v, it.s, sq_norms):
        total += sq - 2.0 * s * float(it.u @ (x @ v)) + s * s * uu * float(v @ v)
    return total


def converged(prev: Iterate, curr: Iterate, prev_objective: float, curr_objective: float, merr: float) -> bool:
    """
    True if either the relative objective change or
    max(‖Δu‖², min_d ‖Δv^(d)‖²) falls below `merr`.
    """
    rel = abs(prev_objective - curr_objective) / max(prev_objective, np.finfo(float).eps)
    du = float(np.sum((prev.u - curr.u) ** 2))
    dv = min(float(np.sum((a - b) ** 2)) for a, b in zip(prev.v, curr.v))
    return rel < merr or max(du, dv) < merr


def sign_coherent(x: NDArray) -> NDArray:
    """
    Keeps only the entries that share the dominant sign (the sign of their sum).
    """
    total = x.sum()
    if total == 0:
        return x
    return np.where(np.sign(x) == np.sign(total), x, 0.0)
