import numpy as np
from numpy.typing import NDArray
from scipy.linalg import svd, svdvals
from typing import Tuple
from src.core.errors import DegenerateInputError, DimensionError, NonFiniteError


def _check_matrix_(X: NDArray) -> NDArray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise NonFiniteError("matrix has non-finite entries")
    if not np.any(X):
        raise DegenerateInputError("matrix is all zeros")
    return X


def leading_triplet(X: NDArray) -> Tuple[float, NDArray, NDArray]:
    """
    Dominant singular triplet of a dense matrix.

    Parameters
    ----------
    X : NDArray
        Finite, non-zero matrix of shape (n, p).

    Returns
    -------
    Tuple[float, NDArray, NDArray]
        (s, u, v) with unit u and v, s = uᵀXv >= 0.

    Notes
    -----
    - (u, v) are flipped together so the largest-magnitude entry of u is positive,
      which makes the output reproducible across calls.
    """
    X = _check_matrix_(X)
    U, sigma, Vt = svd(X, full_matrices=False, check_finite=False)
    u, v = U[:, 0].copy(), Vt[0].copy()

    if u[np.argmax(np.abs(u))] < 0:
        u, v = -u, -v

    return float(sigma[0]), u, v


def deflate(X: NDArray, s: float, u: NDArray, v: NDArray) -> NDArray:
    """
    Removes the rank-one layer s·u·vᵀ from X.

    When u and v are unit vectors and s = uᵀXv, the squared Frobenius norm
    drops by exactly s².
    """
    X = np.asarray(X, dtype=np.float64)
    u, v = np.asarray(u, dtype=np.float64), np.asarray(v, dtype=np.float64)
    if X.ndim != 2 or u.shape != (X.shape[0],) or v.shape != (X.shape[1],):
        raise DimensionError(f"cannot deflate {X.shape} by u{u.shape} and v{v.shape}")
    return X - s * np.outer(u, v)


def proportions_of_variation(X: NDArray) -> NDArray:
    """
    Fraction of the total squared singular mass carried by each singular value,
    in non-increasing order (length min(n, p)).
    """
    X = _check_matrix_(X)
    sq = svdvals(X, check_finite=False) ** 2
    return sq / sq.sum()
