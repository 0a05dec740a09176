import numpy as np
from typing import List, Sequence
from src.core.errors import ConfigError


def _check_pi_(pi_thr: float) -> None:
    if not 0.5 < pi_thr <= 1.0:
        raise ConfigError(f"selection threshold must lie in (0.5, 1], got {pi_thr}")


def expected_false_bound(q: float, pi_thr: float, m: int) -> float:
    """
    Upper bound on the expected number of falsely selected coefficients,
    E <= q² / ((2·pi_thr - 1)·m), for an average selected count q out of m.
    """
    _check_pi_(pi_thr)
    if m < 1 or q < 0:
        raise ConfigError(f"need m >= 1 and q >= 0, got m={m}, q={q}")
    return q * q / ((2.0 * pi_thr - 1.0) * m)


def q_max(E: float, pi_thr: float, m: int) -> float:
    """
    Largest average selected count that keeps the expected false selections at or below E.

    Examples
    --------
    >>> round(q_max(17.5, 0.8, 350), 2)
    60.62
    """
    _check_pi_(pi_thr)
    if m < 1 or E < 0:
        raise ConfigError(f"need m >= 1 and E >= 0, got m={m}, E={E}")
    return float(np.sqrt(E * (2.0 * pi_thr - 1.0) * m))


def pointwise_threshold(q: float, E: float, m: int) -> float:
    """
    Selection threshold implied by a single-λ average selected count,
    pi = (q² / (E·m) + 1) / 2.
    """
    if E <= 0:
        raise ConfigError(f"error budget must be positive, got {E}")
    if m < 1:
        raise ConfigError(f"need m >= 1, got {m}")
    return 0.5 * (q * q / (E * m) + 1.0)


def per_view_q_max(budgets: Sequence[float], pi_thr: float, dims: Sequence[int]) -> List[float]:
    """
    Bounds on the average selected count, one per view, each with its own budget.
    """
    return [q_max(E, pi_thr, p) for E, p in zip(budgets, dims)]


def stacked_q_max(E_total: float, pi_thr: float, dims: Sequence[int]) -> float:
    """
    Bound on the average selected count when all views share one λ on the stacked data.
    """
    return q_max(E_total, pi_thr, int(sum(dims)))


def per_view_inflation(E_total: float, pi_thr: float, dims: Sequence[int]) -> List[float]:
    """
    Expected false selections a single view would carry if the whole stacked
    allowance of selections landed in that view alone.
    """
    q = stacked_q_max(E_total, pi_thr, dims)
    return [expected_false_bound(q, pi_thr, p) for p in dims]
