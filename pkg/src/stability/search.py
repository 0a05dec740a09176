import numpy as np
from dataclasses import dataclass
from numpy.typing import NDArray
from typing import FrozenSet, Tuple
from src.core.errors import ConfigError
from src.stability.bounds import pointwise_threshold, q_max
from src.stability.path import selection_probabilities, stable_set
from src.stability.sampling import RngSource, ScoreSampler, rng_for_step
from src.utils.jit_funcs import nbclip, nbselection_counts

MAX_BISECTION_STEPS = 50


@dataclass(frozen=True, eq=False)
class LambdaSearch:
    """
    Outcome of a stability-based penalty search.

    Attributes
    ----------
    lam : float
        The selected penalty λ_min.
    pi_thr : float
        Selection threshold the stable set was cut at.
    stable : FrozenSet[int]
        Indices of the stable coefficients.
    probs : NDArray
        Selection probabilities at `lam`, shape (m,).
    q : float
        Average selected count at `lam`.
    steps : int
        Probability estimates evaluated.
    bound_met : bool
        False when the search ran out (bisection cap, or no grid point met the bound).
    pi : float
        Threshold implied by `q` before clipping into range.
    """

    lam: float
    pi_thr: float
    stable: FrozenSet[int]
    probs: NDArray
    q: float
    steps: int
    bound_met: bool
    pi: float = 0.5

    @property
    def is_empty(self) -> bool:
        return len(self.stable) == 0

    @property
    def exhausted(self) -> bool:
        """True when even the zero penalty selected too little to reach the threshold range."""
        return not self.bound_met and self.lam == 0.0 and self.q > 0 and self.pi < self.pi_thr


def _empty_search_(m: int, pi_thr: float) -> LambdaSearch:
    return LambdaSearch(0.0, pi_thr, frozenset(), np.zeros(m), 0.0, 0, False)


def penalty_levels(full_scores: NDArray) -> NDArray:
    """
    Distinct values of λ/2 at which the full-data support changes, largest first and ending at 0.
    """
    return np.unique(np.append(np.abs(full_scores), 0.0))[::-1]


def find_lambda_pointwise(
    sampler: ScoreSampler,
    E: float,
    m: int,
    pi_range: Tuple[float, float],
    n_subsamples: int,
    subsample_fraction: float,
    rng: RngSource,
    max_steps: int = MAX_BISECTION_STEPS,
) -> LambdaSearch:
    """
    Bisection for a single λ whose implied selection threshold lands in `pi_range`.

    The candidate penalties are the breakpoints of the full-data soft threshold,
    2·|score| for every distinct score magnitude plus 0, so they span
    [0, 2·max|full-data score|] and two candidates never give the same full-data support.

    Steps:
    1. Take the median candidate of the current bracket.
    2. Draw `n_subsamples` fresh subsamples and estimate q at that λ.
    3. Turn q into a threshold with `pointwise_threshold`; too high means too many
       selections, so the bracket moves to larger λ, too low moves it to smaller λ.
    4. Stop once the threshold is inside the range. If the bracket empties or `max_steps`
       is reached first, keep the step closest to the range (smaller λ on ties) and clip
       its threshold into range.

    Returns
    -------
    LambdaSearch
        An empty stable set (not an error) when every full-data score is zero.
    """
    pi_min, pi_max = pi_range
    if not 0.5 < pi_min <= pi_max <= 1.0:
        raise ConfigError(f"pi_range must satisfy 0.5 < min <= max <= 1, got {pi_range}")

    full = sampler.full_scores() if m else np.zeros(0)
    if not np.any(full):
        return _empty_search_(m, pi_min)

    levels = penalty_levels(full)
    lo, hi = 0, levels.size - 1
    best = None
    step = 0

    while lo <= hi and step < max_steps:
        mid = (lo + hi) // 2
        scores = np.ascontiguousarray(sampler.draw(rng_for_step(rng, step), n_subsamples, subsample_fraction))
        step += 1

        probs = nbselection_counts(scores, np.array([levels[mid]]))[0] / n_subsamples
        q = float(probs.sum())
        pi = pointwise_threshold(q, E, m)
        miss = max(pi_min - pi, 0.0, pi - pi_max)
        lam = 2.0 * float(levels[mid])

        if best is None or (miss, lam) < (best[0], best[1]):
            best = (miss, lam, pi, probs, q)

        if miss == 0.0:
            break
        # levels run from large to small λ
        if pi > pi_max:
            hi = mid - 1
        else:
            lo = mid + 1

    miss, lam, pi, probs, q = best
    pi_thr = nbclip(pi, pi_min, pi_max)
    stable = frozenset(np.flatnonzero((probs >= pi_thr) & (probs > 0)).tolist())
    return LambdaSearch(lam, pi_thr, stable, probs, q, step, miss == 0.0, pi)


def find_lambda_fullpath(
    sampler: ScoreSampler,
    E: float,
    m: int,
    pi_thr: float,
    grid_size: int,
    n_subsamples: int,
    subsample_fraction: float,
    rng: RngSource,
) -> LambdaSearch:
    """
    Full stability path on a uniform grid over [0, 2·max|full-data score|].

    The region starting at grid point g has average selected count Σᵢ Π̂ᵢ(λ_g),
    since soft-threshold supports are nested in λ. The smallest λ whose region
    keeps that count within `q_max(E, pi_thr, m)` is returned; if no grid point
    qualifies, the largest λ is returned with `bound_met` False.
    """
    if grid_size < 2:
        raise ConfigError(f"grid_size must be at least 2, got {grid_size}")

    top = float(np.max(np.abs(sampler.full_scores()))) if m else 0.0
    if top == 0.0:
        return _empty_search_(m, pi_thr)

    grid = np.linspace(0.0, 2.0 * top, grid_size)
    scores = sampler.draw(rng_for_step(rng, 0), n_subsamples, subsample_fraction)
    path = selection_probabilities(scores, grid)

    bound = q_max(E, pi_thr, m)
    ok = np.flatnonzero(path.selected_counts <= bound)
    g = int(ok[0]) if ok.size else grid_size - 1
    lam = float(grid[g])

    return LambdaSearch(
        lam=lam,
        pi_thr=pi_thr,
        stable=stable_set(path, lam, pi_thr),
        probs=path.probs[g].copy(),
        q=float(path.selected_counts[g]),
        steps=1,
        bound_met=bool(ok.size),
        pi=pointwise_threshold(float(path.selected_counts[g]), E, m) if E > 0 else 1.0,
    )
