import numpy as np
from dataclasses import dataclass, field
from numpy.typing import NDArray
from typing import Dict, List, Tuple
from src.core.errors import ConfigError
from src.core.types import Bicluster, MultiViewData

SIGNAL_SCALES = (27.0, 20.0, 18.0, 10.0)
NOISE_SCALE = 0.3

# case -> (n, p per view, rows per bicluster, columns per bicluster)
SCENARIO1_SHAPES = {
    1: (100, 1000, 10, 100),
    2: (100, 1000, 10, 100),
    3: (500, 10000, 50, 200),
}


@dataclass(frozen=True)
class GroundTruth:
    """
    Planted biclusters of a generated dataset and the parameters that produced it.
    """

    biclusters: Tuple[Bicluster, ...]
    noise_sigma: float
    scalar: float
    scenario: str
    params: Dict = field(default_factory=dict, compare=False)

    @property
    def K(self) -> int:
        return len(self.biclusters)


def _disjoint_blocks_(rng: np.random.Generator, dim: int, k: int, size: int) -> List[NDArray]:
    picks = rng.permutation(dim)[: k * size]
    return [np.sort(picks[i * size:(i + 1) * size]) for i in range(k)]


def _planted_factor_(rng: np.random.Generator, blocks: List[NDArray], dim: int) -> NDArray:
    """dim x len(blocks) matrix, U(0.5, 1) on each column's block and zero elsewhere."""
    F = np.zeros((dim, len(blocks)))
    for k, idx in enumerate(blocks):
        F[idx, k] = rng.uniform(0.5, 1.0, size=idx.size)
    return F


def generate_scenario1(case: int, scalar: float, sigma: float, seed: int) -> Tuple[MultiViewData, GroundTruth]:
    """
    Two views X^(d) = U·S·V^(d)ᵀ + E^(d), returned as [X^(1), scalar·X^(2)].

    Steps:
    1. U is n x n: its first four columns carry disjoint U(0.5, 1) row blocks (zero elsewhere),
       the remaining columns are N(0, 1).
    2. Each V^(d) is p x n: first four columns carry disjoint U(0.5, 1) variable blocks
       (zero elsewhere), the remaining columns are N(0, 1).
    3. S = diag(27, 20, 18, 10, 0.3, ..., 0.3) and E^(d) has N(0, σ²) entries.
    4. The second view is scaled after its noise is added.

    Cases 1 and 2 use n = 100, p = 1000 and 10 x 100 biclusters; case 3 uses
    n = 500, p = 10000 and 50 x 200 biclusters.
    """
    if case not in SCENARIO1_SHAPES:
        raise ConfigError(f"scenario 1 case must be one of {sorted(SCENARIO1_SHAPES)}, got {case}")
    if sigma < 0:
        raise ConfigError(f"noise sigma must be non-negative, got {sigma}")

    n, p, n_rows, n_cols = SCENARIO1_SHAPES[case]
    k = len(SIGNAL_SCALES)
    rng = np.random.default_rng(seed)

    row_blocks = _disjoint_blocks_(rng, n, k, n_rows)
    U = np.hstack([_planted_factor_(rng, row_blocks, n), rng.standard_normal((n, n - k))])
    S = np.concatenate([SIGNAL_SCALES, np.full(n - k, NOISE_SCALE)])

    views, col_blocks = [], []
    for _ in range(2):
        blocks = _disjoint_blocks_(rng, p, k, n_cols)
        V = np.hstack([_planted_factor_(rng, blocks, p), rng.standard_normal((p, n - k))])
        views.append((U * S) @ V.T + sigma * rng.standard_normal((n, p)))
        col_blocks.append(blocks)

    views[1] = scalar * views[1]

    truth = GroundTruth(
        biclusters=tuple(
            Bicluster(rows=row_blocks[j].tolist(), cols=(col_blocks[0][j].tolist(), col_blocks[1][j].tolist()))
            for j in range(k)
        ),
        noise_sigma=float(sigma),
        scalar=float(scalar),
        scenario="scenario1",
        params={"case": int(case), "scalar": float(scalar), "sigma": float(sigma), "seed": int(seed), "n": n, "dims": [p, p]},
    )
    return MultiViewData(tuple(views)), truth


def generate_scenario2(sigma: float, seed: int) -> Tuple[MultiViewData, GroundTruth]:
    """
    Every sample in one of four biclusters: n = 200, p = (1000, 1000),
    50 samples and 100 variables per view in each bicluster,
    X^(d) = U·diag(27, 20, 18, 10)·V^(d)ᵀ + E^(d).
    """
    if sigma < 0:
        raise ConfigError(f"noise sigma must be non-negative, got {sigma}")

    n, p, n_rows, n_cols = 200, 1000, 50, 100
    k = len(SIGNAL_SCALES)
    rng = np.random.default_rng(seed)

    row_blocks = _disjoint_blocks_(rng, n, k, n_rows)
    US = _planted_factor_(rng, row_blocks, n) * np.asarray(SIGNAL_SCALES)

    views, col_blocks = [], []
    for _ in range(2):
        blocks = _disjoint_blocks_(rng, p, k, n_cols)
        views.append(US @ _planted_factor_(rng, blocks, p).T + sigma * rng.standard_normal((n, p)))
        col_blocks.append(blocks)

    truth = GroundTruth(
        biclusters=tuple(
            Bicluster(rows=row_blocks[j].tolist(), cols=(col_blocks[0][j].tolist(), col_blocks[1][j].tolist()))
            for j in range(k)
        ),
        noise_sigma=float(sigma),
        scalar=1.0,
        scenario="scenario2",
        params={"sigma": float(sigma), "seed": int(seed), "n": n, "dims": [p, p]},
    )
    return MultiViewData(tuple(views)), truth


def outlier_signal(rng: np.random.Generator) -> NDArray:
    """
    Noiseless 200 x 1000 block-diagonal view with four 50 x 250 integer blocks,
    including the low-valued rows of block 1 and the two constant rows of block 4.
    """
    X = np.zeros((200, 1000))
    X[0:5, 0:250] = rng.integers(0, 1, size=(5, 250), endpoint=True)
    X[5:50, 0:250] = rng.integers(1, 2, size=(45, 250), endpoint=True)
    X[50:100, 250:500] = rng.integers(1, 3, size=(50, 250), endpoint=True)
    X[100:150, 500:750] = rng.integers(2, 3, size=(50, 250), endpoint=True)
    X[150:198, 750:1000] = rng.integers(0, 2, size=(48, 250), endpoint=True)
    X[198, 750:1000] = 1.1
    X[199, 750:1000] = 1.2
    return X


def generate_outlier_scenario(seed: int) -> Tuple[MultiViewData, GroundTruth]:
    """
    Block-diagonal integer biclusters with potential outlier samples; view 1 noise
    has standard deviation 0.1 and view 2 noise 0.15.
    """
    rng = np.random.default_rng(seed)
    views = []
    for sd in (0.1, 0.15):
        views.append(outlier_signal(rng) + sd * rng.standard_normal((200, 1000)))

    truth = GroundTruth(
        biclusters=tuple(
            Bicluster(rows=range(50 * j, 50 * (j + 1)), cols=(range(250 * j, 250 * (j + 1)),) * 2)
            for j in range(4)
        ),
        noise_sigma=0.1,
        scalar=1.0,
        scenario="outlier",
        params={"seed": int(seed), "n": 200, "dims": [1000, 1000], "sigma": [0.1, 0.15]},
    )
    return MultiViewData(tuple(views)), truth


SCENARIOS = ("scenario1", "scenario2", "outlier")


def generate(scenario: str, case: int = 1, scalar: float = 1.0, sigma: float = 0.1, seed: int = 0) -> Tuple[MultiViewData, GroundTruth]:
    """
    Dispatches to a generator by name; arguments a scenario does not use are ignored.
    """
    if scenario == "scenario1":
        return generate_scenario1(case, scalar, sigma, seed)
    if scenario == "scenario2":
        return generate_scenario2(sigma, seed)
    if scenario == "outlier":
        return generate_outlier_scenario(seed)
    raise ConfigError(f"unknown scenario '{scenario}', expected one of {SCENARIOS}")
