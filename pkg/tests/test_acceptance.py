"""Monte Carlo acceptance runs at benchmark scale; run with `pytest -m slow`."""

import time

import numpy as np
import pandas as pd
import pytest
from scipy.special import comb

from main import main
from src.core.types import MultiViewData
from src.issvd.assign import assign_unclustered
from src.issvd.model import ISSVD
from src.metrics.scores import evaluate
from src.parameters import FitConfig
from src.synthgen.scenarios import generate_outlier_scenario, generate_scenario1, generate_scenario2

pytestmark = pytest.mark.slow


def adjusted_rand_index(a, b):
    """ARI from the contingency table of two labelings."""
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)
    pairs = comb(table, 2).sum()
    rows = comb(table.sum(axis=1), 2).sum()
    cols = comb(table.sum(axis=0), 2).sum()
    expected = rows * cols / comb(len(a), 2)
    top = 0.5 * (rows + cols)
    return float((pairs - expected) / (top - expected)) if top != expected else 1.0


def _truth_labels(truth, n):
    labels = np.zeros(n, dtype=np.int64)
    for k, b in enumerate(truth.biclusters, start=1):
        labels[list(b.rows)] = k
    return labels


class TestAdjustedRandIndex:

    def test_identical_and_relabelled(self):
        a = np.array([0, 0, 1, 1, 2, 2])
        assert adjusted_rand_index(a, a) == pytest.approx(1.0)
        assert adjusted_rand_index(a, (a + 1) % 3) == pytest.approx(1.0)


class TestScenario2:

    @pytest.fixture(scope="class")
    def fits(self):
        out = []
        for seed in range(10):
            data, truth = generate_scenario2(0.1, seed)
            out.append((ISSVD(FitConfig(seed=seed)).fit(data), truth))
        return out

    def test_recovery_over_seeds(self, fits):
        reports = [evaluate(model, truth.biclusters) for model, truth in fits]
        assert np.mean([r.relevance for r in reports]) >= 0.90
        assert np.mean([r.recovery for r in reports]) >= 0.90

    def test_four_layers_no_unclustered(self, fits):
        four = sum(model.K_detected == 4 for model, _ in fits)
        complete = sum(evaluate(model, truth.biclusters).unclustered_count == 0 for model, truth in fits)
        assert four >= 9
        assert complete >= 9

    def test_assignment_improves_agreement(self):
        improved = 0
        for seed in range(10):
            data, truth = generate_scenario2(0.3, seed)
            model = ISSVD(FitConfig(seed=seed)).fit(data)
            # leave some clustered samples out so there is something to place
            rows = model.row_membership.copy()
            clustered = np.flatnonzero(rows > 0)
            drop = np.random.default_rng(seed).choice(clustered, size=min(20, clustered.size), replace=False)
            rows[drop] = 0
            model = model.replace(row_membership=rows)

            labels = _truth_labels(truth, data.n)
            before = adjusted_rand_index(labels, model.row_membership)
            assigned = assign_unclustered(model, data)
            assert np.all(assigned.row_membership != 0) or not assigned.layers
            improved += adjusted_rand_index(labels, assigned.row_membership) > before
        assert improved >= 8


class TestScenario1:

    @pytest.mark.parametrize("scalar", [1.0, 10.0])
    def test_scaled_view_recovery(self, scalar):
        reports = []
        for seed in range(10):
            data, truth = generate_scenario1(1, scalar, 0.2, seed)
            reports.append(evaluate(ISSVD(FitConfig(seed=seed)).fit(data), truth.biclusters))
        assert np.mean([r.recovery for r in reports]) >= 0.84
        assert np.mean([r.relevance for r in reports]) >= 0.66

    def test_largest_case_runtime(self):
        data, _ = generate_scenario1(3, 1.0, 0.1, seed=0)
        start = time.perf_counter()
        model = ISSVD(FitConfig(seed=0)).fit(data)
        assert time.perf_counter() - start < 600.0
        assert model.K_detected >= 1


class TestOutlier:

    def test_recovery_over_seeds(self):
        reports = []
        for seed in range(5):
            data, truth = generate_outlier_scenario(seed)
            reports.append(evaluate(ISSVD(FitConfig(seed=seed)).fit(data), truth.biclusters))
        assert np.mean([r.relevance for r in reports]) >= 0.95
        assert np.mean([r.recovery for r in reports]) >= 0.95


class TestErrorControl:

    def test_pure_noise_selects_few_rows(self):
        counts = []
        for seed in range(100):
            rng = np.random.default_rng(seed)
            data = MultiViewData((rng.standard_normal((100, 500)), rng.standard_normal((100, 500))))
            model = ISSVD(FitConfig(K_max=1, pceru=0.05, seed=seed)).fit(data)
            counts.append(len(model.layers[0].stable_rows) if model.layers else 0)
        assert np.mean(counts) <= 7.5


class TestBenchmarkRow:

    def test_single_replicate(self, tmp_path):
        out = tmp_path / "bench"
        argv = ["benchmark", "--scenario", "scenario2", "--sigma", "0.1", "--replicates", "1", "--workers", "1",
                "--out-dir", str(out)]
        assert main(argv) == 0
        table = pd.read_csv(out / "summary.csv")
        assert len(table) == 1
        assert table.loc[0, "recovery_mean"] == pytest.approx(0.93, abs=0.05)
