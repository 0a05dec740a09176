"""Tests for delimited-file ingestion, result documents and the command-line surface."""

import argparse

import numpy as np
import pandas as pd
import pytest
import yaml

from main import main
from src.cli.benchmark import grid_cells, replicate_seed, summarize
from src.cli.commands import EXIT_INPUT, EXIT_NUMERICAL, exit_codes
from src.cli.documents import (
    SCHEMA_VERSION,
    biclusters_from_result,
    biclusters_from_truth,
    read_document,
    result_document,
    truth_document,
    write_document,
)
from src.cli.files import load_views, read_matrix, save_views
from src.core.errors import ConfigError, InputFileError, NumericalError, SchemaVersionError
from src.core.types import Bicluster, MultiViewData
from src.issvd.model import ISSVD
from src.parameters import FitConfig
from src.synthgen.scenarios import GroundTruth, generate_scenario2
from tests.conftest import planted_views

FAST_FLAGS = ["--steps", "10", "--nbicluster", "2", "--iters", "5"]


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestReadMatrix:

    def test_comma_and_scientific(self, tmp_path):
        X, labels = read_matrix(_write(tmp_path / "a.csv", "1,2.5\n-3e-2,4E1\n"))
        np.testing.assert_array_equal(X, [[1, 2.5], [-0.03, 40]])
        assert labels is None

    def test_tab(self, tmp_path):
        X, _ = read_matrix(_write(tmp_path / "a.tsv", "1\t2\n3\t4\n"))
        np.testing.assert_array_equal(X, [[1, 2], [3, 4]])

    def test_long_row(self, tmp_path):
        with pytest.raises(InputFileError) as err:
            read_matrix(_write(tmp_path / "a.csv", "1,2\n3,4,5\n"))
        assert err.value.line == 2
        assert err.value.column == 3

    def test_short_row(self, tmp_path):
        with pytest.raises(InputFileError) as err:
            read_matrix(_write(tmp_path / "a.csv", "1,2,3\n4,5\n"))
        assert err.value.line == 2
        assert err.value.column == 3

    def test_non_numeric(self, tmp_path):
        path = _write(tmp_path / "a.csv", "h1,h2\n1,2\n3,x\n")
        with pytest.raises(InputFileError) as err:
            read_matrix(path, header=True)
        assert (err.value.line, err.value.column) == (3, 2)
        assert path in str(err.value)
        assert "'x'" in str(err.value)

    def test_empty_cell(self, tmp_path):
        with pytest.raises(InputFileError) as err:
            read_matrix(_write(tmp_path / "a.csv", "1,2\n3,\n"))
        assert (err.value.line, err.value.column) == (2, 2)

    def test_empty_file(self, tmp_path):
        with pytest.raises(InputFileError):
            read_matrix(_write(tmp_path / "a.csv", ""))


class TestLoadViews:

    def test_two_views(self, tmp_path):
        rng = np.random.default_rng(0)
        paths = []
        for name, p in (("a", 4), ("b", 6)):
            path = tmp_path / f"{name}.csv"
            pd.DataFrame(rng.standard_normal((100, p))).to_csv(path, header=False, index=False)
            paths.append(str(path))
        data = load_views(paths)
        assert data.n_views == 2
        assert data.n == 100
        assert data.view_names == ("a", "b")

    def test_row_count_mismatch(self, tmp_path):
        a = _write(tmp_path / "a.csv", "1,2\n3,4\n")
        b = _write(tmp_path / "b.csv", "1,2\n")
        with pytest.raises(InputFileError) as err:
            load_views([a, b])
        assert a in str(err.value) and b in str(err.value)

    def test_label_alignment(self, tmp_path):
        a = _write(tmp_path / "a.csv", "s1,1\ns2,2\ns3,3\n")
        b = _write(tmp_path / "b.csv", "s3,30\ns1,10\ns2,20\n")
        data = load_views([a, b], row_labels=True)
        assert data.sample_ids == ("s1", "s2", "s3")
        np.testing.assert_array_equal(data.views[1][:, 0], [10, 20, 30])

    def test_label_mismatch(self, tmp_path):
        a = _write(tmp_path / "a.csv", "s1,1\ns2,2\n")
        b = _write(tmp_path / "b.csv", "s1,1\ns9,2\n")
        with pytest.raises(InputFileError):
            load_views([a, b], row_labels=True)

    def test_round_trip_with_header_and_labels(self, tmp_path):
        rng = np.random.default_rng(1)
        data = MultiViewData(
            (rng.standard_normal((7, 3)) * 1e-7, rng.standard_normal((7, 5)) * 1e5),
            sample_ids=tuple(f"id{i}" for i in range(7)),
            view_names=("rna", "protein"),
        )
        paths = [str(tmp_path / "rna.csv"), str(tmp_path / "protein.csv")]
        save_views(data, paths, header=True, row_labels=True)
        back = load_views(paths, header=True, row_labels=True)
        for x, y in zip(data.views, back.views):
            np.testing.assert_array_equal(x, y)
        assert back.sample_ids == data.sample_ids


class TestDocuments:

    def test_result_round_trip(self, tmp_path, planted_data):
        model = ISSVD(FitConfig(n_subsamples=30, seed=3)).fit(planted_data)
        path = str(tmp_path / "result.yaml")
        write_document(result_document(model, 1.5), path)
        doc = read_document(path, "result")
        assert doc["schema_version"] == SCHEMA_VERSION
        assert doc["K_detected"] == model.K_detected
        assert doc["layers"][0]["rows"] == list(range(1, 11))
        est, unclustered = biclusters_from_result(doc, path)
        assert est == [Bicluster(model.layers[0].stable_rows, model.layers[0].stable_cols)]
        assert unclustered == 40

    def test_truth_round_trip(self, tmp_path):
        truth = GroundTruth((Bicluster({0, 4}, ({1}, {2, 3})),), 0.1, 1.0, "scenario2", {"seed": 1})
        path = str(tmp_path / "truth.yaml")
        write_document(truth_document(truth), path)
        doc = read_document(path, "truth")
        assert doc["biclusters"][0]["rows"] == [1, 5]
        assert biclusters_from_truth(doc, path) == list(truth.biclusters)

    def test_schema_mismatch(self, tmp_path):
        path = _write(tmp_path / "t.yaml", "schema_version: 99\nkind: truth\nbiclusters: []\n")
        with pytest.raises(SchemaVersionError):
            read_document(path, "truth")

    def test_wrong_kind(self, tmp_path):
        path = _write(tmp_path / "t.yaml", f"schema_version: {SCHEMA_VERSION}\nkind: metrics\n")
        with pytest.raises(InputFileError):
            read_document(path, "truth")

    def test_malformed(self, tmp_path):
        path = _write(tmp_path / "t.yaml", "a: [1, 2\nb: 3\n")
        with pytest.raises(InputFileError):
            read_document(path, "truth")


class TestExitCodes:

    def test_mapping(self):
        def raiser(error):
            @exit_codes
            def command(args):
                raise error
            return command(argparse.Namespace())

        assert raiser(NumericalError("diverged")) == EXIT_NUMERICAL
        assert raiser(ConfigError("bad")) == EXIT_INPUT
        assert raiser(FileNotFoundError(2, "missing")) == EXIT_INPUT

    def test_usage_error(self):
        assert main(["bicluster"]) == 2


class TestCommands:

    def test_bicluster_and_evaluate(self, tmp_path):
        data = planted_views()
        paths = [str(tmp_path / "v1.csv"), str(tmp_path / "v2.csv")]
        save_views(data, paths)
        result = str(tmp_path / "result.yaml")
        assert main(["bicluster", *paths, "--out", result, "--steps", "30", "--seed", "4"]) == 0

        doc = yaml.safe_load(open(result))
        assert doc["K_detected"] == 1
        assert doc["config"]["steps"] == 30
        assert doc["layers"][0]["rows"] == list(range(1, 11))
        assert doc["converged"] is True
        assert doc["wall_time_seconds"] >= 0

        truth = GroundTruth((Bicluster(range(10), (range(100), range(100))),), 0.0, 1.0, "planted")
        truth_path = str(tmp_path / "truth.yaml")
        write_document(truth_document(truth), truth_path)
        metrics = str(tmp_path / "metrics.yaml")
        assert main(["evaluate", "--result", result, "--truth", truth_path, "--out", metrics]) == 0
        report = yaml.safe_load(open(metrics))
        assert report["f_score"] == pytest.approx(1.0)
        assert report["fp"] == 0.0 and report["fn"] == 0.0
        assert report["unclustered"] == 40

    def test_same_file_name_in_two_directories(self, tmp_path):
        data = planted_views()
        (tmp_path / "a").mkdir()
        (tmp_path / "b").mkdir()
        paths = [str(tmp_path / "a" / "expr.csv"), str(tmp_path / "b" / "expr.csv")]
        save_views(data, paths)
        assert load_views(paths).view_names == ("expr", "expr_2")

        result = str(tmp_path / "result.yaml")
        assert main(["bicluster", *paths, "--out", result, "--steps", "30", "--seed", "4"]) == 0
        doc = yaml.safe_load(open(result))
        assert doc["views"] == ["expr", "expr_2"]
        assert doc["dims"] == [500, 500]
        assert len(doc["layers"][0]["cols"]) == 2

        truth = GroundTruth((Bicluster(range(10), (range(100), range(100))),), 0.0, 1.0, "planted")
        truth_path = str(tmp_path / "truth.yaml")
        write_document(truth_document(truth, ["expr", "expr_2"]), truth_path)
        assert main(["evaluate", "--result", result, "--truth", truth_path]) == 0

    def test_assign_unclustered_flag(self, tmp_path):
        data = planted_views()
        paths = [str(tmp_path / "v1.csv"), str(tmp_path / "v2.csv")]
        save_views(data, paths)
        result = str(tmp_path / "result.yaml")
        assert main(["bicluster", *paths, "--out", result, "--steps", "30", "--assign-unclustered"]) == 0
        assert "membership" in yaml.safe_load(open(result))

    def test_evaluate_rejects_schema(self, tmp_path):
        bad = _write(tmp_path / "r.yaml", "schema_version: 0\nkind: result\n")
        truth = _write(tmp_path / "t.yaml", "schema_version: 0\nkind: truth\n")
        assert main(["evaluate", "--result", bad, "--truth", truth]) == 2

    @pytest.mark.parametrize("text", ["steps: abc\n", "ssthr: [0.6, 0.8\nsteps: 10\n"])
    def test_bad_config_file(self, tmp_path, text):
        data = planted_views()
        paths = [str(tmp_path / "v1.csv"), str(tmp_path / "v2.csv")]
        save_views(data, paths)
        config = _write(tmp_path / "parameters.yaml", text)
        assert main(["bicluster", *paths, "--config", config, "--out", str(tmp_path / "r.yaml")]) == EXIT_INPUT

    def test_bad_input_file(self, tmp_path):
        bad = _write(tmp_path / "v.csv", "1,2\n3,oops\n")
        assert main(["bicluster", bad, "--out", str(tmp_path / "r.yaml")]) == 2

    def test_simulate_round_trip(self, tmp_path):
        out = tmp_path / "sim"
        assert main(["simulate", "--scenario", "scenario2", "--sigma", "0.1", "--seed", "5", "--out-dir", str(out)]) == 0
        truth = read_document(str(out / "truth.yaml"), "truth")
        assert truth["params"]["seed"] == 5

        config = FitConfig(n_subsamples=10, K_max=2, max_iters=5, seed=5)
        from_files = ISSVD(config).fit(load_views([str(out / "view1.csv"), str(out / "view2.csv")]))
        in_memory = ISSVD(config).fit(generate_scenario2(0.1, seed=5)[0])

        assert from_files.K_detected == in_memory.K_detected
        np.testing.assert_array_equal(from_files.row_membership, in_memory.row_membership)
        for a, b in zip(from_files.layers, in_memory.layers):
            np.testing.assert_array_equal(a.u, b.u)
            assert a.stable_cols == b.stable_cols


class TestBenchmark:

    def test_grid_cells(self):
        cells = grid_cells(["scenario1", "scenario2", "outlier"], [1, 2], [1.0, 10.0], [0.1, 0.2])
        assert len(cells) == 8 + 2 + 1
        assert cells[-1] == {"scenario": "outlier", "case": 0, "scalar": 1.0, "sigma": 0.1}

    def test_replicate_seed(self):
        assert replicate_seed(0, 1, 2) == replicate_seed(0, 1, 2)
        assert replicate_seed(0, 1, 2) != replicate_seed(0, 2, 1)

    def test_summarize(self):
        base = {"scenario": "scenario2", "case": 0, "scalar": 1.0, "sigma": 0.1, "fp": 0.0, "fn": 0.0,
                "unclustered": 0, "k_detected": 4, "seconds": 1.0}
        rows = [{**base, "relevance": r, "recovery": r, "f_score": r} for r in (0.9, 1.0)]
        table = summarize(rows)
        assert len(table) == 1
        assert table.loc[0, "replicates"] == 2
        assert table.loc[0, "relevance_mean"] == pytest.approx(0.95)
        assert table.loc[0, "relevance_std"] == pytest.approx(np.std([0.9, 1.0], ddof=1))
        assert "seconds_mean" not in table.columns
        assert "seconds_mean" in summarize(rows, timing=True).columns

    def test_zero_replicates(self, tmp_path):
        out = tmp_path / "bench"
        assert main(["benchmark", "--scenario", "scenario2", "--replicates", "0", "--out-dir", str(out)]) == 0
        table = pd.read_csv(out / "summary.csv")
        assert len(table) == 0
        assert list(table.columns[:5]) == ["scenario", "case", "scalar", "sigma", "replicates"]
        assert (out / "replicates.jsonl").read_bytes() == b""

    def test_identical_runs(self, tmp_path):
        outputs = []
        for run in ("a", "b"):
            out = tmp_path / run
            argv = ["benchmark", "--scenario", "scenario2", "--replicates", "1", "--workers", "1",
                    "--seed-base", "3", "--out-dir", str(out), *FAST_FLAGS]
            assert main(argv) == 0
            outputs.append(((out / "summary.csv").read_bytes(), (out / "replicates.jsonl").read_bytes()))
        assert outputs[0] == outputs[1]
        assert len(pd.read_csv(tmp_path / "a" / "summary.csv")) == 1
