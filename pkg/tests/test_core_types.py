"""Tests for the multi-view containers, view helpers and fit configuration."""

import numpy as np
import pytest

from src.core.errors import ConfigError, DimensionError, NonFiniteError
from src.core.types import Bicluster, BiclusterModel, MultiViewData, SparseLayer, memberships
from src.core.views import concat_views, split_vector, standardize_views, view_offsets
from src.parameters import FitConfig


class TestMultiViewData:

    def test_shapes(self):
        data = MultiViewData((np.ones((4, 2)), np.ones((4, 3))))
        assert data.n == 4
        assert data.dims == (2, 3)
        assert data.n_views == 2

    def test_views_are_read_only_copies(self):
        x = np.ones((3, 2))
        data = MultiViewData((x,))
        x[0, 0] = 5.0
        assert data.views[0][0, 0] == 1.0
        with pytest.raises(ValueError):
            data.views[0][0, 0] = 2.0

    def test_views_are_c_ordered(self):
        x = np.asfortranarray(np.arange(12.0).reshape(4, 3))
        view = MultiViewData((x,)).views[0]
        assert view.flags["C_CONTIGUOUS"]
        np.testing.assert_array_equal(view, x)

    def test_rejects_non_finite(self):
        x = np.ones((3, 2))
        x[1, 1] = np.nan
        with pytest.raises(NonFiniteError):
            MultiViewData((x,))
        x[1, 1] = np.inf
        with pytest.raises(NonFiniteError):
            MultiViewData((x,))

    def test_rejects_row_mismatch(self):
        with pytest.raises(DimensionError):
            MultiViewData((np.ones((3, 2)), np.ones((4, 2))))

    def test_rejects_empty_view(self):
        with pytest.raises(DimensionError):
            MultiViewData((np.ones((3, 2)), np.ones((3, 0))))
        with pytest.raises(DimensionError):
            MultiViewData(())

    def test_sample_id_length(self):
        with pytest.raises(DimensionError):
            MultiViewData((np.ones((3, 2)),), sample_ids=("a", "b"))


class TestConcatSplit:

    def test_two_views(self):
        data = MultiViewData((np.array([[1.0], [2.0]]), np.array([[3.0], [4.0]])))
        np.testing.assert_array_equal(concat_views(data), [[1, 3], [2, 4]])

    def test_single_view_identity(self):
        x = np.arange(6.0).reshape(3, 2)
        np.testing.assert_array_equal(concat_views(MultiViewData((x,))), x)

    def test_three_views_index_arithmetic(self):
        rng = np.random.default_rng(0)
        views = [rng.standard_normal((4, p)) for p in (2, 3, 1)]
        X = concat_views(MultiViewData(tuple(views)))
        assert X.shape == (4, 6)
        assert X[0, 5] == views[2][0, 0]
        np.testing.assert_array_equal(view_offsets([2, 3, 1]), [0, 2, 5, 6])

    def test_split(self):
        a, b = split_vector(np.array([1.0, 2.0, 3.0]), (2, 1))
        np.testing.assert_array_equal(a, [1, 2])
        np.testing.assert_array_equal(b, [3])

    def test_split_empty_piece(self):
        a, b = split_vector(np.array([1.0, 2.0, 3.0]), (0, 3))
        assert a.size == 0
        np.testing.assert_array_equal(b, [1, 2, 3])

    def test_round_trip(self):
        rng = np.random.default_rng(3)
        for D in (1, 2, 4):
            dims = tuple(int(p) for p in rng.integers(1, 9, size=D))
            v = rng.standard_normal(sum(dims))
            np.testing.assert_array_equal(np.concatenate(split_vector(v, dims)), v)

    def test_split_length_mismatch(self):
        with pytest.raises(DimensionError):
            split_vector(np.ones(4), (2, 1))


class TestStandardize:

    def setup_method(self):
        rng = np.random.default_rng(11)
        self.data = MultiViewData((rng.normal(3.0, 2.0, (20, 5)), rng.normal(-1.0, 4.0, (20, 3))))

    def test_none_is_identity(self):
        assert standardize_views(self.data, "none") is self.data

    def test_center_scale(self):
        out = standardize_views(self.data, "center_scale")
        for x in out.views:
            np.testing.assert_allclose(x.mean(axis=0), 0.0, atol=1e-12)
            np.testing.assert_allclose(x.std(axis=0, ddof=1), 1.0, atol=1e-12)

    def test_center(self):
        out = standardize_views(self.data, "center")
        for x, y in zip(self.data.views, out.views):
            np.testing.assert_allclose(y.mean(axis=0), 0.0, atol=1e-12)
            np.testing.assert_allclose(y.std(axis=0), x.std(axis=0), rtol=1e-12)

    def test_frobenius(self):
        out = standardize_views(self.data, "frobenius")
        for x in out.views:
            assert np.linalg.norm(x) == pytest.approx(1.0, abs=1e-12)

    def test_unknown(self):
        with pytest.raises(ConfigError):
            standardize_views(self.data, "zscore")


class TestSparseLayer:

    def _layer(self, **changes):
        u = np.zeros(4)
        u[:2] = np.sqrt(0.5)
        v = np.zeros(3)
        v[0] = 1.0
        fields = dict(u=u, v=(v,), s=(2.0,), stable_rows={0, 1}, stable_cols=({0},))
        fields.update(changes)
        return SparseLayer(**fields)

    def test_valid(self):
        layer = self._layer()
        assert layer.stable_rows == frozenset({0, 1})
        assert not layer.is_degenerate

    def test_support_outside_stable_set(self):
        with pytest.raises(DimensionError):
            self._layer(stable_rows={0})

    def test_unit_norm(self):
        with pytest.raises(DimensionError):
            self._layer(u=np.array([1.0, 1.0, 0.0, 0.0]))


class TestMemberships:

    def _layer(self, rows, cols, n=6, p=5):
        u = np.zeros(n)
        u[list(rows)] = 1.0 / np.sqrt(len(rows))
        v = np.zeros(p)
        v[list(cols)] = 1.0 / np.sqrt(len(cols))
        return SparseLayer(u=u, v=(v,), s=(1.0,), stable_rows=rows, stable_cols=(cols,))

    def test_earliest_layer_wins(self):
        layers = [self._layer({0, 1}, {0}), self._layer({1, 2}, {0, 1})]
        rows, cols = memberships(layers, 6, (5,))
        np.testing.assert_array_equal(rows, [1, 1, 2, 0, 0, 0])
        np.testing.assert_array_equal(cols[0], [1, 2, 0, 0, 0])

    def test_model_checks_membership(self):
        layers = (self._layer({0, 1}, {0}),)
        with pytest.raises(DimensionError):
            BiclusterModel(layers, np.array([1, 0, 1, 0, 0, 0]), (np.zeros(5),))
        with pytest.raises(DimensionError):
            BiclusterModel(layers, np.array([2, 0, 0, 0, 0, 0]), (np.zeros(5),))

    def test_assigned_rows_are_exempt(self):
        layers = (self._layer({0, 1}, {0}),)
        model = BiclusterModel(
            layers, np.array([1, 1, 1, 0, 0, 0]), (np.zeros(5),), assigned=np.array([0, 0, 1, 0, 0, 0], dtype=bool)
        )
        assert model.K_detected == 1
        assert model.dims == (5,)


class TestBicluster:

    def test_size_and_check(self):
        b = Bicluster(rows={0, 1}, cols=({0, 1}, {2}))
        assert b.size == 6
        b.check(3, (2, 3))
        with pytest.raises(DimensionError):
            b.check(3, (2, 2))
        with pytest.raises(DimensionError):
            b.check(3, (2,))


class TestFitConfig:

    def test_defaults(self):
        cfg = FitConfig()
        assert cfg.n_subsamples == 100
        assert cfg.pi_range == (0.6, 0.8)
        assert cfg.pcerv_for(3) == (0.1, 0.1, 0.1)

    def test_yaml_names(self, tmp_path):
        path = tmp_path / "parameters.yaml"
        path.write_text("standr: False\nnbicluster: 3\nssthr: [0.65, 0.9]\nsteps: 40\npcerv: 0.05\n")
        cfg = FitConfig.from_yaml(str(path))
        assert cfg.standardize == "none"
        assert cfg.K_max == 3
        assert cfg.pi_range == (0.65, 0.9)
        assert cfg.n_subsamples == 40
        assert cfg.pcerv_for(2) == (0.05, 0.05)

    def test_standr_true(self):
        assert FitConfig.from_settings({"standr": True}).standardize == "center_scale"

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            FitConfig.from_settings({"lambda": 1.0})

    @pytest.mark.parametrize("settings", [
        {"ssthr": [0.4, 0.8]},
        {"ssthr": [0.8, 0.6]},
        {"size": 1.0},
        {"steps": 0},
        {"pceru": -0.1},
        {"standr": "log"},
        {"steps": "abc"},
        {"pceru": "often"},
        {"pcerv": {"a": 1}},
    ])
    def test_invalid(self, settings):
        with pytest.raises(ConfigError):
            FitConfig.from_settings(settings)

    def test_yaml_value_not_a_number(self, tmp_path):
        path = tmp_path / "parameters.yaml"
        path.write_text("steps: abc\n")
        with pytest.raises(ConfigError, match="steps"):
            FitConfig.from_yaml(str(path))

    def test_malformed_yaml(self, tmp_path):
        path = tmp_path / "parameters.yaml"
        path.write_text("ssthr: [0.6, 0.8\nsteps: 10\n")
        with pytest.raises(ConfigError, match="malformed"):
            FitConfig.from_yaml(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            FitConfig.from_yaml(str(tmp_path / "absent.yaml"))

    def test_pcerv_length(self):
        with pytest.raises(ConfigError):
            FitConfig(pcerv=(0.1, 0.1)).pcerv_for(3)

    def test_updated_and_echo(self):
        cfg = FitConfig().updated({"seed": 9, "rows_nc": False})
        echo = cfg.to_settings(2)
        assert echo["seed"] == 9
        assert echo["rows_nc"] is False
        assert echo["pcerv"] == [0.1, 0.1]
        assert FitConfig.from_settings(echo) == cfg.updated({"pcerv": [0.1, 0.1]})
