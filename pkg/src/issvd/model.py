import numpy as np
from numpy.typing import NDArray
from typing import List, Optional, Tuple
from src.core.errors import DegenerateInputError
from src.core.types import BiclusterModel, MultiViewData, SparseLayer, memberships
from src.core.views import split_vector, standardize_views
from src.issvd.selection import select_num_biclusters
from src.issvd.updates import Iterate, converged, objective, sign_coherent, update_u, update_v
from src.parameters import FitConfig
from src.stability.sampling import ROLE_U, ROLE_V, ColumnSubsampleScores, RowSubsampleScores, SeedStreams
from src.stability.search import LambdaSearch, find_lambda_fullpath, find_lambda_pointwise
from src.svd.engine import deflate, leading_triplet
from src.utils.misc import datetime_now as dt_now


class ISSVD:
    """
    Integrative sparse SVD biclustering with stability selection.

    Layers are extracted one at a time from the deflated views. Each layer
    alternates a stability-selected update of the shared sample vector u with
    per-view stability-selected updates of the variable vectors v^(d).

    Attributes
    ----------
    config : FitConfig
        Fit parameters.
    streams : SeedStreams
        Seeded generators keyed by (layer, iteration, role, step).

    Methods
    -------
    fit(data: MultiViewData) -> BiclusterModel:
        Extracts up to K layers and builds the membership vectors.
    """

    def __init__(self, config: Optional[FitConfig] = None) -> None:
        self.config = config or FitConfig()
        self.config.validate()
        self.streams = SeedStreams(self.config.seed)
        self.diagnostics: List[str] = []

    def _log_(self, msg: str) -> None:
        if self.config.verbose:
            print(f"{dt_now()}: {msg}")

    def _note_(self, msg: str) -> None:
        self.diagnostics.append(msg)
        self._log_(msg)

    def _search_(self, sampler, E: float, m: int, rng) -> LambdaSearch:
        cfg = self.config
        if cfg.pointwise:
            return find_lambda_pointwise(
                sampler, E, m, cfg.pi_range, cfg.n_subsamples, cfg.subsample_fraction, rng
            )
        return find_lambda_fullpath(
            sampler, E, m, cfg.pi_range[1], cfg.grid_size, cfg.n_subsamples, cfg.subsample_fraction, rng
        )

    @staticmethod
    def _restrict_(x: NDArray, stable, mixed_signs: bool) -> NDArray:
        """Zeroes everything outside the stable set, then drops the minority sign unless `mixed_signs`."""
        keep = np.zeros(x.size, dtype=bool)
        keep[list(stable)] = True
        out = np.where(keep, x, 0.0)
        return out if mixed_signs else sign_coherent(out)

    def _extract_layer_(
        self,
        views: List[NDArray],
        v_parts: List[NDArray],
        k: int,
        row_mask: NDArray,
        col_masks: List[NDArray],
        budgets: Tuple[float, Tuple[float, ...]],
    ) -> Optional[SparseLayer]:
        """
        Alternates u and v^(d) updates on the current views until convergence.

        Returns None when a stop rule fires: the u stable set is empty, the u search
        fell short of the threshold range even at λ = 0, or every view's v stable set is empty.
        """
        cfg = self.config
        n, dims = views[0].shape[0], [x.shape[1] for x in views]
        E_u, E_v = budgets
        X = np.hstack(views)
        sq_norms = [float(np.sum(x * x)) for x in views]

        prev, prev_obj = None, None
        is_converged = False

        for it in range(cfg.max_iters):
            # u step on the stacked data, variables subsampled within each view
            search_u = self._search_(
                ColumnSubsampleScores(views, v_parts, row_mask), E_u, n, self.streams.factory(k, it, ROLE_U)
            )
            if search_u.exhausted:
                self._note_(
                    f"layer {k + 1}: sample selection stays below the threshold range even at λ=0 "
                    f"(q={search_u.q:.3g}), stopping extraction"
                )
                return None
            u = self._restrict_(update_u(X, np.concatenate(v_parts), search_u.lam), search_u.stable, cfg.rows_nc)
            if search_u.is_empty or not np.any(u):
                self._note_(f"layer {k + 1}: empty sample stable set, stopping extraction")
                return None
            u = u / np.linalg.norm(u)

            # v steps share the row subsamples: same stream for every view
            searches_v = []
            for d, x in enumerate(views):
                search_v = self._search_(
                    RowSubsampleScores(x, u, col_masks[d]), E_v[d], dims[d], self.streams.factory(k, it, ROLE_V)
                )
                v_d = self._restrict_(update_v(x, u, search_v.lam), search_v.stable, cfg.cols_nc)
                norm = np.linalg.norm(v_d)
                v_parts[d] = v_d / norm if norm > 0 else np.zeros(dims[d])
                searches_v.append(search_v)

            if not any(np.any(v) for v in v_parts):
                self._note_(f"layer {k + 1}: every view has an empty variable stable set, stopping extraction")
                return None

            curr = Iterate(u, tuple(v.copy() for v in v_parts), tuple(float(u @ (x @ v)) for x, v in zip(views, v_parts)))
            curr_obj = objective(views, curr, sq_norms)

            if prev is not None and converged(prev, curr, prev_obj, curr_obj, cfg.merr):
                is_converged = True
                break
            prev, prev_obj = curr, curr_obj

        if not is_converged:
            self._note_(f"layer {k + 1}: not converged after {cfg.max_iters} iterations")

        for d, v in enumerate(curr.v):
            if not np.any(v):
                self._note_(f"layer {k + 1}: view {d} contributes no variables")

        if not search_u.bound_met:
            self._note_(f"layer {k + 1}: sample penalty search ended outside its target (λ={search_u.lam:.6g})")
        for d, s in enumerate(searches_v):
            if not s.bound_met and np.any(curr.v[d]):
                self._note_(f"layer {k + 1}: view {d} penalty search ended outside its target (λ={s.lam:.6g})")

        self._log_(f"layer {k + 1}: {np.count_nonzero(curr.u)} samples after {it + 1} iterations")

        return SparseLayer(
            u=curr.u,
            v=curr.v,
            s=curr.s,
            stable_rows=np.flatnonzero(curr.u).tolist(),
            stable_cols=[np.flatnonzero(v).tolist() for v in curr.v],
            row_probs=search_u.probs,
            col_probs=tuple(s.probs for s in searches_v),
            lambda_u=search_u.lam,
            lambda_v=tuple(s.lam for s in searches_v),
            pi_u=search_u.pi_thr,
            pi_v=tuple(s.pi_thr for s in searches_v),
            iterations=it + 1,
            converged=is_converged,
        )

    def fit(self, data: MultiViewData) -> BiclusterModel:
        """
        Extracts sparse layers from `data` and returns the fitted model.

        Steps:
        1. Standardize the views as configured and pick K from the spectra and the user cap.
        2. For each layer, initialise from the leading triplet of the deflated stacked data.
        3. Alternate stability-selected u and v^(d) updates until converged.
        4. Record the layer, mask its samples (and variables) when overlap is disallowed,
           and deflate every view by its rank-one part.
        5. Stop early on zero deflated data, exhausted samples, or an empty stable set.

        Raises
        ------
        DegenerateInputError
            If every view is all zeros after standardization.
        """
        cfg = self.config
        self.diagnostics = []
        data = standardize_views(data, cfg.standardize)
        if not any(np.any(x) for x in data.views):
            raise DegenerateInputError("every view is all zeros, there is nothing to bicluster")
        n, dims, D = data.n, data.dims, data.n_views
        pcerv = cfg.pcerv_for(D)
        budgets = (cfg.pceru * n, tuple(r * p for r, p in zip(pcerv, dims)))

        K = select_num_biclusters(data, cfg.variance_threshold, cfg.K_max)
        self._log_(f"fitting up to {K} layers on n={n}, dims={dims}")

        views = [np.array(x, dtype=np.float64, copy=True) for x in data.views]
        row_mask = np.ones(n)
        col_masks = [np.ones(p) for p in dims]
        layers: List[SparseLayer] = []

        for k in range(K):
            if not any(np.any(x) for x in views):
                self._note_(f"layer {k + 1}: deflated data is zero, stopping extraction")
                break
            if not row_mask.any():
                self._note_(f"layer {k + 1}: every sample is already clustered, stopping extraction")
                break

            _, _, v0 = leading_triplet(np.hstack(views))
            layer = self._extract_layer_(views, split_vector(v0, dims), k, row_mask, col_masks, budgets)
            if layer is None:
                break
            layers.append(layer)

            if not cfg.row_overlap:
                row_mask[list(layer.stable_rows)] = 0.0
            if not cfg.col_overlap:
                for d, cols in enumerate(layer.stable_cols):
                    col_masks[d][list(cols)] = 0.0

            views = [deflate(x, s, layer.u, v) for x, s, v in zip(views, layer.s, layer.v)]

        rows, cols = memberships(layers, n, dims)
        return BiclusterModel(
            layers=tuple(layers),
            row_membership=rows,
            col_membership=cols,
            k_selected=K,
            diagnostics=tuple(self.diagnostics),
            config=cfg.to_settings(D),
        )


def fit(data: MultiViewData, config: Optional[FitConfig] = None) -> BiclusterModel:
    """Convenience wrapper around `ISSVD(config).fit(data)`."""
    return ISSVD(config).fit(data)
