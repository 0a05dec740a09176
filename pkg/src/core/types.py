import numpy as np
from dataclasses import dataclass, field, replace
from numpy.typing import NDArray
from typing import FrozenSet, Optional, Sequence, Tuple
from src.core.errors import DimensionError, NonFiniteError

UNIT_NORM_TOL = 1e-8


def _frozen_array(arr, name: str, ndim: int) -> NDArray:
    out = np.array(arr, dtype=np.float64, order="C", copy=True)
    if out.ndim != ndim:
        raise DimensionError(f"{name} must be {ndim}-dimensional, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        bad = np.argwhere(~np.isfinite(out))[0]
        raise NonFiniteError(f"{name} has a non-finite entry at index {tuple(int(i) for i in bad)}")
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class MultiViewData:
    """
    D sample-aligned matrices sharing their n rows.

    Attributes
    ----------
    views : Tuple[NDArray, ...]
        Read-only float64 matrices, view d has shape (n, p^(d)).
    sample_ids : Optional[Tuple[str, ...]]
        Optional row labels, length n.
    view_names : Optional[Tuple[str, ...]]
        Optional view labels, length D.
    """

    views: Tuple[NDArray, ...]
    sample_ids: Optional[Tuple[str, ...]] = None
    view_names: Optional[Tuple[str, ...]] = None

    def __post_init__(self) -> None:
        if len(self.views) == 0:
            raise DimensionError("at least one view is required")

        views = tuple(_frozen_array(x, f"view {d}", 2) for d, x in enumerate(self.views))
        n = views[0].shape[0]

        for d, x in enumerate(views):
            if x.shape[0] != n:
                raise DimensionError(f"view {d} has {x.shape[0]} rows, expected {n}")
            if x.shape[1] == 0:
                raise DimensionError(f"view {d} has no columns")

        if n == 0:
            raise DimensionError("views have no rows")

        object.__setattr__(self, "views", views)

        if self.sample_ids is not None:
            ids = tuple(str(s) for s in self.sample_ids)
            if len(ids) != n:
                raise DimensionError(f"{len(ids)} sample ids for {n} rows")
            object.__setattr__(self, "sample_ids", ids)

        if self.view_names is not None:
            names = tuple(str(s) for s in self.view_names)
            if len(names) != len(views):
                raise DimensionError(f"{len(names)} view names for {len(views)} views")
            object.__setattr__(self, "view_names", names)

    @property
    def n(self) -> int:
        return self.views[0].shape[0]

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(x.shape[1] for x in self.views)

    @property
    def n_views(self) -> int:
        return len(self.views)

    def with_views(self, views: Sequence[NDArray]) -> "MultiViewData":
        return MultiViewData(tuple(views), self.sample_ids, self.view_names)


@dataclass(frozen=True, eq=False)
class SparseLayer:
    """
    One rank-one bicluster layer: shared left vector, per-view right vectors
    and scales, and the stable index sets that define the bicluster.

    Besides the vectors, a layer keeps what the stability search produced on
    its final alternation: selection probabilities, penalties and thresholds.
    """

    u: NDArray
    v: Tuple[NDArray, ...]
    s: Tuple[float, ...]
    stable_rows: FrozenSet[int]
    stable_cols: Tuple[FrozenSet[int], ...]
    row_probs: Optional[NDArray] = None
    col_probs: Optional[Tuple[NDArray, ...]] = None
    lambda_u: float = 0.0
    lambda_v: Tuple[float, ...] = ()
    pi_u: float = 0.0
    pi_v: Tuple[float, ...] = ()
    iterations: int = 0
    converged: bool = True

    def __post_init__(self) -> None:
        u = _frozen_array(self.u, "u", 1)
        v = tuple(_frozen_array(vd, f"v[{d}]", 1) for d, vd in enumerate(self.v))
        if len(self.s) != len(v) or len(self.stable_cols) != len(v):
            raise DimensionError("s, v and stable_cols must have one entry per view")

        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "s", tuple(float(x) for x in self.s))
        object.__setattr__(self, "stable_rows", frozenset(int(i) for i in self.stable_rows))
        object.__setattr__(self, "stable_cols", tuple(frozenset(int(j) for j in c) for c in self.stable_cols))

        if not set(np.flatnonzero(u).tolist()) <= self.stable_rows:
            raise DimensionError("support of u is not contained in stable_rows")
        for d, vd in enumerate(v):
            if not set(np.flatnonzero(vd).tolist()) <= self.stable_cols[d]:
                raise DimensionError(f"support of v[{d}] is not contained in stable_cols[{d}]")

        if not self.is_degenerate:
            if abs(np.linalg.norm(u) - 1.0) > UNIT_NORM_TOL:
                raise DimensionError("u is not unit norm")
            for d, vd in enumerate(v):
                if np.any(vd) and abs(np.linalg.norm(vd) - 1.0) > UNIT_NORM_TOL:
                    raise DimensionError(f"v[{d}] is not unit norm")

    @property
    def is_degenerate(self) -> bool:
        return not np.any(self.u) or not any(np.any(vd) for vd in self.v)

    @property
    def n_views(self) -> int:
        return len(self.v)


@dataclass(frozen=True)
class Bicluster:
    """
    A row set shared by all views and one (possibly empty) column set per view.
    """

    rows: FrozenSet[int]
    cols: Tuple[FrozenSet[int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", frozenset(int(i) for i in self.rows))
        object.__setattr__(self, "cols", tuple(frozenset(int(j) for j in c) for c in self.cols))

    def check(self, n: int, dims: Sequence[int]) -> None:
        if len(self.cols) != len(dims):
            raise DimensionError(f"bicluster has {len(self.cols)} column sets for {len(dims)} views")
        if self.rows and (min(self.rows) < 0 or max(self.rows) >= n):
            raise DimensionError(f"bicluster rows fall outside 0..{n - 1}")
        for d, (c, p) in enumerate(zip(self.cols, dims)):
            if c and (min(c) < 0 or max(c) >= p):
                raise DimensionError(f"bicluster columns of view {d} fall outside 0..{p - 1}")

    @property
    def size(self) -> int:
        return len(self.rows) * sum(len(c) for c in self.cols)


@dataclass(frozen=True, eq=False)
class BiclusterModel:
    """
    Ordered layers plus sample and per-view variable memberships.

    Membership value k > 0 refers to `layers[k - 1]`; 0 means unclustered.
    Rows set by unclustered-sample assignment are flagged in `assigned`, and
    only the remaining memberships are tied to the layers' stable rows.
    """

    layers: Tuple[SparseLayer, ...]
    row_membership: NDArray
    col_membership: Tuple[NDArray, ...]
    k_selected: int = 0
    assigned: Optional[NDArray] = None
    diagnostics: Tuple[str, ...] = ()
    config: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        rows = np.array(self.row_membership, dtype=np.int64, copy=True)
        cols = tuple(np.array(c, dtype=np.int64, copy=True) for c in self.col_membership)
        k = len(self.layers)

        for arr, name in [(rows, "row_membership")] + [(c, f"col_membership[{d}]") for d, c in enumerate(cols)]:
            if arr.ndim != 1 or (arr.size and (arr.min() < 0 or arr.max() > k)):
                raise DimensionError(f"{name} must be a vector with values in 0..{k}")
            arr.flags.writeable = False

        assigned = np.zeros(rows.size, dtype=bool) if self.assigned is None else np.array(self.assigned, dtype=bool)
        assigned.flags.writeable = False

        for i in np.flatnonzero((rows > 0) & ~assigned):
            if int(i) not in self.layers[rows[i] - 1].stable_rows:
                raise DimensionError(f"sample {i} labelled {rows[i]} is not a stable row of that layer")

        object.__setattr__(self, "layers", tuple(self.layers))
        object.__setattr__(self, "row_membership", rows)
        object.__setattr__(self, "col_membership", cols)
        object.__setattr__(self, "assigned", assigned)
        object.__setattr__(self, "diagnostics", tuple(self.diagnostics))

    @property
    def K_detected(self) -> int:
        return len(self.layers)

    @property
    def n(self) -> int:
        return self.row_membership.size

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(c.size for c in self.col_membership)

    def replace(self, **changes) -> "BiclusterModel":
        return replace(self, **changes)


def memberships(layers: Sequence[SparseLayer], n: int, dims: Sequence[int]) -> Tuple[NDArray, Tuple[NDArray, ...]]:
    """
    Builds κ_u and ω_v^(d) from layers; when sets overlap, the earliest layer wins.
    """
    rows = np.zeros(n, dtype=np.int64)
    cols = [np.zeros(p, dtype=np.int64) for p in dims]

    for k, layer in enumerate(layers, start=1):
        idx = np.fromiter(layer.stable_rows, dtype=np.int64, count=len(layer.stable_rows))
        idx = idx[rows[idx] == 0]
        rows[idx] = k
        for d, c in enumerate(layer.stable_cols):
            jdx = np.fromiter(c, dtype=np.int64, count=len(c))
            jdx = jdx[cols[d][jdx] == 0]
            cols[d][jdx] = k

    return rows, tuple(cols)
