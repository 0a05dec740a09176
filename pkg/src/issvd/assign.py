import numpy as np
from numpy.typing import NDArray
from scipy.linalg import svd
from typing import List, Tuple
from src.core.types import BiclusterModel, MultiViewData
from src.core.views import concat_views, standardize_views, view_offsets
from src.utils.misc import datetime_now as dt_now


def _pearson_(a: NDArray, b: NDArray) -> float:
    a = a - a.mean()
    b = b - b.mean()
    denom = np.linalg.norm(a) * np.linalg.norm(b)
    return float(a @ b / denom) if denom > 0 else 0.0


def layer_loadings(model: BiclusterModel, X: NDArray) -> List[Tuple[int, NDArray, NDArray]]:
    """
    First principal-component loading of every usable layer's submatrix.

    Returns
    -------
    List[Tuple[int, NDArray, NDArray]]
        (layer label k >= 1, stacked column indices, loading vector) per layer with
        at least two samples and one variable.
    """
    offsets = view_offsets(model.dims)
    out = []

    for k, layer in enumerate(model.layers, start=1):
        rows = np.array(sorted(layer.stable_rows), dtype=np.int64)
        cols = np.concatenate([
            offsets[d] + np.array(sorted(c), dtype=np.int64) for d, c in enumerate(layer.stable_cols)
        ])
        if rows.size < 2 or cols.size == 0:
            continue

        sub = X[np.ix_(rows, cols)]
        sub = sub - sub.mean(axis=0)
        if not np.any(sub):
            continue
        _, _, Vt = svd(sub, full_matrices=False, check_finite=False)
        out.append((k, cols, Vt[0]))

    return out


def assign_unclustered(model: BiclusterModel, data: MultiViewData) -> BiclusterModel:
    """
    Places every unclustered sample in the layer whose leading principal
    component it correlates with most strongly (in absolute value).

    The sample's data is restricted to each layer's variables before
    correlating with that layer's loading. Layers with fewer than two samples
    or no variables are not targets; if no layer qualifies the model is
    returned with a diagnostic and the samples stay unclustered.
    """
    rows = model.row_membership.copy()
    pending = np.flatnonzero(rows == 0)
    if pending.size == 0:
        return model

    X = concat_views(standardize_views(data, model.config.get("standr", "none")))
    targets = layer_loadings(model, X)

    if not targets:
        msg = f"no layer can take unclustered samples; {pending.size} remain unclustered"
        print(f"{dt_now()}: {msg}")
        return model.replace(diagnostics=model.diagnostics + (msg,))

    assigned = model.assigned.copy()
    for i in pending:
        corr = [abs(_pearson_(X[i, cols], loading)) for _, cols, loading in targets]
        rows[i] = targets[int(np.argmax(corr))][0]
        assigned[i] = True

    return model.replace(row_membership=rows, assigned=assigned)
