import numpy as np
from dataclasses import asdict, dataclass
from typing import Dict, List, Sequence, Set, Tuple
from src.core.errors import DimensionError
from src.core.types import Bicluster, BiclusterModel
from src.utils.misc import datetime_now as dt_now


@dataclass(frozen=True)
class MetricsReport:
    """
    Quality of one fit against ground truth.

    `fp_rate` can exceed 1 when estimates cover many more cells than the truth.
    """

    relevance: float
    recovery: float
    f_score: float
    fp_rate: float
    fn_rate: float
    unclustered_count: int
    k_detected: int = 0

    def to_dict(self) -> Dict:
        return asdict(self)


def _stacked_columns_(b: Bicluster) -> Set[Tuple[int, int]]:
    # (view, column) pairs stand in for offsets into the stacked matrix
    return {(d, j) for d, cols in enumerate(b.cols) for j in cols}


def _cells_(b: Bicluster) -> Tuple[Set[int], Set[Tuple[int, int]]]:
    return set(b.rows), _stacked_columns_(b)


def _intersection_size_(a: Bicluster, b: Bicluster) -> int:
    ra, ca = _cells_(a)
    rb, cb = _cells_(b)
    return len(ra & rb) * len(ca & cb)


def jaccard(a: Bicluster, b: Bicluster) -> float:
    """
    |A ∩ B| / |A ∪ B| over the cells R x C, with C the stacked columns of all views.
    Two empty biclusters score 0.

    Examples
    --------
    >>> jaccard(Bicluster({0, 1}, ({0, 1},)), Bicluster({1, 2}, ({0, 1},)))
    0.3333333333333333
    """
    if len(a.cols) != len(b.cols):
        raise DimensionError(f"biclusters span {len(a.cols)} and {len(b.cols)} views")
    inter = _intersection_size_(a, b)
    union = a.size + b.size - inter
    return inter / union if union > 0 else 0.0


def _jaccard_matrix_(est: Sequence[Bicluster], truth: Sequence[Bicluster]) -> np.ndarray:
    return np.array([[jaccard(e, t) for t in truth] for e in est], dtype=np.float64).reshape(len(est), len(truth))


def relevance(est: Sequence[Bicluster], truth: Sequence[Bicluster]) -> float:
    """
    Mean over estimates of their best Jaccard against the truth.
    """
    if not est:
        print(f"{dt_now()}: relevance of an empty estimate set is 0")
        return 0.0
    if not truth:
        return 0.0
    return float(_jaccard_matrix_(est, truth).max(axis=1).mean())


def recovery(est: Sequence[Bicluster], truth: Sequence[Bicluster]) -> float:
    """
    Mean over true biclusters of their best Jaccard against the estimates.
    """
    if not truth or not est:
        return 0.0
    return float(_jaccard_matrix_(est, truth).max(axis=0).mean())


def f_score(rel: float, rec: float) -> float:
    """Harmonic mean of relevance and recovery; 0 when both are 0."""
    return 2.0 * rel * rec / (rel + rec) if rel + rec > 0 else 0.0


def fp_fn_rates(est: Sequence[Bicluster], truth: Sequence[Bicluster]) -> Tuple[float, float]:
    """
    False-positive and false-negative cell rates relative to the total true cell count.

    Steps:
    1. Match each true bicluster to its best-Jaccard estimate (lowest index on ties).
    2. FP counts matched estimate cells outside their truth, plus every cell of
       estimates matched to no truth.
    3. FN counts true cells missing from their matched estimate (all of them if
       there are no estimates).
    """
    if not truth:
        raise DimensionError("false positive/negative rates need at least one true bicluster")
    total = sum(t.size for t in truth)
    if total == 0:
        raise DimensionError("true biclusters have no cells")

    if not est:
        return 0.0, 1.0

    match = _jaccard_matrix_(est, truth).argmax(axis=0)
    fp = fn = 0
    for j, t in enumerate(truth):
        e = est[match[j]]
        inter = _intersection_size_(e, t)
        fp += e.size - inter
        fn += t.size - inter

    for i in sorted(set(range(len(est))) - set(match.tolist())):
        fp += est[i].size

    return fp / total, fn / total


def count_unclustered(model: BiclusterModel) -> int:
    return int(np.count_nonzero(model.row_membership == 0))


def biclusters_from_model(model: BiclusterModel) -> List[Bicluster]:
    """One Bicluster per layer, from the layers' stable index sets."""
    return [Bicluster(rows=layer.stable_rows, cols=layer.stable_cols) for layer in model.layers]


def biclusters_from_membership(model: BiclusterModel) -> List[Bicluster]:
    """
    One Bicluster per layer label, from the membership vectors; this view
    includes samples placed by unclustered-sample assignment.
    """
    return [
        Bicluster(
            rows=np.flatnonzero(model.row_membership == k).tolist(),
            cols=tuple(np.flatnonzero(c == k).tolist() for c in model.col_membership),
        )
        for k in range(1, model.K_detected + 1)
    ]


def score_biclusters(est: Sequence[Bicluster], truth: Sequence[Bicluster], unclustered: int = 0) -> MetricsReport:
    rel, rec = relevance(est, truth), recovery(est, truth)
    fp, fn = fp_fn_rates(est, truth)
    return MetricsReport(
        relevance=rel,
        recovery=rec,
        f_score=f_score(rel, rec),
        fp_rate=fp,
        fn_rate=fn,
        unclustered_count=int(unclustered),
        k_detected=len(est),
    )


def evaluate(model: BiclusterModel, truth: Sequence[Bicluster], use_membership: bool = False) -> MetricsReport:
    """
    Full MetricsReport for a fitted model against true biclusters.

    Estimates come from the layers' stable sets, or from the membership
    vectors when `use_membership` is set.
    """
    est = biclusters_from_membership(model) if use_membership else biclusters_from_model(model)
    return score_biclusters(est, truth, count_unclustered(model))
