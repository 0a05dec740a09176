import numpy as np
from src.core.errors import ConfigError
from src.core.types import MultiViewData
from src.svd.engine import proportions_of_variation


def select_num_biclusters(data: MultiViewData, variance_threshold: float, K_user: int) -> int:
    """
    Number of layers to extract.

    Steps:
    1. Per view, count the leading singular values needed before the cumulative
       variance fraction exceeds `variance_threshold`.
    2. Take the largest count over views, plus one.
    3. Return the smaller of that and the user's cap.
    """
    if not 0 < variance_threshold <= 1:
        raise ConfigError(f"variance threshold must lie in (0, 1], got {variance_threshold}")
    if K_user < 1:
        raise ConfigError(f"K_user must be positive, got {K_user}")

    counts = []
    for x in data.views:
        if not np.any(x):
            continue
        cum = np.cumsum(proportions_of_variation(x))
        counts.append(min(int(np.searchsorted(cum, variance_threshold, side="right")) + 1, cum.size))

    K_a = (max(counts) if counts else 0) + 1
    return min(K_a, int(K_user))
