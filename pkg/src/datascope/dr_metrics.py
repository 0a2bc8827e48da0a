"""Layout quality metrics.

Trustworthiness penalizes points that look like neighbors in the 2-D
layout but are not neighbors in the original space: 1 means every layout
neighborhood is faithful, lower means the projection manufactured
structure.  Rank ties are broken by point index so identical spaces score
exactly 1.0.
"""

from __future__ import annotations

import numpy as np

from .tsne import squared_distances


def _neighbor_order(X: np.ndarray) -> np.ndarray:
    """Row i = all other points sorted by (distance to i, index)."""
    d2 = squared_distances(np.asarray(X, dtype=np.float64))
    np.fill_diagonal(d2, np.inf)
    return np.argsort(d2, axis=1, kind="stable")[:, :-1]  # drop self (inf) per row


def trustworthiness(X: np.ndarray, layout: np.ndarray, k: int) -> float:
    """Rank-based trustworthiness over k-nearest neighbors, in [0, 1].

    Defined for every 1 <= k <= N-1; when no violation is possible (the
    normalizer vanishes) the score is 1 by convention.
    """
    n = len(X)
    if not 1 <= k < n:
        raise ValueError(f"k must be in [1, {n - 1}], got {k}")

    order_high = _neighbor_order(X)
    order_low = _neighbor_order(layout)

    # rank[i, j] = position of j among i's neighbors in the original space
    rank_high = np.empty((n, n), dtype=np.int64)
    row_idx = np.arange(n - 1)
    for i in range(n):
        rank_high[i, order_high[i]] = row_idx
    rank_high += 1  # ranks start at 1

    # maximum possible penalty; the small-k branch is the usual formula,
    # the large-k branch extends the definition to k up to N-1
    if 2 * k < n:
        normalizer = n * k * (2 * n - 3 * k - 1) / 2.0
    else:
        normalizer = n * (n - k) * (n - k - 1) / 2.0
    if normalizer <= 0:
        return 1.0

    penalty = 0
    for i in range(n):
        high_set = set(order_high[i, :k].tolist())
        for j in order_low[i, :k]:
            if j not in high_set:
                penalty += rank_high[i, j] - k
    return float(1.0 - penalty / normalizer)
