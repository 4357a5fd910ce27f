"""Rank agreement and dataset splitting.

Kendall's tau is computed in the tau-a convention: a pair tied in either
list is neither concordant nor discordant, but the denominator stays the
full ``m (m - 1) / 2``.  This differs from scipy's tau-b (which rescales
the denominator for ties), so the counting is done here.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .complexes import InfluenceScores
from .errors import ValidationError
from .rng import stream

__all__ = ["kendall_tau", "truth_pairs", "split"]


class _Fenwick:
    __slots__ = ("tree",)

    def __init__(self, size: int) -> None:
        self.tree = [0] * (size + 1)

    def add(self, i: int) -> None:
        i += 1
        while i < len(self.tree):
            self.tree[i] += 1
            i += i & (-i)

    def prefix(self, i: int) -> int:
        # count of inserted values with index <= i
        total = 0
        i += 1
        while i > 0:
            total += self.tree[i]
            i -= i & (-i)
        return total


def _tied_pairs(values: np.ndarray) -> int:
    _, counts = np.unique(values, return_counts=True)
    return int((counts * (counts - 1) // 2).sum())


def kendall_tau(x: Sequence[float], y: Sequence[float]) -> float:
    """tau = (concordant - discordant) / (m (m - 1) / 2).

    O(m log m): sort by ``(x, y)``, then count strict discordances with a
    Fenwick tree over rank-compressed ``y``, walking x-tie groups so that
    pairs tied in ``x`` never enter the count.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("kendall_tau needs two equal-length vectors")
    m = x.shape[0]
    if m < 2:
        raise ValidationError("kendall_tau needs at least two items")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValidationError("kendall_tau needs finite values")

    order = np.lexsort((y, x))
    xs, ys = x[order], y[order]
    y_rank = np.searchsorted(np.unique(ys), ys)
    n_ranks = int(y_rank.max()) + 1

    tree = _Fenwick(n_ranks)
    discordant = 0
    seen = 0
    i = 0
    while i < m:
        j = i
        while j < m and xs[j] == xs[i]:
            j += 1
        for k in range(i, j):
            # earlier items with strictly larger y are discordant
            discordant += seen - tree.prefix(int(y_rank[k]))
        for k in range(i, j):
            tree.add(int(y_rank[k]))
        seen += j - i
        i = j

    total = m * (m - 1) // 2
    tx = _tied_pairs(x)
    ty = _tied_pairs(y)
    _, joint_counts = np.unique(np.stack([x, y], axis=1), axis=0, return_counts=True)
    txy = int((joint_counts * (joint_counts - 1) // 2).sum())
    concordant = total - tx - ty + txy - discordant
    return (concordant - discordant) / total


def truth_pairs(
    scores: InfluenceScores,
    subset: Sequence[int] | None = None,
) -> np.ndarray:
    """All ordered pairs ``(i, j, r)`` with ``i < j`` over observed ids.

    ``r`` is +1 when score(i) > score(j), -1 when smaller, 0 on ties.
    """
    if subset is None:
        ids = scores.observed_ids()
    else:
        ids = np.asarray(sorted(int(i) for i in subset), dtype=np.int64)
        if ids.size and (ids[0] < 0 or ids[-1] >= len(scores)):
            raise ValidationError("subset ids out of range")
        if not np.all(scores.observed[ids]):
            missing = ids[~scores.observed[ids]][:5]
            raise ValidationError(f"subset contains unobserved ids, e.g. {missing.tolist()}")
    if ids.size < 2:
        raise ValidationError("need at least two observed ids to form pairs")
    vals = scores.values[ids]
    ii, jj = np.triu_indices(ids.size, k=1)
    r = np.sign(vals[ii] - vals[jj]).astype(np.int64)
    out = np.column_stack([ids[ii], ids[jj], r])
    return out


def split(
    ids: Sequence[int],
    ratios: tuple[float, float, float] = (0.6, 0.2, 0.2),
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Deterministic shuffle + carve into train/val/test.

    Sizes are the rounded ratios with any remainder going to test.
    """
    ids = np.asarray(list(ids), dtype=np.int64)
    if ids.size == 0:
        raise ValidationError("cannot split an empty id list")
    if len(ratios) != 3 or any(r < 0 for r in ratios):
        raise ValidationError("ratios must be three non-negative numbers")
    if not math.isclose(sum(ratios), 1.0, rel_tol=0, abs_tol=1e-9):
        raise ValidationError(f"ratios must sum to 1, got {sum(ratios)}")
    rng = stream(seed, "split")
    shuffled = ids[rng.permutation(ids.size)]
    n_train = int(round(ratios[0] * ids.size))
    n_val = int(round(ratios[1] * ids.size))
    n_train = min(n_train, ids.size)
    n_val = min(n_val, ids.size - n_train)
    train = np.sort(shuffled[:n_train])
    val = np.sort(shuffled[n_train : n_train + n_val])
    test = np.sort(shuffled[n_train + n_val :])
    return train, val, test
