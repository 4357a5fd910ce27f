"""Classical node centralities and simplex feature assembly.

All metrics operate on the 1-skeleton of a complex.  The iterative pair
(pagerank, eigenvector) reports convergence instead of raising, because a
stalled power iteration is still a usable ranking signal.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Sequence

import networkx as nx
import numpy as np

from .complexes import SimplicialComplex, generalized_degree
from .errors import ValidationError

__all__ = [
    "FeatureMatrix",
    "DEFAULT_FEATURES",
    "NODE_METRICS",
    "node_centrality",
    "iterative_centrality",
    "node_features",
    "simplex_features",
    "higher_order_degree",
    "standardize",
]

DEFAULT_FEATURES = ("degree", "neighbor_degree", "h_index", "coreness")

NODE_METRICS = (
    "degree",
    "neighbor_degree",
    "h_index",
    "coreness",
    "closeness",
    "betweenness",
)

ITERATIVE_METRICS = ("pagerank", "eigenvector")


@dataclass
class FeatureMatrix:
    """Rows per simplex of one layer, named columns."""

    values: np.ndarray
    columns: tuple[str, ...]

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ValidationError("feature matrix must be 2-D")
        if self.values.shape[1] != len(self.columns):
            raise ValidationError(
                f"{self.values.shape[1]} columns but {len(self.columns)} names"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("features must be finite")


def _neighbor_lists(cx: SimplicialComplex) -> list[np.ndarray]:
    adj = cx.adjacency()
    return [adj.indices[adj.indptr[i] : adj.indptr[i + 1]] for i in range(cx.node_count)]


def _degree(cx: SimplicialComplex) -> np.ndarray:
    return cx.degrees().astype(np.float64)


def _neighbor_degree(cx: SimplicialComplex) -> np.ndarray:
    """Mean degree over neighbors; 0 for isolated nodes."""
    deg = cx.degrees().astype(np.float64)
    summed = cx.adjacency() @ deg
    out = np.zeros(cx.node_count)
    nz = deg > 0
    out[nz] = summed[nz] / deg[nz]
    return out


def _h_index(cx: SimplicialComplex) -> np.ndarray:
    """Largest h such that at least h neighbors have degree >= h."""
    deg = cx.degrees()
    out = np.zeros(cx.node_count)
    for i, nbrs in enumerate(_neighbor_lists(cx)):
        ds = np.sort(deg[nbrs])[::-1]
        h = 0
        for rank, d in enumerate(ds, start=1):
            if d >= rank:
                h = rank
            else:
                break
        out[i] = h
    return out


def _coreness(cx: SimplicialComplex) -> np.ndarray:
    """k-core number by iterative peeling, ties broken by node id."""
    n = cx.node_count
    deg = cx.degrees().astype(np.int64).copy()
    nbrs = _neighbor_lists(cx)
    core = np.zeros(n, dtype=np.int64)
    removed = np.zeros(n, dtype=bool)
    # (degree, id) heap peels the minimum-degree node first, ties by id
    heap = [(int(deg[v]), v) for v in range(n)]
    heapq.heapify(heap)
    current = 0
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != deg[v]:
            continue
        current = max(current, int(d))
        core[v] = current
        removed[v] = True
        for u in nbrs[v]:
            if not removed[u]:
                deg[u] -= 1
                heapq.heappush(heap, (int(deg[u]), u))
    return core.astype(np.float64)


def _closeness(cx: SimplicialComplex) -> np.ndarray:
    """Inverse of summed BFS distances within the node's component; 0 for singletons."""
    nbrs = _neighbor_lists(cx)
    n = cx.node_count
    out = np.zeros(n)
    dist = np.empty(n, dtype=np.int64)
    for s in range(n):
        dist.fill(-1)
        dist[s] = 0
        total = 0
        q = deque([s])
        while q:
            v = q.popleft()
            for u in nbrs[v]:
                if dist[u] < 0:
                    dist[u] = dist[v] + 1
                    total += dist[u]
                    q.append(u)
        if total > 0:
            out[s] = 1.0 / total
    return out


def _betweenness(cx: SimplicialComplex) -> np.ndarray:
    g = nx.Graph()
    g.add_nodes_from(range(cx.node_count))
    if cx.has_layer(1):
        g.add_edges_from(map(tuple, cx.layer(1).tolist()))
    scores = nx.betweenness_centrality(g, normalized=False)
    return np.asarray([scores[i] for i in range(cx.node_count)])


_PLAIN = {
    "degree": _degree,
    "neighbor_degree": _neighbor_degree,
    "h_index": _h_index,
    "coreness": _coreness,
    "closeness": _closeness,
    "betweenness": _betweenness,
}


def node_centrality(cx: SimplicialComplex, metric: str) -> np.ndarray:
    """One non-negative score per node for a non-iterative metric."""
    try:
        fn = _PLAIN[metric]
    except KeyError:
        raise ValidationError(
            f"unknown metric {metric!r}; choose from {sorted(_PLAIN)}"
        ) from None
    return fn(cx)


def iterative_centrality(
    cx: SimplicialComplex,
    metric: str,
    damping: float = 0.85,
    max_iters: int = 1000,
    tol: float = 1e-10,
) -> tuple[np.ndarray, bool]:
    """Pagerank or eigenvector centrality by power iteration.

    Returns ``(values, converged)``.  Pagerank redistributes dangling mass
    uniformly and sums to 1; eigenvector centrality is normalized to unit
    1-norm.  Non-convergence is reported through the flag, not raised.
    """
    n = cx.node_count
    adj = cx.adjacency()
    deg = cx.degrees().astype(np.float64)
    if metric == "pagerank":
        x = np.full(n, 1.0 / n)
        dangling = deg == 0
        with np.errstate(divide="ignore"):
            inv_deg = np.where(dangling, 0.0, 1.0 / np.where(deg > 0, deg, 1.0))
        for _ in range(max_iters):
            spread = adj.T @ (x * inv_deg)
            spread += x[dangling].sum() / n
            new = (1.0 - damping) / n + damping * spread
            if np.abs(new - x).sum() < tol:
                return new, True
            x = new
        return x, False
    if metric == "eigenvector":
        x = np.full(n, 1.0 / n)
        for _ in range(max_iters):
            # iterate on I + A; same leading eigenvector, but the shift
            # breaks the +-lambda tie on bipartite graphs
            new = x + adj @ x
            norm = np.abs(new).sum()
            if norm == 0.0:
                return x, False
            new /= norm
            if np.abs(new - x).sum() < tol:
                return new, True
            x = new
        return x, False
    raise ValidationError(f"unknown iterative metric {metric!r}")


def node_features(
    cx: SimplicialComplex,
    features: Sequence[str] = DEFAULT_FEATURES,
) -> FeatureMatrix:
    """Stack the requested node metrics into one matrix."""
    if not features:
        raise ValidationError("at least one feature is required")
    cols = []
    for name in features:
        if name in _PLAIN:
            cols.append(node_centrality(cx, name))
        elif name in ITERATIVE_METRICS:
            cols.append(iterative_centrality(cx, name)[0])
        else:
            raise ValidationError(f"unknown feature {name!r}")
    return FeatureMatrix(np.column_stack(cols), tuple(features))


def simplex_features(
    node_matrix: FeatureMatrix,
    cx: SimplicialComplex,
    hub_order: int,
) -> FeatureMatrix:
    """Per-simplex features: mean of the vertex features of each hub simplex."""
    if node_matrix.values.shape[0] != cx.node_count:
        raise ValidationError("node feature rows must match node count")
    if hub_order == 0:
        return FeatureMatrix(node_matrix.values.copy(), node_matrix.columns)
    layer = cx.layer(hub_order)
    vals = node_matrix.values[layer].mean(axis=1)
    return FeatureMatrix(vals, node_matrix.columns)


def higher_order_degree(cx: SimplicialComplex, hub_order: int) -> np.ndarray:
    """Baseline score: incident (h+1)-simplices, or 2-simplices for nodes.

    Counting the next layer up keeps the signal genuinely higher-order
    (for nodes the 1-up count would just be the plain degree).  Returns
    zeros when the counting layer is absent.
    """
    d = 2 if hub_order == 0 else hub_order + 1
    if not cx.has_layer(d) or cx.layer_size(d) == 0:
        return np.zeros(cx.layer_size(hub_order))
    return generalized_degree(cx, d, hub_order).astype(np.float64)


def standardize(matrix: FeatureMatrix) -> FeatureMatrix:
    """Per-column z-score (population std); zero-variance columns become 0."""
    vals = matrix.values
    mean = vals.mean(axis=0)
    std = vals.std(axis=0)
    out = np.zeros_like(vals)
    nz = std > 0
    out[:, nz] = (vals[:, nz] - mean[nz]) / std[nz]
    return FeatureMatrix(out, matrix.columns)
