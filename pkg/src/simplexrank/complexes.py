"""Simplicial complexes with dense per-layer integer ids.

A complex is stored as one integer array per order ``h``: shape
``(n_h, h + 1)``, every row strictly ascending, rows unique and sorted
lexicographically.  The row index is the stable id of a simplex within its
layer, so ids survive persistence round trips and repeated construction
from the same input.

Construction goes through three builders:

* :func:`from_edge_list` ingests a pairwise graph (layers 0 and 1),
* :func:`clique_lift` promotes every clique of at most ``max_order + 1``
  vertices to a simplex,
* :func:`from_simplex_list` takes explicit weighted simplex records and
  closes them downward.

Node ids are densified on ingestion; the original labels are kept on the
complex so persisted artifacts can be traced back to the input file.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import sparse

from .errors import LayerCapExceededError, MissingLayerError, ValidationError

__all__ = [
    "Simplex",
    "SimplicialComplex",
    "InfluenceScores",
    "from_edge_list",
    "clique_lift",
    "from_simplex_list",
    "incidence_matrix",
    "generalized_degree",
]

DEFAULT_LAYER_CAP = 5_000_000


@dataclass(frozen=True)
class Simplex:
    """An ``h``-simplex: ``h + 1`` strictly ascending vertex ids."""

    vertices: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) == 0:
            raise ValidationError("a simplex needs at least one vertex")
        # canonicalize to plain ints; numpy scalars would leak into
        # repr-keyed RNG streams and break relabeling invariance
        vs = tuple(int(v) for v in self.vertices)
        object.__setattr__(self, "vertices", vs)
        if any(v < 0 for v in vs):
            raise ValidationError(f"negative vertex id in {vs}")
        if any(a >= b for a, b in zip(vs, vs[1:])):
            raise ValidationError(f"vertices must be strictly ascending, got {vs}")

    @classmethod
    def of(cls, *vertices: int) -> "Simplex":
        """Build a simplex from vertices in any order."""
        vs = tuple(sorted(int(v) for v in vertices))
        if len(set(vs)) != len(vs):
            raise ValidationError(f"repeated vertex in {vertices}")
        return cls(vs)

    @property
    def order(self) -> int:
        return len(self.vertices) - 1


@dataclass
class InfluenceScores:
    """A per-layer score vector with an observed mask.

    ``values[i]`` is meaningful only where ``observed[i]`` is True; the
    rest are placeholders for simplices whose score is unknown.
    """

    values: np.ndarray
    observed: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        self.observed = np.asarray(self.observed, dtype=bool)
        if self.values.ndim != 1 or self.values.shape != self.observed.shape:
            raise ValidationError("scores and observed mask must be equal-length vectors")
        if not np.all(np.isfinite(self.values[self.observed])):
            raise ValidationError("observed scores must be finite")

    @classmethod
    def fully_observed(cls, values: Sequence[float]) -> "InfluenceScores":
        vals = np.asarray(values, dtype=np.float64)
        return cls(vals, np.ones(vals.shape[0], dtype=bool))

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def observed_ids(self) -> np.ndarray:
        return np.flatnonzero(self.observed)


def _check_layer(order: int, arr: np.ndarray, n_nodes: int) -> np.ndarray:
    arr = np.ascontiguousarray(np.asarray(arr, dtype=np.int64))
    if arr.ndim != 2 or arr.shape[1] != order + 1:
        raise ValidationError(
            f"layer {order} must have shape (n, {order + 1}), got {arr.shape}"
        )
    if arr.size:
        if arr.min() < 0 or arr.max() >= n_nodes:
            raise ValidationError(f"layer {order} has vertex ids outside [0, {n_nodes})")
        if order > 0 and not np.all(np.diff(arr, axis=1) > 0):
            raise ValidationError(f"layer {order} rows must be strictly ascending")
        if arr.shape[0] > 1:
            prev, cur = arr[:-1], arr[1:]
            # lexicographic strict order also implies uniqueness
            diff = cur != prev
            first = diff.argmax(axis=1)
            rows = np.arange(cur.shape[0])
            bad = ~diff.any(axis=1) | (
                cur[rows, first] < prev[rows, first]
            )
            if bad.any():
                raise ValidationError(
                    f"layer {order} rows must be unique and sorted lexicographically"
                )
    return arr


class SimplicialComplex:
    """Immutable stack of simplex layers over a dense node set."""

    def __init__(
        self,
        layers: Mapping[int, np.ndarray],
        labels: Sequence[str] | None = None,
    ) -> None:
        if 0 not in layers:
            raise ValidationError("layer 0 is required")
        orders = sorted(int(h) for h in layers)
        if orders != list(range(len(orders))):
            raise ValidationError(f"layer orders must be contiguous from 0, got {orders}")
        nodes = np.asarray(layers[0], dtype=np.int64).reshape(-1)
        n = nodes.shape[0]
        if not np.array_equal(nodes, np.arange(n)):
            raise ValidationError("layer 0 must list node ids 0..n-1 in order")
        self._layers: dict[int, np.ndarray] = {}
        for h in orders:
            arr = _check_layer(h, np.asarray(layers[h]).reshape(-1, h + 1), n)
            arr.setflags(write=False)
            self._layers[h] = arr
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != n:
                raise ValidationError("label list length must equal node count")
        self._labels = labels
        self._indexes: dict[int, dict[tuple[int, ...], int]] = {}
        self._adjacency: sparse.csr_matrix | None = None

    # -- structure ---------------------------------------------------------

    @property
    def node_count(self) -> int:
        return int(self._layers[0].shape[0])

    @property
    def max_order(self) -> int:
        return max(self._layers)

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(sorted(self._layers))

    @property
    def labels(self) -> tuple[str, ...] | None:
        return self._labels

    def has_layer(self, order: int) -> bool:
        return order in self._layers

    def layer(self, order: int) -> np.ndarray:
        """Read-only ``(n_h, h + 1)`` vertex array of one layer."""
        try:
            return self._layers[order]
        except KeyError:
            raise MissingLayerError(order) from None

    def layer_size(self, order: int) -> int:
        return int(self.layer(order).shape[0])

    def layer_counts(self) -> dict[int, int]:
        return {h: int(a.shape[0]) for h, a in self._layers.items()}

    def index(self, order: int) -> Mapping[tuple[int, ...], int]:
        """Vertex tuple -> simplex id for one layer (built lazily)."""
        if order not in self._indexes:
            arr = self.layer(order)
            self._indexes[order] = {tuple(row): i for i, row in enumerate(arr.tolist())}
        return self._indexes[order]

    def simplex(self, order: int, simplex_id: int) -> Simplex:
        arr = self.layer(order)
        if not 0 <= simplex_id < arr.shape[0]:
            raise ValidationError(f"no simplex {simplex_id} in layer {order}")
        return Simplex(tuple(int(v) for v in arr[simplex_id]))

    def id_of(self, simplex: Simplex) -> int:
        try:
            return self.index(simplex.order)[simplex.vertices]
        except KeyError:
            raise ValidationError(f"{simplex.vertices} is not in layer {simplex.order}") from None

    # -- graph views -------------------------------------------------------

    def adjacency(self) -> sparse.csr_matrix:
        """Symmetric 0/1 node adjacency built from layer 1."""
        if self._adjacency is None:
            n = self.node_count
            if self.has_layer(1) and self.layer_size(1):
                e = self.layer(1)
                rows = np.concatenate([e[:, 0], e[:, 1]])
                cols = np.concatenate([e[:, 1], e[:, 0]])
                data = np.ones(rows.shape[0], dtype=np.float64)
                adj = sparse.csr_matrix((data, (rows, cols)), shape=(n, n))
            else:
                adj = sparse.csr_matrix((n, n), dtype=np.float64)
            self._adjacency = adj
        return self._adjacency

    def degrees(self) -> np.ndarray:
        return np.asarray(self.adjacency().sum(axis=1)).ravel().astype(np.int64)

    def triangles(self) -> np.ndarray:
        """Layer-2 vertex array, empty if the layer is absent."""
        if self.has_layer(2):
            return self.layer(2)
        return np.empty((0, 3), dtype=np.int64)

    # -- invariants ---------------------------------------------------------

    def validate_closure(self) -> None:
        """Check downward closure by direct face enumeration."""
        for h in self.orders:
            if h == 0:
                continue
            lower = self.index(h - 1)
            for row in self.layer(h).tolist():
                for face in combinations(row, h):
                    if face not in lower:
                        raise ValidationError(
                            f"face {face} of layer-{h} simplex {tuple(row)} is missing"
                        )

    def __repr__(self) -> str:  # pragma: no cover
        counts = ", ".join(f"n_{h}={c}" for h, c in self.layer_counts().items())
        return f"SimplicialComplex({counts})"


# -- builders ---------------------------------------------------------------


def _densify(values: np.ndarray) -> tuple[np.ndarray, tuple[str, ...]]:
    uniq = np.unique(values)
    dense = np.searchsorted(uniq, values)
    return dense, tuple(str(int(v)) for v in uniq)


def from_edge_list(edges: Iterable[Sequence[int]]) -> SimplicialComplex:
    """Build layers 0-1 from integer pairs.

    Duplicate and reversed edges are deduplicated.  Malformed pairs and
    self-loops are rejected with the offending position in the input.
    """
    pairs = []
    for idx, edge in enumerate(edges):
        try:
            u, v = edge
            u, v = int(u), int(v)
        except (TypeError, ValueError):
            raise ValidationError(f"edge {idx} is not a pair of integers: {edge!r}") from None
        if u < 0 or v < 0:
            raise ValidationError(f"edge {idx} has a negative node id: ({u}, {v})")
        if u == v:
            raise ValidationError(f"edge {idx} is a self-loop: ({u}, {v})")
        pairs.append((u, v) if u < v else (v, u))
    if not pairs:
        raise ValidationError("edge list is empty")
    arr = np.asarray(pairs, dtype=np.int64)
    dense, labels = _densify(arr.ravel())
    arr = dense.reshape(arr.shape)
    arr = np.unique(arr, axis=0)
    n = len(labels)
    return SimplicialComplex({0: np.arange(n).reshape(-1, 1), 1: arr}, labels)


def _adjacency_sets(cx: SimplicialComplex) -> list[set[int]]:
    adj: list[set[int]] = [set() for _ in range(cx.node_count)]
    if cx.has_layer(1):
        for u, v in cx.layer(1).tolist():
            adj[u].add(v)
            adj[v].add(u)
    return adj


def _maximal_cliques(adj: list[set[int]]) -> Iterable[list[int]]:
    # Bron-Kerbosch with pivoting on the highest-degree candidate
    out: list[list[int]] = []

    def expand(r: list[int], p: set[int], x: set[int]) -> None:
        if not p and not x:
            out.append(r.copy())
            return
        pivot = max(p | x, key=lambda u: (len(adj[u]), -u))
        for v in sorted(p - adj[pivot]):
            expand(r + [v], p & adj[v], x & adj[v])
            p.remove(v)
            x.add(v)

    expand([], set(range(len(adj))), set())
    return out


def clique_lift(
    cx: SimplicialComplex,
    max_order: int,
    layer_cap: int = DEFAULT_LAYER_CAP,
) -> SimplicialComplex:
    """Promote every clique of at most ``max_order + 1`` vertices to a simplex.

    Enumerates maximal cliques once (pivoting Bron-Kerbosch) and emits
    their sub-cliques with per-layer deduplication, so the cost scales
    with the clique structure rather than with ``C(n, k)``.  Layers 0-1
    are copied from the input skeleton; lifting an already-lifted complex
    with the same ``max_order`` reproduces it exactly.
    """
    if max_order < 1:
        raise ValidationError("max_order must be at least 1")
    n = cx.node_count
    layers: dict[int, np.ndarray] = {
        0: np.arange(n).reshape(-1, 1),
        1: cx.layer(1).copy() if cx.has_layer(1) else np.empty((0, 2), dtype=np.int64),
    }
    if max_order == 1:
        return SimplicialComplex(layers, cx.labels)
    found: dict[int, set[tuple[int, ...]]] = {h: set() for h in range(2, max_order + 1)}
    for clique in _maximal_cliques(_adjacency_sets(cx)):
        if len(clique) < 3:
            continue
        vs = sorted(clique)
        for size in range(3, min(len(vs), max_order + 1) + 1):
            bucket = found[size - 1]
            bucket.update(combinations(vs, size))
            if len(bucket) > layer_cap:
                raise LayerCapExceededError(size - 1, len(bucket), layer_cap)
    for h in range(2, max_order + 1):
        rows = sorted(found[h])
        layers[h] = (
            np.asarray(rows, dtype=np.int64) if rows else np.empty((0, h + 1), dtype=np.int64)
        )
    return SimplicialComplex(layers, cx.labels)


def from_simplex_list(
    records: Sequence[tuple[Sequence[int], float]],
    labels: Sequence[str] | None = None,
) -> tuple[SimplicialComplex, dict[int, InfluenceScores]]:
    """Build the downward closure of weighted simplex records.

    Returns the complex plus, per layer, scores in which exactly the
    listed simplices are observed (weights of duplicate records summed;
    the merge is reported as a warning).  Faces manufactured by the
    closure stay unobserved.  ``labels`` optionally names the vertex ids;
    it requires the records to use dense ids ``0..len(labels)-1`` already
    (the file parser guarantees that).
    """
    if not records:
        raise ValidationError("simplex list is empty")
    cleaned: list[tuple[tuple[int, ...], float]] = []
    for idx, (verts, weight) in enumerate(records):
        vs = tuple(sorted(int(v) for v in verts))
        if not vs:
            raise ValidationError(f"record {idx} has no vertices")
        if any(v < 0 for v in vs):
            raise ValidationError(f"record {idx} has a negative node id")
        if len(set(vs)) != len(vs):
            raise ValidationError(f"record {idx} repeats a vertex: {verts!r}")
        cleaned.append((vs, float(weight)))

    all_ids = np.asarray(sorted({v for vs, _ in cleaned for v in vs}), dtype=np.int64)
    dense_of = {int(v): i for i, v in enumerate(all_ids)}
    if labels is None:
        label_tuple = tuple(str(int(v)) for v in all_ids)
    else:
        label_tuple = tuple(str(x) for x in labels)
        if len(label_tuple) != all_ids.shape[0] or not np.array_equal(
            all_ids, np.arange(all_ids.shape[0])
        ):
            raise ValidationError(
                "labels require records with dense vertex ids 0..len(labels)-1"
            )

    weights: dict[tuple[int, ...], float] = {}
    duplicates = 0
    for vs, w in cleaned:
        key = tuple(dense_of[v] for v in vs)
        if key in weights:
            duplicates += 1
            weights[key] += w
        else:
            weights[key] = w
    if duplicates:
        warnings.warn(f"merged {duplicates} duplicate simplex records (weights summed)")

    closure: dict[int, set[tuple[int, ...]]] = {}
    for key in weights:
        h = len(key) - 1
        for size in range(1, h + 2):
            closure.setdefault(size - 1, set()).update(combinations(key, size))
    max_order = max(closure)
    n = len(all_ids)
    closure.setdefault(0, set()).update((i,) for i in range(n))
    layers = {
        h: np.asarray(sorted(closure.get(h, set())), dtype=np.int64).reshape(-1, h + 1)
        for h in range(max_order + 1)
    }
    cx = SimplicialComplex(layers, label_tuple)

    scores: dict[int, InfluenceScores] = {}
    for h in cx.orders:
        vals = np.zeros(cx.layer_size(h))
        obs = np.zeros(cx.layer_size(h), dtype=bool)
        scores[h] = InfluenceScores(vals, obs)
    for key, w in weights.items():
        h = len(key) - 1
        sid = cx.index(h)[key]
        scores[h].values[sid] = w
        scores[h].observed[sid] = True
    return cx, scores


# -- incidence ---------------------------------------------------------------


def incidence_matrix(cx: SimplicialComplex, h: int, f: int) -> sparse.csr_matrix:
    """Binary incidence ``B_{h,f}``: 1 iff one simplex strictly contains the other.

    Defined for any order pair ``h != f``; rows index layer ``h``, columns
    layer ``f``, and ``B_{f,h}`` is exactly the transpose.
    """
    if h == f:
        raise ValidationError("incidence needs two distinct orders")
    for order in (h, f):
        if not cx.has_layer(order):
            raise MissingLayerError(order)
    lo, hi = (h, f) if h < f else (f, h)
    lo_index = cx.index(lo)
    hi_arr = cx.layer(hi)
    rows: list[int] = []
    cols: list[int] = []
    for j, verts in enumerate(hi_arr.tolist()):
        for face in combinations(verts, lo + 1):
            i = lo_index.get(face)
            if i is not None:
                rows.append(i)
                cols.append(j)
    shape_lo_hi = (cx.layer_size(lo), cx.layer_size(hi))
    data = np.ones(len(rows), dtype=np.float64)
    mat = sparse.csr_matrix((data, (rows, cols)), shape=shape_lo_hi)
    if h < f:
        return mat
    return mat.T.tocsr()


def generalized_degree(cx: SimplicialComplex, d: int, m: int) -> np.ndarray:
    """Number of ``d``-simplices incident to each ``m``-simplex."""
    b = incidence_matrix(cx, m, d)
    return np.asarray(b.sum(axis=1)).ravel().astype(np.int64)
