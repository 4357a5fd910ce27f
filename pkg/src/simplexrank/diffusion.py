"""Synchronous SIR and simplicial SIR (three-body) contagion.

One engine serves both models.  Per step it draws exactly two uniform
vectors of length ``n`` (infection, then recovery), whether or not the
three-body term is active, so a run with ``beta2 = 0`` consumes the RNG
stream identically to plain SIR and reproduces it bit for bit.  Infection
is evaluated against the state at the start of the step, and recovery
only applies to nodes that entered the step infected.

Every run gets its own Generator derived from the root seed plus a
structured key (see :mod:`simplexrank.rng`), so Monte-Carlo aggregates do
not depend on thread count or execution order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .complexes import InfluenceScores, Simplex, SimplicialComplex
from .errors import MissingLayerError, SimplexRankError, ThresholdUndefinedError, ValidationError
from .rng import stream

__all__ = [
    "DiffusionParams",
    "RunOutcome",
    "epidemic_threshold",
    "sir_run",
    "hsir_run",
    "simplex_infection_ability",
    "generate_labels",
    "immunize_and_spread",
    "immunize_runs",
]

# below this node count the adjacency is densified: the matvec then costs
# less than the sparse-dispatch overhead that dominates tiny graphs
_DENSE_LIMIT = 512

_SI_STEP_CAP = 100_000


@dataclass(frozen=True)
class DiffusionParams:
    """Infection/recovery probabilities and Monte-Carlo bookkeeping.

    ``higher_betas`` (orders above 2) are carried for forward
    compatibility but the engine rejects nonzero entries.
    """

    beta: float
    gamma: float = 1.0
    beta2: float = 0.0
    higher_betas: Mapping[int, float] = field(default_factory=dict)
    runs: int = 1000
    seed: int = 0
    max_steps: int | None = None

    def __post_init__(self) -> None:
        for name, p in (("beta", self.beta), ("gamma", self.gamma), ("beta2", self.beta2)):
            if not 0.0 <= float(p) <= 1.0:
                raise ValidationError(f"{name} must be a probability, got {p}")
        for order, p in self.higher_betas.items():
            if int(order) <= 2:
                raise ValidationError("higher_betas keys must be orders above 2")
            if not 0.0 <= float(p) <= 1.0:
                raise ValidationError(f"beta_{order} must be a probability, got {p}")
        if self.runs < 1:
            raise ValidationError("runs must be at least 1")
        if self.max_steps is not None and self.max_steps < 1:
            raise ValidationError("max_steps must be positive")

    def reject_unsupported(self) -> None:
        bad = {o: p for o, p in self.higher_betas.items() if float(p) > 0.0}
        if bad:
            raise SimplexRankError(
                f"interaction orders above 2 are not supported by the engine, got beta for {sorted(bad)}"
            )


@dataclass(frozen=True)
class RunOutcome:
    """Terminal state of one run."""

    recovered_fraction: float
    steps: int
    susceptible: int
    infected: int
    recovered: int
    truncated: bool = False
    history: tuple[tuple[int, int, int], ...] | None = None


def epidemic_threshold(cx: SimplicialComplex, gamma: float = 1.0) -> float:
    """Pairwise threshold ``gamma * <k> / (<k^2> - <k>)`` from the degree sequence."""
    deg = cx.degrees()
    sum_k = int(deg.sum())
    sum_k2 = int((deg.astype(np.int64) ** 2).sum())
    if sum_k2 == sum_k:
        raise ThresholdUndefinedError(
            "threshold undefined: <k^2> equals <k> (no node has two neighbors)"
        )
    return float(gamma) * sum_k / (sum_k2 - sum_k)


def _spread(
    adj,
    triangles: np.ndarray | None,
    n: int,
    seed_nodes: np.ndarray,
    immune_nodes: np.ndarray | None,
    beta: float,
    beta2: float,
    gamma: float,
    rng: np.random.Generator,
    max_steps: int | None,
    record: bool = False,
) -> RunOutcome:
    status = np.zeros(n, dtype=np.int8)  # 0 susceptible, 1 infected, 2 recovered
    if immune_nodes is not None and immune_nodes.size:
        status[immune_nodes] = 2
    status[seed_nodes] = 1
    infected = status == 1
    cap = max_steps if max_steps is not None else (_SI_STEP_CAP if gamma == 0.0 else None)
    history: list[tuple[int, int, int]] | None = [] if record else None
    if record:
        history.append(_histogram(status, n))
    steps = 0
    use_triangles = triangles is not None and beta2 > 0.0 and triangles.size
    safe1 = 1.0 - beta
    safe2 = 1.0 - beta2
    while True:
        if not infected.any():
            truncated = False
            break
        if cap is not None and steps >= cap:
            truncated = True
            break
        inf_f = infected.astype(np.float64)
        m1 = adj @ inf_f
        p_safe = np.power(safe1, m1)
        if use_triangles:
            tri_inf = infected[triangles].sum(axis=1)
            both = triangles[tri_inf == 2]
            if both.size:
                m2 = np.bincount(both.ravel(), minlength=n)
                p_safe = p_safe * np.power(safe2, m2)
        u = rng.random(n)
        v = rng.random(n)
        new_inf = (status == 0) & (u < 1.0 - p_safe)
        recovering = infected & (v < gamma)
        status[new_inf] = 1
        status[recovering] = 2
        infected = status == 1
        steps += 1
        if record:
            history.append(_histogram(status, n))
    s, i, r = _histogram(status, n)
    return RunOutcome(
        recovered_fraction=r / n,
        steps=steps,
        susceptible=s,
        infected=i,
        recovered=r,
        truncated=truncated,
        history=tuple(history) if record else None,
    )


def _histogram(status: np.ndarray, n: int) -> tuple[int, int, int]:
    i = int((status == 1).sum())
    r = int((status == 2).sum())
    return n - i - r, i, r


def _graph_matrix(cx: SimplicialComplex):
    adj = cx.adjacency()
    if cx.node_count <= _DENSE_LIMIT:
        return adj.toarray()
    return adj


def _seed_array(cx: SimplicialComplex, seeds: Sequence[int]) -> np.ndarray:
    arr = np.asarray(sorted(set(int(s) for s in seeds)), dtype=np.int64)
    if arr.size == 0:
        raise ValidationError("at least one seed node is required")
    if arr[0] < 0 or arr[-1] >= cx.node_count:
        raise ValidationError("seed node ids out of range")
    return arr


def sir_run(
    cx: SimplicialComplex,
    seeds: Sequence[int],
    params: DiffusionParams,
    rng: np.random.Generator,
    record_history: bool = False,
) -> RunOutcome:
    """One pairwise SIR run on the 1-skeleton."""
    params.reject_unsupported()
    return _spread(
        _graph_matrix(cx),
        None,
        cx.node_count,
        _seed_array(cx, seeds),
        None,
        params.beta,
        0.0,
        params.gamma,
        rng,
        params.max_steps,
        record_history,
    )


def hsir_run(
    cx: SimplicialComplex,
    seeds: Sequence[int],
    params: DiffusionParams,
    rng: np.random.Generator,
    record_history: bool = False,
) -> RunOutcome:
    """One simplicial SIR run with the three-body term over layer 2.

    Requires layer 2 to exist (it may be empty).  With ``beta2 = 0`` the
    trajectory is bit-for-bit the plain SIR trajectory for the same rng.
    """
    params.reject_unsupported()
    if not cx.has_layer(2):
        raise MissingLayerError(2)
    return _spread(
        _graph_matrix(cx),
        cx.triangles(),
        cx.node_count,
        _seed_array(cx, seeds),
        None,
        params.beta,
        params.beta2,
        params.gamma,
        rng,
        params.max_steps,
        record_history,
    )


def _mean_fraction(
    adj,
    triangles,
    n: int,
    seed_nodes: np.ndarray,
    params: DiffusionParams,
    key: tuple,
    threads: int,
) -> float:
    """Mean recovered fraction over ``params.runs`` independent streams.

    Per-run values land in a run-indexed array and are reduced with
    ``math.fsum``, so the aggregate is identical for any thread count.
    """
    values = np.empty(params.runs, dtype=np.float64)

    def work(index: int) -> None:
        rng = stream(params.seed, *key, index)
        out = _spread(
            adj, triangles, n, seed_nodes, None,
            params.beta, params.beta2, params.gamma, rng, params.max_steps,
        )
        values[index] = out.recovered_fraction

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(params.runs)))
    else:
        for index in range(params.runs):
            work(index)
    return math.fsum(values) / params.runs


def simplex_infection_ability(
    cx: SimplicialComplex,
    sigma: Simplex,
    params: DiffusionParams,
    threads: int = 1,
) -> float:
    """Mean final recovered fraction when ``sigma``'s vertices seed the spread.

    Uses the three-body term whenever ``params.beta2 > 0`` (layer 2
    required in that case).  Streams are keyed by the simplex's vertex
    tuple, so scores do not change if layer ids are relabeled.
    """
    params.reject_unsupported()
    if not cx.has_layer(sigma.order):
        raise MissingLayerError(sigma.order)
    if sigma.vertices not in cx.index(sigma.order):
        raise ValidationError(f"{sigma.vertices} is not a simplex of layer {sigma.order}")
    triangles = None
    if params.beta2 > 0.0:
        if not cx.has_layer(2):
            raise MissingLayerError(2)
        triangles = cx.triangles()
    seed_nodes = _seed_array(cx, sigma.vertices)
    return _mean_fraction(
        _graph_matrix(cx), triangles, cx.node_count, seed_nodes, params,
        ("ability", sigma.order) + sigma.vertices, threads,
    )


def generate_labels(
    cx: SimplicialComplex,
    hub_order: int,
    params: DiffusionParams,
    threads: int = 1,
) -> InfluenceScores:
    """Infection ability of every simplex in the hub layer (all observed)."""
    params.reject_unsupported()
    if not cx.has_layer(hub_order) or cx.layer_size(hub_order) == 0:
        raise MissingLayerError(hub_order)
    triangles = None
    if params.beta2 > 0.0:
        if not cx.has_layer(2):
            raise MissingLayerError(2)
        triangles = cx.triangles()
    adj = _graph_matrix(cx)
    n = cx.node_count
    layer = cx.layer(hub_order)
    values = np.empty(layer.shape[0], dtype=np.float64)

    def work(sid: int) -> None:
        verts = tuple(int(v) for v in layer[sid])
        values[sid] = _mean_fraction(
            adj, triangles, n, np.asarray(verts, dtype=np.int64), params,
            ("ability", hub_order) + verts, threads=1,
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(layer.shape[0])))
    else:
        for sid in range(layer.shape[0]):
            work(sid)
    return InfluenceScores.fully_observed(values)


def immunize_runs(
    cx: SimplicialComplex,
    immunized: Sequence[Simplex] | Sequence[Sequence[int]],
    seed_fraction: float,
    beta: float,
    params: DiffusionParams,
    threads: int = 1,
    grid_index: int = 0,
) -> np.ndarray:
    """Per-run final recovered fractions with some simplices immunized.

    The vertices of ``immunized`` start in the recovered state (and count
    toward ``r``); each run seeds ``seed_fraction`` of the remaining
    nodes, drawn uniformly per run.  ``grid_index`` keys the RNG streams
    so a grid of betas gets independent draws per position.
    """
    params.reject_unsupported()
    if not 0.0 < seed_fraction <= 1.0:
        raise ValidationError("seed_fraction must be in (0, 1]")
    if not 0.0 <= beta <= 1.0:
        raise ValidationError(f"beta grid value {beta} is not a probability")
    immune: set[int] = set()
    for item in immunized:
        verts = item.vertices if isinstance(item, Simplex) else tuple(int(v) for v in item)
        immune.update(verts)
    n = cx.node_count
    if any(v < 0 or v >= n for v in immune):
        raise ValidationError("immunized vertices out of range")
    rest = np.asarray(sorted(set(range(n)) - immune), dtype=np.int64)
    if rest.size == 0:
        raise ValidationError("immunized set covers all nodes; nothing to seed")
    immune_arr = np.asarray(sorted(immune), dtype=np.int64)
    n_seeds = max(1, int(round(seed_fraction * rest.size)))
    triangles = None
    if params.beta2 > 0.0:
        if not cx.has_layer(2):
            raise MissingLayerError(2)
        triangles = cx.triangles()
    adj = _graph_matrix(cx)
    values = np.empty(params.runs, dtype=np.float64)

    def work(index: int) -> None:
        rng = stream(params.seed, "immunize", grid_index, index)
        pick = rng.choice(rest.size, size=n_seeds, replace=False)
        out = _spread(
            adj, triangles, n, rest[np.sort(pick)], immune_arr,
            beta, params.beta2, params.gamma, rng, params.max_steps,
        )
        values[index] = out.recovered_fraction

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(params.runs)))
    else:
        for index in range(params.runs):
            work(index)
    return values


def immunize_and_spread(
    cx: SimplicialComplex,
    immunized: Sequence[Simplex] | Sequence[Sequence[int]],
    seed_fraction: float,
    betas: Sequence[float],
    params: DiffusionParams,
    threads: int = 1,
) -> list[tuple[float, float]]:
    """Mean final recovered fraction per beta; see :func:`immunize_runs`."""
    results: list[tuple[float, float]] = []
    for b_idx, beta in enumerate(betas):
        values = immunize_runs(
            cx, immunized, seed_fraction, beta, params,
            threads=threads, grid_index=b_idx,
        )
        results.append((float(beta), math.fsum(values) / params.runs))
    return results
