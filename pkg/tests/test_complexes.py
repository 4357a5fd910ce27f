"""Complex construction, lifting, and incidence against brute-force oracles."""

import math
from itertools import combinations

import numpy as np
import pytest

from simplexrank import (
    LayerCapExceededError,
    MissingLayerError,
    Simplex,
    ValidationError,
    clique_lift,
    from_edge_list,
    from_simplex_list,
    generalized_degree,
    incidence_matrix,
)
from simplexrank.complexes import SimplicialComplex

from conftest import random_lifted


# -- oracles ---------------------------------------------------------------


def brute_incidence(cx, h, f):
    """Strict-containment incidence by direct subset checks."""
    rows_h = [set(r) for r in cx.layer(h)]
    rows_f = [set(r) for r in cx.layer(f)]
    out = np.zeros((len(rows_h), len(rows_f)))
    for i, a in enumerate(rows_h):
        for j, b in enumerate(rows_f):
            if (h < f and a < b) or (h > f and b < a):
                out[i, j] = 1.0
    return out


def brute_cliques(edges, n, size):
    adj = {i: set() for i in range(n)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    found = []
    for combo in combinations(range(n), size):
        if all(b in adj[a] for a, b in combinations(combo, 2)):
            found.append(combo)
    return found


# -- Simplex ---------------------------------------------------------------


def test_simplex_requires_strictly_ascending_vertices():
    Simplex((0, 2, 5))
    with pytest.raises(ValidationError):
        Simplex((2, 0))
    with pytest.raises(ValidationError):
        Simplex((1, 1, 2))
    with pytest.raises(ValidationError):
        Simplex(())


def test_simplex_of_sorts():
    assert Simplex.of(5, 0, 2).vertices == (0, 2, 5)
    assert Simplex.of(3).order == 0
    assert Simplex.of(1, 4, 7, 9).order == 3


# -- edge ingestion --------------------------------------------------------


def test_from_edge_list_deduplicates_and_densifies():
    cx = from_edge_list([(0, 1), (1, 0), (1, 2), (0, 1)])
    assert cx.layer_counts() == {0: 3, 1: 2}
    assert cx.labels == ("0", "1", "2")


def test_from_edge_list_relabels_sparse_ids():
    cx = from_edge_list([(10, 20), (20, 30)])
    assert cx.node_count == 3
    assert cx.labels == ("10", "20", "30")


def test_from_edge_list_rejects_self_loops_and_junk():
    with pytest.raises(ValidationError):
        from_edge_list([(1, 1)])
    with pytest.raises(ValidationError):
        from_edge_list([(0, 1), (2,)])
    with pytest.raises(ValidationError):
        from_edge_list([])


# -- clique lifting --------------------------------------------------------


def test_k3_lift_counts():
    cx = clique_lift(from_edge_list([(0, 1), (0, 2), (1, 2)]), 2)
    assert cx.layer_counts() == {0: 3, 1: 3, 2: 1}


def test_k4_lift_counts_match_binomials(k4):
    # every size-(h+1) subset of K4's vertices is a clique
    assert k4.layer_counts() == {h: math.comb(4, h + 1) for h in range(4)}


def test_lift_keeps_trailing_layers_empty_when_no_cliques():
    star = from_edge_list([(0, 1), (0, 2), (0, 3)])
    cx = clique_lift(star, 2)
    assert cx.layer_counts() == {0: 4, 1: 3, 2: 0}
    assert cx.triangles().shape == (0, 3)


def test_lift_is_idempotent():
    for seed in range(10):
        cx = random_lifted(seed)
        again = clique_lift(cx, cx.max_order)
        assert again.layer_counts() == cx.layer_counts()
        for h in cx.orders:
            assert np.array_equal(again.layer(h), cx.layer(h))


def test_lift_matches_brute_force_clique_enumeration():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(4, 12))
        edges = [
            (i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.5
        ]
        if not edges:
            continue
        used = sorted({v for e in edges for v in e})
        relabel = {v: i for i, v in enumerate(used)}
        edges = [(relabel[a], relabel[b]) for a, b in edges]
        cx = clique_lift(from_edge_list(edges), 3)
        for h in (1, 2, 3):
            expected = brute_cliques(edges, cx.node_count, h + 1)
            got = [tuple(r) for r in cx.layer(h)]
            assert got == sorted(expected)


def test_lift_layer_cap():
    # K6 has 15 edges but 20 triangles
    edges = [(a, b) for a in range(6) for b in range(a + 1, 6)]
    base = from_edge_list(edges)
    with pytest.raises(LayerCapExceededError) as err:
        clique_lift(base, 2, layer_cap=16)
    assert err.value.order == 2
    clique_lift(base, 2, layer_cap=20)


def test_layers_are_lexicographically_sorted_and_indexed():
    for seed in range(5):
        cx = random_lifted(seed)
        for h in cx.orders:
            layer = cx.layer(h)
            rows = [tuple(r) for r in layer]
            assert rows == sorted(rows)
            for sid, row in enumerate(rows):
                assert cx.index(h)[row] == sid
                assert cx.id_of(Simplex(row)) == sid


def test_layers_are_read_only(triangle_pendant):
    with pytest.raises(ValueError):
        triangle_pendant.layer(1)[0, 0] = 9


def test_missing_layer_error(triangle_pendant):
    with pytest.raises(MissingLayerError):
        triangle_pendant.layer(3)


# -- simplex list ingestion ------------------------------------------------


def test_from_simplex_list_applies_downward_closure():
    cx, observed = from_simplex_list([((0, 1, 2), 1.0)])
    assert cx.layer_counts() == {0: 3, 1: 3, 2: 1}
    cx.validate_closure()
    # only the listed record is observed
    assert observed[2].observed.all()
    assert not observed[1].observed.any()
    assert not observed[0].observed.any()


def test_from_simplex_list_sums_duplicate_weights():
    with pytest.warns(UserWarning):
        cx, observed = from_simplex_list([((0, 1), 2.0), ((0, 1), 3.0)])
    assert observed[1].values[cx.id_of(Simplex((0, 1)))] == 5.0


def test_from_simplex_list_with_labels():
    cx, _ = from_simplex_list([((0, 1), 1.0), ((1, 2), 1.0)], labels=["a", "b", "c"])
    assert cx.labels == ("a", "b", "c")
    with pytest.raises(ValidationError):
        from_simplex_list([((0, 1), 1.0)], labels=["a"])


def test_validate_closure_catches_missing_face():
    layers = {
        0: np.arange(3).reshape(-1, 1),
        1: np.array([[0, 1], [0, 2]]),  # (1, 2) missing
        2: np.array([[0, 1, 2]]),
    }
    cx = SimplicialComplex(layers)
    with pytest.raises(ValidationError):
        cx.validate_closure()


def test_constructor_rejects_bad_layers():
    with pytest.raises(ValidationError):
        SimplicialComplex({1: np.array([[0, 1]])})  # no layer 0
    with pytest.raises(ValidationError):
        SimplicialComplex({0: np.array([[0], [2]])})  # ids not dense
    with pytest.raises(ValidationError):
        SimplicialComplex(
            {0: np.arange(3).reshape(-1, 1), 2: np.array([[0, 1, 2]])}
        )  # gap at order 1


# -- incidence -------------------------------------------------------------


def test_incidence_matches_brute_force():
    for seed in range(15):
        cx = random_lifted(seed, n_max=14)
        orders = [h for h in cx.orders if cx.layer_size(h)]
        for h in orders:
            for f in orders:
                if h == f:
                    continue
                got = incidence_matrix(cx, h, f).toarray()
                assert np.array_equal(got, brute_incidence(cx, h, f))


def test_incidence_transpose_symmetry(k4):
    b01 = incidence_matrix(k4, 0, 1).toarray()
    b10 = incidence_matrix(k4, 1, 0).toarray()
    assert np.array_equal(b01, b10.T)


def test_incidence_rejects_equal_orders(k4):
    with pytest.raises(ValidationError):
        incidence_matrix(k4, 1, 1)


def test_generalized_degree_on_k4(k4):
    # every node sits in comb(3, 2) triangles, every edge in 2
    assert list(generalized_degree(k4, 2, 0)) == [3, 3, 3, 3]
    assert list(generalized_degree(k4, 2, 1)) == [2] * 6
    assert list(generalized_degree(k4, 0, 3)) == [4]


def test_adjacency_and_degrees(triangle_pendant):
    adj = triangle_pendant.adjacency().toarray()
    expected = np.zeros((4, 4))
    for a, b in [(0, 1), (1, 2), (0, 2), (2, 3)]:
        expected[a, b] = expected[b, a] = 1.0
    assert np.array_equal(adj, expected)
    assert list(triangle_pendant.degrees()) == [2, 2, 3, 1]
