"""Hub/fringe operators against an independent dense construction."""

import numpy as np
import pytest
from scipy.io import mmread

from simplexrank import (
    ValidationError,
    build_operator,
    build_operators,
    chebyshev_apply,
    clique_lift,
    from_edge_list,
    hub_adjacency,
    hub_laplacian,
    incidence_matrix,
)
from simplexrank.operators import dump_operator

from conftest import random_lifted


def dense_adjacency(cx, h, f):
    """Same normalization assembled densely from scratch."""
    b = np.zeros((cx.layer_size(h), cx.layer_size(f)))
    rows_h = [set(r) for r in cx.layer(h)]
    rows_f = [set(r) for r in cx.layer(f)]
    for i, a in enumerate(rows_h):
        for j, c in enumerate(rows_f):
            if (h < f and a < c) or (h > f and c < a):
                b[i, j] = 1.0
    d_hub = b.sum(axis=1)
    d_fringe = b.sum(axis=0)
    inv_sqrt = np.where(d_hub > 0, d_hub, 1.0) ** -0.5 * (d_hub > 0)
    inv = np.where(d_fringe > 0, d_fringe, 1.0) ** -1.0 * (d_fringe > 0)
    a = (inv_sqrt[:, None] * b) @ (inv[:, None] * b.T) * inv_sqrt[None, :]
    return (a + a.T) / 2


def test_hand_computed_k3_node_edge_adjacency():
    # K3, hub nodes, fringe edges: B B^T / 4 worked out by hand
    cx = clique_lift(from_edge_list([(0, 1), (0, 2), (1, 2)]), 1)
    a = hub_adjacency(incidence_matrix(cx, 0, 1)).adjacency.toarray()
    expected = np.array(
        [[0.5, 0.25, 0.25], [0.25, 0.5, 0.25], [0.25, 0.25, 0.5]]
    )
    assert np.allclose(a, expected, atol=1e-15)


def test_adjacency_matches_dense_oracle():
    for seed in range(25):
        cx = random_lifted(seed, n_max=14)
        orders = [h for h in cx.orders if cx.layer_size(h)]
        for h in orders:
            for f in orders:
                if h == f:
                    continue
                got = build_operator(cx, h, f).adjacency.toarray()
                assert np.allclose(got, dense_adjacency(cx, h, f), atol=1e-12)


def test_adjacency_is_exactly_symmetric_and_bounded():
    for seed in range(40):
        cx = random_lifted(seed)
        for f, op in build_operators(cx, 0).items():
            a = op.adjacency.toarray()
            assert np.array_equal(a, a.T), f"asymmetry at fringe {f}"
            eigs = np.linalg.eigvalsh(a)
            assert eigs.min() >= -1e-10
            assert eigs.max() <= 1.0 + 1e-10


def test_laplacian_is_psd_with_zero_bottom_eigenvalue(two_triangles):
    for f in (1, 2):
        lap = hub_laplacian(build_operator(two_triangles, 0, f)).toarray()
        eigs = np.linalg.eigvalsh(lap)
        assert abs(eigs.min()) <= 1e-10
        assert eigs.max() <= 2.0 + 1e-10


def test_zero_degree_hub_rows_stay_zero(triangle_pendant):
    # node 3 touches no triangle; its row and column must be all zero
    a = build_operator(triangle_pendant, 0, 2).adjacency.toarray()
    assert np.all(a[3] == 0.0)
    assert np.all(a[:, 3] == 0.0)
    assert np.all(np.isfinite(a))


def test_build_operators_skips_hub_and_empty_layers():
    star = clique_lift(from_edge_list([(0, 1), (0, 2), (0, 3)]), 2)
    ops = build_operators(star, 0)
    assert sorted(ops) == [1]  # layer 2 is empty, hub layer skipped
    both = build_operators(clique_lift(from_edge_list([(0, 1), (0, 2), (1, 2)]), 2), 0)
    assert sorted(both) == [1, 2]


def test_operator_records_degrees(two_triangles):
    op = build_operator(two_triangles, 1, 2)
    b = incidence_matrix(two_triangles, 1, 2).toarray()
    assert np.array_equal(op.hub_degrees, b.sum(axis=1))
    assert np.array_equal(op.fringe_degrees, b.sum(axis=0))


# -- Chebyshev -------------------------------------------------------------


def eigh_filter(a, x, k):
    """T_k(A) X through a full eigendecomposition."""
    w, u = np.linalg.eigh(a)
    tk = np.cos(k * np.arccos(np.clip(w, -1.0, 1.0)))
    return u @ np.diag(tk) @ u.T @ x


def test_chebyshev_first_terms_are_identity_and_adjacency(two_triangles):
    op = build_operator(two_triangles, 0, 1)
    x = np.random.default_rng(0).normal(size=(4, 3))
    z = chebyshev_apply(op.adjacency, x, 2)
    assert len(z) == 3
    assert np.array_equal(z[0], x)
    assert np.allclose(z[1], op.adjacency @ x, atol=1e-14)


def test_chebyshev_matches_eigendecomposition_oracle():
    rng = np.random.default_rng(3)
    for seed in range(15):
        cx = random_lifted(seed, n_max=16)
        for f, op in build_operators(cx, 0).items():
            n = op.adjacency.shape[0]
            x = rng.normal(size=(n, 2))
            z = chebyshev_apply(op.adjacency, x, 5)
            dense = op.adjacency.toarray()
            for k in range(6):
                assert np.abs(z[k] - eigh_filter(dense, x, k)).max() < 1e-6


def test_chebyshev_validates_shapes(two_triangles):
    op = build_operator(two_triangles, 0, 1)
    with pytest.raises(ValidationError):
        chebyshev_apply(op.adjacency, np.zeros((3, 2)), 2)
    with pytest.raises(ValidationError):
        chebyshev_apply(op.adjacency, np.zeros((4, 2)), -1)


def test_dump_operator_round_trips(tmp_path, two_triangles):
    op = build_operator(two_triangles, 0, 2)
    path = tmp_path / "a_0_2.mtx"
    dump_operator(op, path)
    back = mmread(path).toarray()
    assert np.allclose(back, op.adjacency.toarray(), atol=1e-12)
