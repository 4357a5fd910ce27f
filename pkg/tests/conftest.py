import numpy as np
import pytest

from simplexrank import clique_lift, from_edge_list


@pytest.fixture
def triangle_pendant():
    """Triangle 0-1-2 plus pendant node 3 hanging off node 2, lifted to F=2."""
    return clique_lift(from_edge_list([(0, 1), (1, 2), (0, 2), (2, 3)]), 2)


@pytest.fixture
def two_triangles():
    # triangles 012 and 123 sharing edge 12
    edges = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]
    return clique_lift(from_edge_list(edges), 2)


@pytest.fixture
def k4():
    edges = [(a, b) for a in range(4) for b in range(a + 1, 4)]
    return clique_lift(from_edge_list(edges), 3)


def random_lifted(seed, n_max=30, p=0.3, f_max=3):
    """A clique-lifted G(n, p) complex with at least one edge."""
    rng = np.random.default_rng(seed)
    while True:
        n = int(rng.integers(4, n_max + 1))
        mask = rng.random((n, n)) < p
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if mask[i, j]]
        if edges:
            used = sorted({v for e in edges for v in e})
            relabel = {v: i for i, v in enumerate(used)}
            edges = [(relabel[a], relabel[b]) for a, b in edges]
            f = int(rng.integers(1, f_max + 1))
            return clique_lift(from_edge_list(edges), f)
