import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from classcontrast.graph import AttributedGraph  # noqa: E402

DATA = Path(__file__).parent / "data"


def clique_edges(nodes):
    return [(i, j) for a, i in enumerate(nodes) for j in nodes[a + 1:]]


@pytest.fixture
def triangle():
    return AttributedGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)], np.ones((3, 1)), ["x"], ["a", "b", "c"])


@pytest.fixture
def bridged_cliques():
    """Two 4-cliques {0..3} and {4..7} joined by the edge 3-4."""
    edges = clique_edges([0, 1, 2, 3]) + clique_edges([4, 5, 6, 7]) + [(3, 4)]
    return AttributedGraph.from_edges(8, edges, np.ones((8, 1)))


@pytest.fixture
def clique_with_tail():
    """4-clique {0,1,2,3} plus node 4 hanging off node 3; one all-ones attribute."""
    edges = clique_edges([0, 1, 2, 3]) + [(3, 4)]
    return AttributedGraph.from_edges(5, edges, np.ones((5, 1)))


def random_graph(rng, n, p=0.45, d=3, weighted=False, binary=True):
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                w = int(rng.integers(1, 4)) if weighted else 1
                edges.append((i, j, w))
    if binary:
        attrs = (rng.random((n, d)) < 0.5).astype(float)
    else:
        attrs = np.round(rng.random((n, d)) * 4) / 4
    return edges, attrs
