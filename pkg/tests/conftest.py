import numpy as np
import pytest

from graphssl import LabelAssignment, SimilarityGraph
from graphssl.datasets import load_les_miserables


def make_connected_graph(n, seed, unit_weights=False):
    """Random connected weighted graph: random tree plus ~n extra edges."""
    rng = np.random.default_rng(seed)
    g = SimilarityGraph()
    g.add_nodes(n)
    for i in range(1, n):
        j = int(rng.integers(0, i))
        w = 1.0 if unit_weights else float(rng.uniform(0.5, 2.0))
        g.add_edge(i, j, w)
    for _ in range(n):
        i, j = (int(x) for x in rng.integers(0, n, 2))
        if i != j and not g.has_edge(i, j):
            w = 1.0 if unit_weights else float(rng.uniform(0.5, 2.0))
            g.add_edge(i, j, w)
    return g


def make_labels(n, k, seed, per_class=1):
    """Distinct labeled nodes, one or more per class, classes 0..k-1."""
    rng = np.random.default_rng(seed)
    nodes = rng.permutation(n)[: k * per_class]
    return LabelAssignment(k, {int(nd): i % k for i, nd in enumerate(nodes)})


def path_graph(m=3):
    """Unit-weight path 0-1-...-(m-1)."""
    g = SimilarityGraph()
    g.add_nodes(m)
    for i in range(m - 1):
        g.add_edge(i, i + 1, 1.0)
    return g


def two_node_graph():
    g = SimilarityGraph()
    g.add_nodes(2)
    g.add_edge(0, 1, 1.0)
    return g


@pytest.fixture(scope="session")
def lesmis():
    graph, labels, truth, names = load_les_miserables()
    return graph, labels, truth, names
