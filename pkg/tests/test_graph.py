import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphssl import (
    CapacityError,
    EdgeError,
    FeatureMatrix,
    LabelAssignment,
    SimilarityGraph,
    UnknownNodeError,
)

from conftest import path_graph


def test_first_id_is_zero():
    g = SimilarityGraph()
    assert g.add_node() == 0
    assert g.node_count() == 1


def test_monotone_id_allocation():
    g = SimilarityGraph()
    g.add_nodes(3)
    assert g.ids() == [0, 1, 2]
    assert g.add_node() == 3


def test_ids_never_reused_after_removal():
    g = SimilarityGraph()
    g.add_nodes(3)
    g.remove_node(2)
    assert g.add_node() == 3


def test_cap_exceeded():
    g = SimilarityGraph(cap=2)
    g.add_nodes(2)
    with pytest.raises(CapacityError):
        g.add_node()
    g.remove_node(0)
    assert g.add_node() == 2  # room again after a departure


def test_add_edge_updates_degrees():
    g = SimilarityGraph()
    g.add_nodes(2)
    g.add_edge(0, 1, 1.0)
    assert g.degree(0) == 1.0
    assert g.degree(1) == 1.0
    assert g.weight(0, 1) == g.weight(1, 0) == 1.0


def test_add_edge_rejects_self_loop():
    g = SimilarityGraph()
    g.add_nodes(1)
    with pytest.raises(EdgeError, match="self-loop"):
        g.add_edge(0, 0, 1.0)


def test_add_edge_rejects_nonpositive_weight():
    g = SimilarityGraph()
    g.add_nodes(2)
    with pytest.raises(EdgeError, match="non-positive"):
        g.add_edge(0, 1, -2.0)
    with pytest.raises(EdgeError, match="non-positive"):
        g.add_edge(0, 1, 0.0)


def test_add_edge_rejects_duplicate():
    g = SimilarityGraph()
    g.add_nodes(2)
    g.add_edge(0, 1, 1.0)
    with pytest.raises(EdgeError, match="duplicate"):
        g.add_edge(1, 0, 2.0)


def test_add_edge_unknown_node():
    g = SimilarityGraph()
    g.add_nodes(1)
    with pytest.raises(UnknownNodeError):
        g.add_edge(0, 5, 1.0)


def test_remove_middle_of_path():
    g = path_graph(3)
    g.remove_node(1)
    assert g.edge_count() == 0
    assert g.degree(0) == 0.0
    assert g.degree(2) == 0.0
    assert not g.has_node(1)


def test_remove_isolated_node():
    g = path_graph(3)
    g.add_node()
    g.remove_node(3)
    assert g.node_count() == 3
    assert g.edge_count() == 2


def test_remove_unknown_node():
    g = SimilarityGraph()
    with pytest.raises(UnknownNodeError):
        g.remove_node(0)


def test_path_queries():
    g = path_graph(3)
    assert g.degree(1) == 2.0
    assert g.neighbors(0) == [(1, 1.0)]
    assert g.neighbors(1) == [(0, 1.0), (2, 1.0)]
    assert g.node_count() == 3


def test_degrees_match_recomputation_after_churn():
    rng = np.random.default_rng(5)
    g = SimilarityGraph()
    g.add_nodes(8)
    for _ in range(200):
        op = rng.integers(0, 3)
        ids = g.ids()
        if op == 0 or g.node_count() < 2:
            g.add_node()
        elif op == 1 and ids:
            g.remove_node(int(rng.choice(ids)))
        else:
            i, j = (int(x) for x in rng.choice(ids, 2, replace=False))
            if not g.has_edge(i, j):
                g.add_edge(i, j, float(rng.uniform(0.1, 3.0)))
        for node in g.ids():
            assert abs(g.degree(node) - g.recomputed_degree(node)) <= 1e-12


def test_rebuild_from_edge_list_reproduces_degrees():
    rng = np.random.default_rng(11)
    g = SimilarityGraph()
    g.add_nodes(12)
    for _ in range(30):
        i, j = (int(x) for x in rng.integers(0, 12, 2))
        if i != j and not g.has_edge(i, j):
            g.add_edge(i, j, float(rng.uniform(0.1, 2.0)))
    rebuilt = SimilarityGraph.from_edges(g.edges(), n_nodes=12)
    for node in g.ids():
        assert abs(g.degree(node) - rebuilt.degree(node)) <= 1e-12


def test_connectivity_helpers():
    g = path_graph(3)
    assert g.is_connected()
    g.add_node()
    assert not g.is_connected()
    assert len(g.connected_components()) == 2


# Random mutation sequences against a naive map-of-maps reference model.
@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 30), st.integers(0, 30)), max_size=60))
def test_mutations_match_reference_model(ops):
    g = SimilarityGraph()
    ref: dict[int, dict[int, float]] = {}
    next_id = 0
    for kind, a, b in ops:
        live = sorted(ref)
        if kind == 0:
            node = g.add_node()
            assert node == next_id
            ref[node] = {}
            next_id += 1
        elif kind == 1 and live:
            victim = live[a % len(live)]
            g.remove_node(victim)
            for nbr in ref.pop(victim):
                del ref[nbr][victim]
        elif kind == 2 and len(live) >= 2:
            u = live[a % len(live)]
            v = live[b % len(live)]
            if u != v and v not in ref[u]:
                w = 1.0 + (a + b) % 5
                g.add_edge(u, v, w)
                ref[u][v] = w
                ref[v][u] = w
        assert sorted(ref) == g.ids()
        for u in ref:
            assert g.neighbors(u) == sorted(ref[u].items())
            assert abs(g.degree(u) - sum(ref[u].values())) <= 1e-12
            for v, w in ref[u].items():
                assert g.weight(u, v) == w == g.weight(v, u)


def test_label_assignment_basics():
    labels = LabelAssignment(3, {0: 0, 5: 2})
    assert labels.class_of(5) == 2
    assert labels.class_of(1) is None
    assert labels.labeled_ids() == [0, 5]
    labels.remove(0)
    assert 0 not in labels


def test_label_assignment_rejects_bad_class():
    with pytest.raises(ValueError):
        LabelAssignment(2, {0: 2})
    with pytest.raises(ValueError):
        LabelAssignment(0)


def test_indicator_rows_sum_to_zero_or_one():
    g = path_graph(4)
    labels = LabelAssignment(2, {1: 0, 3: 1})
    Y = labels.indicator(g)
    assert Y.shape == (4, 2)
    assert sorted(Y.sum(axis=1).tolist()) == [0.0, 0.0, 1.0, 1.0]
    assert Y[1, 0] == 1.0 and Y[3, 1] == 1.0


def test_feature_matrix_tracks_ids():
    g = path_graph(3)
    fm = FeatureMatrix.zeros(g, 2)
    v = g.add_node()
    fm.add_row(v)
    assert fm.ids == [0, 1, 2, 3]
    assert fm.values.shape == (4, 2)
    fm.drop_row(1)
    assert fm.ids == [0, 2, 3]
    assert fm.row_of(2) == 1


def test_feature_matrix_rejects_nonfinite():
    with pytest.raises(ValueError, match="finite"):
        FeatureMatrix([0], np.array([[np.inf]]))
