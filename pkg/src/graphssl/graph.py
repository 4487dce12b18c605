"""Weighted undirected similarity graph with stable node identities.

Node ids are non-negative integers allocated monotonically and never reused,
so logs and trajectories stay unambiguous when nodes churn. Edges carry a
positive weight and are stored symmetrically; self-loops are rejected.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Iterator, Mapping

import numpy as np


class GraphError(Exception):
    """Base class for graph construction and mutation errors."""


class UnknownNodeError(GraphError):
    def __init__(self, node):
        super().__init__(f"unknown node id: {node}")
        self.node = node


class CapacityError(GraphError):
    """Raised when add_node would exceed the configured node cap."""

    def __init__(self, cap):
        super().__init__(f"graph is at its capacity of {cap} nodes")
        self.cap = cap


class EdgeError(GraphError):
    """Self-loop, duplicate edge, or non-positive weight."""


class SimilarityGraph:
    """Undirected weighted graph with incremental weighted degrees.

    Parameters
    ----------
    cap : int, optional
        Maximum number of live nodes. ``add_node`` raises
        :class:`CapacityError` beyond it (blocked-arrival semantics).
    """

    def __init__(self, cap: int | None = None):
        if cap is not None and cap < 1:
            raise ValueError("cap must be >= 1")
        self.cap = cap
        self._adj: dict[int, dict[int, float]] = {}
        self._degree: dict[int, float] = {}
        self._next_id = 0
        # Arbitrary-order live list with positions, for O(1) removal and
        # O(1) uniform draws. Order is deterministic given the op sequence.
        self._live: list[int] = []
        self._pos: dict[int, int] = {}
        self._n_edges = 0
        # Bumped on every mutation; lets downstream caches detect staleness.
        self.mutation_count = 0

    # -- mutation ---------------------------------------------------------

    def add_node(self) -> int:
        """Create a fresh isolated node and return its id."""
        if self.cap is not None and len(self._adj) >= self.cap:
            raise CapacityError(self.cap)
        node = self._next_id
        self._next_id += 1
        self._adj[node] = {}
        self._degree[node] = 0.0
        self._pos[node] = len(self._live)
        self._live.append(node)
        self.mutation_count += 1
        return node

    def add_nodes(self, count: int) -> list[int]:
        return [self.add_node() for _ in range(count)]

    def remove_node(self, node: int) -> None:
        """Remove ``node`` and all incident edges."""
        if node not in self._adj:
            raise UnknownNodeError(node)
        for nbr, w in self._adj[node].items():
            del self._adj[nbr][node]
            self._degree[nbr] -= w
            self._n_edges -= 1
        del self._adj[node]
        del self._degree[node]
        pos = self._pos.pop(node)
        last = self._live.pop()
        if last != node:
            self._live[pos] = last
            self._pos[last] = pos
        self.mutation_count += 1

    def add_edge(self, u: int, v: int, weight: float = 1.0) -> None:
        """Store the symmetric edge ``(u, v)`` with a positive weight."""
        if u == v:
            raise EdgeError(f"self-loop on node {u} is not allowed")
        if u not in self._adj:
            raise UnknownNodeError(u)
        if v not in self._adj:
            raise UnknownNodeError(v)
        if v in self._adj[u]:
            raise EdgeError(f"duplicate edge ({u}, {v})")
        weight = float(weight)
        if not weight > 0.0 or not np.isfinite(weight):
            raise EdgeError(f"edge ({u}, {v}) has non-positive weight {weight}")
        self._adj[u][v] = weight
        self._adj[v][u] = weight
        self._degree[u] += weight
        self._degree[v] += weight
        self._n_edges += 1
        self.mutation_count += 1

    # -- queries ----------------------------------------------------------

    def has_node(self, node: int) -> bool:
        return node in self._adj

    def has_edge(self, u: int, v: int) -> bool:
        return u in self._adj and v in self._adj[u]

    def weight(self, u: int, v: int) -> float:
        if u not in self._adj:
            raise UnknownNodeError(u)
        if v not in self._adj:
            raise UnknownNodeError(v)
        return self._adj[u].get(v, 0.0)

    def degree(self, node: int) -> float:
        """Weighted degree d(i): sum of incident edge weights."""
        if node not in self._degree:
            raise UnknownNodeError(node)
        return self._degree[node]

    def neighbors(self, node: int) -> list[tuple[int, float]]:
        """Neighbors of ``node`` as (id, weight) pairs in ascending id order."""
        if node not in self._adj:
            raise UnknownNodeError(node)
        return sorted(self._adj[node].items())

    def node_count(self) -> int:
        return len(self._adj)

    def edge_count(self) -> int:
        return self._n_edges

    def ids(self) -> list[int]:
        """Live node ids in ascending order (the canonical row order)."""
        return sorted(self._adj)

    def node_at(self, position: int) -> int:
        """Live node at ``position`` in an arbitrary but stable enumeration.

        O(1); intended for uniform random draws over live nodes.
        """
        return self._live[position]

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """Each stored edge once, as (u, v, w) with u < v."""
        for u, nbrs in self._adj.items():
            for v, w in nbrs.items():
                if u < v:
                    yield u, v, w

    def degrees(self) -> np.ndarray:
        """Weighted degrees aligned with :meth:`ids`."""
        return np.array([self._degree[i] for i in self.ids()])

    def recomputed_degree(self, node: int) -> float:
        """Degree recomputed from stored edges (consistency oracle)."""
        if node not in self._adj:
            raise UnknownNodeError(node)
        return float(sum(self._adj[node].values()))

    def connected_components(self) -> list[set[int]]:
        seen: set[int] = set()
        comps = []
        for start in self._adj:
            if start in seen:
                continue
            comp = {start}
            queue = deque([start])
            while queue:
                u = queue.popleft()
                for v in self._adj[u]:
                    if v not in comp:
                        comp.add(v)
                        queue.append(v)
            seen |= comp
            comps.append(comp)
        return comps

    def is_connected(self) -> bool:
        return len(self._adj) <= 1 or len(self.connected_components()) == 1

    def copy(self) -> "SimilarityGraph":
        g = SimilarityGraph(cap=self.cap)
        g._adj = {u: dict(nbrs) for u, nbrs in self._adj.items()}
        g._degree = dict(self._degree)
        g._next_id = self._next_id
        g._live = list(self._live)
        g._pos = dict(self._pos)
        g._n_edges = self._n_edges
        return g

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[int, int, float]],
        n_nodes: int | None = None,
        cap: int | None = None,
    ) -> "SimilarityGraph":
        """Build a graph from (u, v, w) triples.

        Ids referenced by the edges are created as needed; ``n_nodes`` forces
        at least ids ``0..n_nodes-1`` to exist (isolated nodes allowed).
        """
        edges = list(edges)
        max_id = -1
        for u, v, _ in edges:
            max_id = max(max_id, u, v)
        if n_nodes is not None:
            max_id = max(max_id, n_nodes - 1)
        g = cls(cap=cap)
        g.add_nodes(max_id + 1)
        for u, v, w in edges:
            g.add_edge(u, v, w)
        return g

    def __repr__(self):
        return f"<SimilarityGraph {self.node_count()} nodes, {self.edge_count()} edges>"


class LabelAssignment:
    """Map from labeled node id to class index in {0..n_classes-1}."""

    def __init__(self, n_classes: int, mapping: Mapping[int, int] | None = None):
        if n_classes < 1:
            raise ValueError("n_classes must be >= 1")
        self.n_classes = n_classes
        self._map: dict[int, int] = {}
        if mapping:
            for node, cls in mapping.items():
                self.set_label(node, cls)

    def set_label(self, node: int, cls: int) -> None:
        cls = int(cls)
        if not 0 <= cls < self.n_classes:
            raise ValueError(f"class {cls} out of range [0, {self.n_classes})")
        self._map[int(node)] = cls

    def remove(self, node: int) -> None:
        if node not in self._map:
            raise UnknownNodeError(node)
        del self._map[node]

    def class_of(self, node: int) -> int | None:
        return self._map.get(node)

    def is_labeled(self, node: int) -> bool:
        return node in self._map

    def labeled_ids(self) -> list[int]:
        return sorted(self._map)

    def items(self):
        return self._map.items()

    def __len__(self):
        return len(self._map)

    def __contains__(self, node):
        return node in self._map

    def copy(self) -> "LabelAssignment":
        return LabelAssignment(self.n_classes, self._map)

    def indicator(self, graph: SimilarityGraph) -> np.ndarray:
        """The N x K indicator matrix Y aligned with ``graph.ids()``."""
        ids = graph.ids()
        Y = np.zeros((len(ids), self.n_classes))
        row = {node: r for r, node in enumerate(ids)}
        for node, cls in self._map.items():
            if node not in row:
                raise UnknownNodeError(node)
            Y[row[node], cls] = 1.0
        return Y


class FeatureMatrix:
    """Dense N x K classification function with id-aligned rows.

    Rows follow ascending node id; because ids are allocated monotonically,
    a newly added node's row is always appended at the end.
    """

    def __init__(self, ids: Iterable[int], values: np.ndarray):
        self.ids = list(ids)
        values = np.asarray(values, dtype=float)
        if values.ndim != 2 or values.shape[0] != len(self.ids):
            raise ValueError("values must be 2-D with one row per id")
        if not np.all(np.isfinite(values)):
            raise ValueError("feature values must be finite")
        if sorted(self.ids) != self.ids:
            raise ValueError("ids must be in ascending order")
        self.values = values
        self._row = {node: r for r, node in enumerate(self.ids)}

    @property
    def n_classes(self) -> int:
        return self.values.shape[1]

    @classmethod
    def zeros(cls, graph: SimilarityGraph, n_classes: int) -> "FeatureMatrix":
        ids = graph.ids()
        return cls(ids, np.zeros((len(ids), n_classes)))

    @classmethod
    def from_labels(cls, graph: SimilarityGraph, labels: LabelAssignment) -> "FeatureMatrix":
        return cls(graph.ids(), labels.indicator(graph))

    def row_of(self, node: int) -> int:
        if node not in self._row:
            raise UnknownNodeError(node)
        return self._row[node]

    def row(self, node: int) -> np.ndarray:
        return self.values[self.row_of(node)]

    def add_row(self, node: int) -> None:
        """Append an all-zero row for a freshly allocated node id."""
        if self.ids and node <= self.ids[-1]:
            raise ValueError(f"node {node} does not extend the id order")
        self._row[node] = len(self.ids)
        self.ids.append(node)
        self.values = np.vstack([self.values, np.zeros((1, self.n_classes))])

    def drop_row(self, node: int) -> None:
        r = self.row_of(node)
        self.values = np.delete(self.values, r, axis=0)
        self.ids.pop(r)
        self._row = {n: i for i, n in enumerate(self.ids)}

    def as_dict(self) -> dict[int, np.ndarray]:
        return {node: self.values[r].copy() for node, r in self._row.items()}

    def copy(self) -> "FeatureMatrix":
        return FeatureMatrix(self.ids, self.values.copy())
