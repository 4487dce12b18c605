"""Input validation helpers shared by the solvers, estimators, and CLI."""

from __future__ import annotations

import warnings
from typing import Mapping

from .graph import LabelAssignment, SimilarityGraph


class ZeroDegreeError(ValueError):
    """Operator construction requires strictly positive degrees."""

    def __init__(self, nodes):
        self.nodes = list(nodes)
        shown = ", ".join(str(n) for n in self.nodes[:10])
        more = "" if len(self.nodes) <= 10 else f" (+{len(self.nodes) - 10} more)"
        super().__init__(f"graph has zero-degree nodes: {shown}{more}")


def check_positive_degrees(graph: SimilarityGraph) -> None:
    bad = [i for i in graph.ids() if graph.degree(i) <= 0.0]
    if bad:
        raise ZeroDegreeError(bad)


def warn_if_disconnected(graph: SimilarityGraph, context: str = "") -> bool:
    """Return True (and warn) when the graph is disconnected."""
    if graph.is_connected():
        return False
    suffix = f" ({context})" if context else ""
    warnings.warn(
        f"graph is disconnected{suffix}; spectral guarantees weaken", stacklevel=2
    )
    return True


def check_sigma(sigma) -> float:
    sigma = float(sigma)
    if not sigma == sigma:  # NaN
        raise ValueError("sigma must be a real number")
    return sigma


def check_mu(mu) -> float:
    mu = float(mu)
    if not mu > 0.0:
        raise ValueError(f"mu must be > 0, got {mu}")
    return mu


def check_epsilon(epsilon, strict: bool = False) -> float:
    """Teleport weight; the CLI requires the open interval (0, 1)."""
    epsilon = float(epsilon)
    lo_ok = epsilon > 0.0 if strict else epsilon >= 0.0
    hi_ok = epsilon < 1.0 if strict else epsilon <= 1.0
    if not (lo_ok and hi_ok):
        bounds = "(0, 1)" if strict else "[0, 1]"
        raise ValueError(f"epsilon must be in {bounds}, got {epsilon}")
    return epsilon


def as_label_assignment(y, n_classes: int | None = None) -> LabelAssignment:
    """Coerce a mapping {node: class} (or LabelAssignment) to LabelAssignment."""
    if isinstance(y, LabelAssignment):
        return y
    if not isinstance(y, Mapping):
        raise TypeError("labels must be a LabelAssignment or a {node: class} mapping")
    if not y:
        raise ValueError("labels must contain at least one labeled node")
    if n_classes is None:
        n_classes = max(int(c) for c in y.values()) + 1
    return LabelAssignment(n_classes, y)


def check_labels_in_graph(labels: LabelAssignment, graph: SimilarityGraph) -> None:
    missing = [n for n in labels.labeled_ids() if not graph.has_node(n)]
    if missing:
        raise ValueError(f"labeled nodes not present in graph: {missing}")
