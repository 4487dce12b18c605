"""Text file formats: edge lists, label files, positions, features, events.

All writers emit floats via repr (shortest round-trip form), so a seeded
run rewritten twice is byte-identical and every file reloads exactly.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .generators import SimulationEvent
from .graph import LabelAssignment, SimilarityGraph


def _data_lines(path):
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                yield lineno, line.split()


def read_edge_list(
    path,
    unit_weights: bool = False,
    n_nodes: int | None = None,
) -> SimilarityGraph:
    """Load `<u> <v> <w>` lines into a graph.

    Each undirected edge must appear once; duplicates (in either order) and
    self-loops are rejected. ``unit_weights`` replaces every weight with 1.
    """
    edges = []
    seen: set[tuple[int, int]] = set()
    for lineno, parts in _data_lines(path):
        if len(parts) not in (2, 3):
            raise ValueError(f"{path}:{lineno}: expected '<u> <v> [<w>]', got {parts}")
        u, v = int(parts[0]), int(parts[1])
        w = float(parts[2]) if len(parts) == 3 else 1.0
        if u < 0 or v < 0:
            raise ValueError(f"{path}:{lineno}: negative node id")
        if u == v:
            raise ValueError(f"{path}:{lineno}: self-loop on node {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ValueError(f"{path}:{lineno}: duplicate edge {key}")
        seen.add(key)
        edges.append((u, v, 1.0 if unit_weights else w))
    return SimilarityGraph.from_edges(edges, n_nodes=n_nodes)


def write_edge_list(path, graph: SimilarityGraph) -> None:
    with open(path, "w") as fh:
        for u, v, w in sorted(graph.edges()):
            fh.write(f"{u} {v} {repr(w)}\n")


def read_label_file(path, n_classes: int | None = None) -> LabelAssignment:
    """Load `<node-id> <class-index>` lines."""
    mapping: dict[int, int] = {}
    for lineno, parts in _data_lines(path):
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected '<node> <class>', got {parts}")
        node, cls = int(parts[0]), int(parts[1])
        if node in mapping:
            raise ValueError(f"{path}:{lineno}: node {node} labeled twice")
        mapping[node] = cls
    if not mapping:
        raise ValueError(f"{path}: no labels found")
    if n_classes is None:
        n_classes = max(mapping.values()) + 1
    return LabelAssignment(n_classes, mapping)


def write_label_file(path, labels) -> None:
    items = labels.items() if hasattr(labels, "items") else labels
    with open(path, "w") as fh:
        for node, cls in sorted(items):
            fh.write(f"{node} {cls}\n")


def read_class_map(path) -> dict[int, int]:
    """Label-file format read as a plain {node: class} dict (ground truth)."""
    return dict(read_label_file(path).items())


def read_positions(path) -> dict[int, tuple[float, float]]:
    pos: dict[int, tuple[float, float]] = {}
    for lineno, parts in _data_lines(path):
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected '<node> <x> <y>'")
        pos[int(parts[0])] = (float(parts[1]), float(parts[2]))
    return pos


def write_positions(path, positions: np.ndarray) -> None:
    with open(path, "w") as fh:
        for node, (x, y) in enumerate(np.asarray(positions, dtype=float)):
            fh.write(f"{node} {repr(x)} {repr(y)}\n")


def read_name_map(path) -> dict[int, str]:
    names: dict[int, str] = {}
    for lineno, parts in _data_lines(path):
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected '<node> <name>'")
        names[int(parts[0])] = parts[1]
    return names


def write_features_csv(path, ids, F: np.ndarray, classes: np.ndarray) -> None:
    """`node_id,f_0..f_{K-1},class` rows, one per node."""
    F = np.asarray(F, dtype=float)
    k = F.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_id"] + [f"f_{j}" for j in range(k)] + ["class"])
        for node, row, cls in zip(ids, F, classes):
            writer.writerow([node] + [repr(float(x)) for x in row] + [int(cls)])


def read_features_csv(path) -> tuple[list[int], np.ndarray, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[0] != "node_id" or header[-1] != "class":
            raise ValueError(f"unexpected features header in {path}: {header}")
        ids, rows, classes = [], [], []
        for line in reader:
            ids.append(int(line[0]))
            rows.append([float(x) for x in line[1:-1]])
            classes.append(int(line[-1]))
    return ids, np.array(rows), np.array(classes)


def write_sweep_csv(path, rows) -> None:
    """`sigma,mu,avg_error` rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sigma", "mu", "avg_error"])
        for sigma, mu, err in rows:
            writer.writerow([repr(float(sigma)), repr(float(mu)), repr(float(err))])


def read_sweep_csv(path) -> list[tuple[float, float, float]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["sigma", "mu", "avg_error"]:
            raise ValueError(f"unexpected sweep header in {path}: {header}")
        return [(float(a), float(b), float(c)) for a, b, c in reader]


def write_event_log(path, events) -> None:
    """`<time> <kind> <key>=<value>...` lines, one event per line."""
    with open(path, "w") as fh:
        for ev in events:
            details = " ".join(f"{k}={v}" for k, v in ev.details.items())
            fh.write(f"{repr(ev.time)} {ev.kind} {details}".rstrip() + "\n")


def read_event_log(path) -> list[SimulationEvent]:
    events = []
    for lineno, parts in _data_lines(path):
        if len(parts) < 2:
            raise ValueError(f"{path}:{lineno}: expected '<time> <kind> ...'")
        details = {}
        for item in parts[2:]:
            key, _, value = item.partition("=")
            details[key] = value
        events.append(SimulationEvent(float(parts[0]), parts[1], details))
    return events


def ensure_dir(path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path
