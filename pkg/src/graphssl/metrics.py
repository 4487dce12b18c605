"""Classification decisions, misclassification counts, and trajectory records."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .graph import LabelAssignment

TRAJECTORY_HEADER = ["iteration", "error_count", "error_pct", "n_nodes"]


def classify(F: np.ndarray) -> np.ndarray:
    """Argmax class per row; ties go to the lowest class index."""
    F = np.asarray(F)
    if F.ndim != 2 or F.shape[1] < 1:
        raise ValueError("F must be a 2-D matrix with at least one class column")
    return F.argmax(axis=1)


def classification_map(F: np.ndarray, ids) -> dict[int, int]:
    """{node id: predicted class} for id-aligned rows of F."""
    pred = classify(F)
    ids = list(ids)
    if len(ids) != len(pred):
        raise ValueError("ids length does not match F rows")
    return {node: int(c) for node, c in zip(ids, pred)}


def error_against(
    pred: Mapping[int, int],
    truth: Mapping[int, int],
    labels: LabelAssignment,
) -> tuple[int, float]:
    """Misclassified count and percentage among unlabeled nodes.

    Labeled nodes are excluded from both the count and the denominator.
    """
    if set(pred) != set(truth):
        only_p = sorted(set(pred) - set(truth))[:5]
        only_t = sorted(set(truth) - set(pred))[:5]
        raise ValueError(
            f"node-set mismatch between prediction and truth "
            f"(pred-only {only_p}, truth-only {only_t})"
        )
    unlabeled = [n for n in pred if n not in labels]
    count = sum(1 for n in unlabeled if pred[n] != truth[n])
    pct = 100.0 * count / len(unlabeled) if unlabeled else 0.0
    return count, pct


@dataclass
class TrajectoryRow:
    iteration: int
    error_count: int | None
    error_pct: float | None
    n_nodes: int


@dataclass
class TrajectoryRecord:
    """Per-iteration error trace, with optional per-node class snapshots."""

    rows: list[TrajectoryRow] = field(default_factory=list)
    class_snapshots: dict[int, dict[int, int]] | None = None
    feature_snapshots: dict[int, dict[int, list[float]]] | None = None

    def append(
        self,
        iteration: int,
        error_count: int | None,
        error_pct: float | None,
        n_nodes: int,
    ) -> None:
        if self.rows and iteration <= self.rows[-1].iteration:
            raise ValueError("iteration indices must be strictly increasing")
        self.rows.append(TrajectoryRow(iteration, error_count, error_pct, n_nodes))

    def final_error_pct(self) -> float | None:
        for row in reversed(self.rows):
            if row.error_pct is not None:
                return row.error_pct
        return None

    def error_pcts(self) -> list[float]:
        return [r.error_pct for r in self.rows if r.error_pct is not None]


def write_trajectory_csv(path, record: TrajectoryRecord, avg_degree: float | None = None) -> None:
    """Emit the trajectory; unknown errors are left blank.

    When ``avg_degree`` is given an extra ``iteration_over_avg_degree``
    column is appended so plots can normalize the x-axis for sampling runs
    without re-deriving the graph density.
    """
    header = list(TRAJECTORY_HEADER)
    if avg_degree is not None:
        header.append("iteration_over_avg_degree")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in record.rows:
            out = [
                row.iteration,
                "" if row.error_count is None else row.error_count,
                "" if row.error_pct is None else repr(row.error_pct),
                row.n_nodes,
            ]
            if avg_degree is not None:
                out.append(repr(row.iteration / avg_degree))
            writer.writerow(out)


def read_trajectory_csv(path) -> TrajectoryRecord:
    record = TrajectoryRecord()
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[: len(TRAJECTORY_HEADER)] != TRAJECTORY_HEADER:
            raise ValueError(f"unexpected trajectory header in {path}: {header}")
        for line in reader:
            record.append(
                int(line[0]),
                int(line[1]) if line[1] else None,
                float(line[2]) if line[2] else None,
                int(line[3]),
            )
    return record
