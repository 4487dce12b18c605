"""Synthetic graphs: Gaussian mixture geometric graphs, stochastic block
models, and a dynamic block model driven by an M/M/K/K arrival process."""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .graph import LabelAssignment, SimilarityGraph
from .metrics import TrajectoryRecord, error_against
from .sampling import SamplingEngine, SolverConfig
from .validation import warn_if_disconnected

DEFAULT_CENTERS = ((0.0, 0.0), (4.0, 0.0), (2.0, 3.5))
DEFAULT_PROBS = (0.33, 0.33, 0.34)


@dataclass
class GaussianMixtureSpec:
    """Geometric graph: classes are planted 2-D Gaussians, nodes within
    ``radius`` of each other share a unit edge."""

    n: int = 500
    class_probs: tuple[float, ...] = DEFAULT_PROBS
    centers: tuple[tuple[float, float], ...] = DEFAULT_CENTERS
    std: float = 1.0
    radius: float = 1.0
    seed: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.radius < 0.0:
            raise ValueError("radius must be >= 0")
        if self.std <= 0.0:
            raise ValueError("std must be > 0")
        if len(self.centers) != len(self.class_probs):
            raise ValueError("need one center per class probability")
        if abs(sum(self.class_probs) - 1.0) > 1e-12:
            raise ValueError("class probabilities must sum to 1")

    @property
    def n_classes(self) -> int:
        return len(self.class_probs)


def generate_gaussian_mixture(
    spec: GaussianMixtureSpec,
) -> tuple[SimilarityGraph, dict[int, int], np.ndarray]:
    """Sample the mixture graph; returns (graph, planted classes, positions)."""
    rng = np.random.default_rng(spec.seed)
    classes = rng.choice(spec.n_classes, size=spec.n, p=list(spec.class_probs))
    centers = np.asarray(spec.centers, dtype=float)
    positions = centers[classes] + spec.std * rng.standard_normal((spec.n, 2))
    graph = SimilarityGraph()
    graph.add_nodes(spec.n)
    if spec.radius > 0.0 and spec.n > 1:
        pairs = cKDTree(positions).query_pairs(spec.radius)
        for u, v in sorted(pairs):
            graph.add_edge(int(u), int(v), 1.0)
    warn_if_disconnected(graph, "gaussian mixture output")
    truth = {i: int(c) for i, c in enumerate(classes)}
    return graph, truth, positions


def insert_mixture_node(
    graph: SimilarityGraph,
    positions: np.ndarray,
    spec: GaussianMixtureSpec,
    rng: np.random.Generator,
) -> tuple[int, int, np.ndarray]:
    """Add one node drawn from the same mixture, wired by the same radius.

    Returns (new id, planted class, its position). ``positions`` must be
    id-aligned for the existing nodes.
    """
    cls = int(rng.choice(spec.n_classes, p=list(spec.class_probs)))
    pos = np.asarray(spec.centers[cls]) + spec.std * rng.standard_normal(2)
    v = graph.add_node()
    dists = np.sqrt(((positions - pos) ** 2).sum(axis=1))
    for j in np.nonzero(dists <= spec.radius)[0]:
        graph.add_edge(v, int(j), 1.0)
    return v, cls, pos


def generate_sbm(
    sizes: tuple[int, ...],
    p_in: float,
    p_out: float,
    seed: int | None = None,
) -> tuple[SimilarityGraph, dict[int, int]]:
    """Static stochastic block model with unit edge weights."""
    if not 0.0 <= p_in <= 1.0 or not 0.0 <= p_out <= 1.0:
        raise ValueError("p_in and p_out must be in [0, 1]")
    rng = np.random.default_rng(seed)
    n = sum(sizes)
    truth: dict[int, int] = {}
    node = 0
    for cls, size in enumerate(sizes):
        for _ in range(size):
            truth[node] = cls
            node += 1
    graph = SimilarityGraph()
    graph.add_nodes(n)
    iu, ju = np.triu_indices(n, k=1)
    same = np.array([truth[int(a)] == truth[int(b)] for a, b in zip(iu, ju)])
    prob = np.where(same, p_in, p_out)
    mask = rng.random(len(iu)) < prob
    for a, b in zip(iu[mask], ju[mask]):
        graph.add_edge(int(a), int(b), 1.0)
    return graph, truth


def pick_labeled_nodes(
    graph: SimilarityGraph,
    truth: dict[int, int],
    per_class: int,
) -> LabelAssignment:
    """Label the ``per_class`` highest-degree nodes of each class.

    Ties break toward the lower node id.
    """
    n_classes = max(truth.values()) + 1
    members: dict[int, list[int]] = {c: [] for c in range(n_classes)}
    for node, cls in truth.items():
        members[cls].append(node)
    labels = LabelAssignment(n_classes)
    for cls, nodes in members.items():
        if len(nodes) < per_class:
            raise ValueError(
                f"class {cls} has {len(nodes)} members, needs >= {per_class}"
            )
        ranked = sorted(nodes, key=lambda i: (-graph.degree(i), i))
        for node in ranked[:per_class]:
            labels.set_label(node, cls)
    return labels


def replace_labeled_node(
    graph: SimilarityGraph,
    labels: LabelAssignment,
    truth: dict[int, int],
    departed: int,
    rng: random.Random,
) -> tuple[int | None, str]:
    """Choose the replacement label holder for a departing labeled node.

    Preference order: a uniformly random unlabeled neighbor of the departed
    node with the same planted class; failing that, the highest-degree
    unlabeled node of that class anywhere in the graph; failing that, None
    (the class temporarily loses a label). Call before removing the node.
    Returns (replacement id or None, rule used).
    """
    cls = labels.class_of(departed)
    if cls is None:
        raise ValueError(f"node {departed} is not labeled")
    candidates = [
        j
        for j, _ in graph.neighbors(departed)
        if truth.get(j) == cls and not labels.is_labeled(j)
    ]
    if candidates:
        return candidates[rng.randrange(len(candidates))], "neighbor"
    fallback = [
        i
        for i in graph.ids()
        if i != departed and truth.get(i) == cls and not labels.is_labeled(i)
    ]
    if fallback:
        best = max(fallback, key=lambda i: (graph.degree(i), -i))
        return best, "degree"
    return None, "none"


@dataclass
class DynamicSbmSpec:
    """Dynamic block model: Poisson arrivals, exponential lifetimes, cap K.

    Arrivals beyond the cap are dropped (Erlang loss), so the node count is
    an M/M/K/K occupancy with steady-state mean arrival_rate/departure_rate.
    """

    n_classes: int = 3
    class_probs: tuple[float, ...] | None = None  # default: uniform
    p_in: float = 0.1
    p_out: float = 0.005
    arrival_rate: float = 5e-5
    departure_rate: float = 1e-7
    cap: int = 1000
    initial_size: int = 500
    labeled_per_class: int = 2
    permanent_labels: bool = False
    seed: int | None = None

    def __post_init__(self):
        if self.class_probs is None:
            self.class_probs = tuple(1.0 / self.n_classes for _ in range(self.n_classes))
        if len(self.class_probs) != self.n_classes:
            raise ValueError("need one arrival probability per class")
        if abs(sum(self.class_probs) - 1.0) > 1e-12:
            raise ValueError("class probabilities must sum to 1")
        if not self.p_in > self.p_out:
            raise ValueError("p_in must exceed p_out")
        if self.arrival_rate <= 0.0 or self.departure_rate <= 0.0:
            raise ValueError("arrival and departure rates must be > 0")
        if self.cap < 1:
            raise ValueError("cap must be >= 1")
        if not 0 <= self.initial_size <= self.cap:
            raise ValueError("initial_size must be in [0, cap]")
        if self.labeled_per_class < 0:
            raise ValueError("labeled_per_class must be >= 0")


@dataclass
class SimulationEvent:
    """One entry of the audit log; times are non-decreasing."""

    time: float
    kind: str  # arrival | departure | label-replacement
    details: dict = field(default_factory=dict)


def _wire_arrival(graph, truth, node, cls, spec, rng):
    for other in graph.ids():
        if other == node:
            continue
        p = spec.p_in if truth[other] == cls else spec.p_out
        if rng.random() < p:
            graph.add_edge(node, other, 1.0)


def simulate_dynamic_sbm(
    spec: DynamicSbmSpec,
    solver_config: SolverConfig | None,
    duration: float,
    steps_per_iteration: int | None = None,
) -> tuple[TrajectoryRecord, list[SimulationEvent]]:
    """Co-simulate graph churn with the sampling solver.

    One sampling step runs per time unit; arrivals and departures are
    applied at their (continuous) event times before the step whose time
    they precede. One iteration is ``cap`` steps. With ``solver_config``
    None only the churn process runs, which is enough for occupancy
    studies and is orders of magnitude faster.
    """
    if duration <= 0:
        raise ValueError("duration must be > 0")
    rng = random.Random(spec.seed)
    steps_per_iteration = steps_per_iteration or spec.cap

    graph = SimilarityGraph(cap=spec.cap)
    truth: dict[int, int] = {}
    for i in range(spec.initial_size):
        node = graph.add_node()
        truth[node] = i % spec.n_classes
    for u in range(spec.initial_size):
        for v in range(u + 1, spec.initial_size):
            p = spec.p_in if truth[u] == truth[v] else spec.p_out
            if rng.random() < p:
                graph.add_edge(u, v, 1.0)

    if spec.labeled_per_class > 0 and spec.initial_size > 0:
        labels = pick_labeled_nodes(graph, truth, spec.labeled_per_class)
    else:
        labels = LabelAssignment(spec.n_classes)

    engine = None
    if solver_config is not None:
        engine = SamplingEngine(graph, labels, solver_config, rng=random.Random(rng.random()))

    cum_probs: list[float] = []
    acc = 0.0
    for p in spec.class_probs:
        acc += p
        cum_probs.append(acc)

    def draw_class() -> int:
        r = rng.random()
        for cls, c in enumerate(cum_probs):
            if r < c:
                return cls
        return spec.n_classes - 1

    # departure heap holds (time, node); entries for departed nodes are
    # impossible because each node gets exactly one lifetime
    departures: list[tuple[float, int]] = []
    for node in graph.ids():
        heapq.heappush(departures, (rng.expovariate(spec.departure_rate), node))
    next_arrival = rng.expovariate(spec.arrival_rate)

    events: list[SimulationEvent] = []
    record = TrajectoryRecord()

    def handle_arrival(at: float) -> None:
        nonlocal next_arrival
        cls = draw_class()
        if graph.node_count() >= spec.cap:
            events.append(
                SimulationEvent(at, "arrival", {"node": None, "class": cls, "blocked": True})
            )
        else:
            node = graph.add_node()
            truth[node] = cls
            _wire_arrival(graph, truth, node, cls, spec, rng)
            heapq.heappush(departures, (at + rng.expovariate(spec.departure_rate), node))
            if engine is not None:
                engine.add_node_row(node)
            events.append(
                SimulationEvent(at, "arrival", {"node": node, "class": cls, "blocked": False})
            )
        next_arrival = at + rng.expovariate(spec.arrival_rate)

    def handle_departure(at: float, node: int) -> None:
        was_labeled = labels.is_labeled(node)
        if was_labeled and spec.permanent_labels:
            return  # permanent labels never leave
        replacement = None
        rule = None
        if was_labeled:
            replacement, rule = replace_labeled_node(graph, labels, truth, node, rng)
        cls = truth.pop(node)
        graph.remove_node(node)
        if was_labeled:
            labels.remove(node)
        if engine is not None:
            engine.drop_node_row(node)
            if was_labeled:
                engine.sync_label(node)
        events.append(
            SimulationEvent(at, "departure", {"node": node, "class": cls, "labeled": was_labeled})
        )
        if was_labeled:
            if replacement is not None:
                labels.set_label(replacement, cls)
                if engine is not None:
                    engine.sync_label(replacement)
            events.append(
                SimulationEvent(
                    at,
                    "label-replacement",
                    {"class": cls, "old": node, "new": replacement, "rule": rule},
                )
            )

    def process_events_until(limit: float) -> None:
        nonlocal next_arrival
        while True:
            dep_time = departures[0][0] if departures else float("inf")
            when = min(next_arrival, dep_time)
            if when > limit:
                return
            if next_arrival <= dep_time:
                handle_arrival(next_arrival)
            else:
                _, node = heapq.heappop(departures)
                if graph.has_node(node):
                    handle_departure(dep_time, node)

    def snapshot(iteration: int) -> None:
        if engine is not None and truth:
            pred = engine.classify_map()
            live_truth = {n: truth[n] for n in pred}
            count, pct = error_against(pred, live_truth, labels)
        else:
            count, pct = None, None
        record.append(iteration, count, pct, graph.node_count())

    snapshot(0)
    total_steps = int(duration)
    if engine is None:
        # no per-step work: jump between iteration boundaries
        for it in range(1, total_steps // steps_per_iteration + 1):
            process_events_until(it * steps_per_iteration)
            snapshot(it)
        process_events_until(duration)
    else:
        for step in range(total_steps):
            process_events_until(step)
            if graph.node_count() > 0:
                engine.step()
            if (step + 1) % steps_per_iteration == 0:
                snapshot((step + 1) // steps_per_iteration)
        process_events_until(duration)
    return record, events


def occupancy_time_average(
    events: list[SimulationEvent],
    initial_size: int,
    window: tuple[float, float],
) -> float:
    """Exact time-weighted mean node count over ``window`` from the event log."""
    t0, t1 = window
    if not t1 > t0:
        raise ValueError("window must have positive length")
    size = initial_size
    now = 0.0
    acc = 0.0
    for ev in events:
        if ev.time > now:
            lo, hi = max(now, t0), min(ev.time, t1)
            if hi > lo:
                acc += size * (hi - lo)
            now = ev.time
        if ev.kind == "arrival" and not ev.details.get("blocked"):
            size += 1
        elif ev.kind == "departure":
            size -= 1
    if t1 > now:
        acc += size * (t1 - max(now, t0))
    return acc / (t1 - t0)
