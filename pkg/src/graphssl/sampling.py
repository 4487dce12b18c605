"""Stochastic-approximation solver driven by sampled node updates.

One step updates a single row of F along a sampled transition, weighted by
the likelihood ratio p/q that corrects for simulating the teleported chain
Q instead of the walk P:

    F[i, k] += eta_t * ratio(i, j) * (alpha * H[i] * F[j, k] - F[i, k]
                                      + (1 - alpha) * Y[i, k])

With these constants the closed-form solution is the unique fixed point of
the expected update. The update as sometimes stated elsewhere (H[i] and
alpha * Y) does not share that fixed point; it stays available behind
``compat_printed_update`` for comparison runs.
"""

from __future__ import annotations

import random
from bisect import bisect_left
from dataclasses import dataclass, field

import numpy as np

from .graph import FeatureMatrix, LabelAssignment, SimilarityGraph
from .metrics import TrajectoryRecord, classification_map, error_against
from .operators import WalkKernel, alpha_for
from .validation import (
    as_label_assignment,
    check_epsilon,
    check_labels_in_graph,
    check_mu,
    check_positive_degrees,
    check_sigma,
)

# -- step-size schedules --------------------------------------------------


class StepSchedule:
    def eta(self, t: int) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class DecreasingSchedule(StepSchedule):
    """eta_t = 1 / (2 + floor(t / c)); square-summable but not summable."""

    c: int

    def __post_init__(self):
        if self.c < 1:
            raise ValueError("decreasing schedule needs c >= 1")

    def eta(self, t: int) -> float:
        return 1.0 / (2 + t // self.c)


@dataclass(frozen=True)
class ConstantSchedule(StepSchedule):
    """Constant eta in (0, 1]; keeps tracking ability on changing graphs."""

    value: float

    def __post_init__(self):
        if not 0.0 < self.value <= 1.0:
            raise ValueError("constant step size must be in (0, 1]")

    def eta(self, t: int) -> float:
        return self.value


def decreasing(c: int) -> DecreasingSchedule:
    return DecreasingSchedule(c)


def constant(eta: float) -> ConstantSchedule:
    return ConstantSchedule(eta)


def parse_schedule(text: str) -> StepSchedule:
    """Parse ``dec:<c>`` or ``const:<eta>``."""
    kind, _, arg = text.partition(":")
    if kind == "dec" and arg:
        return decreasing(int(arg))
    if kind == "const" and arg:
        return constant(float(arg))
    raise ValueError(f"bad schedule {text!r}; expected dec:<c> or const:<eta>")


# -- selection policies ---------------------------------------------------


@dataclass(frozen=True)
class McmcPolicy:
    """Update the current state of the teleported Markov chain."""


@dataclass(frozen=True)
class RoundRobinPolicy:
    """Cycle node ids in ascending order; draw the partner from the Q row."""


@dataclass(frozen=True)
class NewNodeFocusPolicy:
    """Cycle the new node and its 1-hop neighbors in fixed (ascending) order."""

    node: int


SelectionPolicy = McmcPolicy | RoundRobinPolicy | NewNodeFocusPolicy


def parse_policy(text: str) -> SelectionPolicy:
    name = text.replace("_", "-")
    if name == "mcmc":
        return McmcPolicy()
    if name == "round-robin":
        return RoundRobinPolicy()
    raise ValueError(f"bad policy {text!r}; expected mcmc or round-robin")


# -- configuration ---------------------------------------------------------


@dataclass
class SolverConfig:
    """Shared solver parameters; alpha is derived from mu."""

    sigma: float = 0.5
    mu: float = 1.0
    epsilon: float = 0.1
    schedule: StepSchedule = field(default_factory=lambda: decreasing(1000))
    policy: SelectionPolicy = field(default_factory=McmcPolicy)
    seed: int | None = None
    initial: str = "labels"  # or "zeros"
    compat_printed_update: bool = False

    def __post_init__(self):
        check_sigma(self.sigma)
        check_mu(self.mu)
        check_epsilon(self.epsilon)
        if isinstance(self.schedule, str):
            self.schedule = parse_schedule(self.schedule)
        if isinstance(self.policy, str):
            self.policy = parse_policy(self.policy)
        if self.initial not in ("labels", "zeros"):
            raise ValueError("initial must be 'labels' or 'zeros'")

    @property
    def alpha(self) -> float:
        return alpha_for(self.mu)


# -- single-step contract operations on a static kernel --------------------


@dataclass
class WalkerState:
    """Current chain state, RNG, and step counter."""

    node: int
    rng: random.Random
    t: int = 0


def sample_next(walker: WalkerState, kernel: WalkKernel) -> int:
    """Advance the walker one step of Q: teleport w.p. eps, else a P draw."""
    i = walker.node
    nbr, _, cum = kernel.p_row(i)
    if not nbr:
        raise ValueError(f"node {i} has no neighbors; walk is stuck")
    rng = walker.rng
    if kernel.epsilon > 0.0 and rng.random() < kernel.epsilon:
        j = kernel.operator.ids[rng.randrange(kernel.n)]
    else:
        r = rng.random() * cum[-1]
        pos = bisect_left(cum, r)
        if pos >= len(nbr):
            pos = len(nbr) - 1
        j = nbr[pos]
    walker.node = j
    walker.t += 1
    return j


def likelihood_ratio(i: int, j: int, kernel: WalkKernel) -> float:
    """p(i,j) / q(i,j); zero when j is not a neighbor of i."""
    p = kernel.p(i, j)
    if p == 0.0:
        return 0.0
    return p / ((1.0 - kernel.epsilon) * p + kernel.epsilon / kernel.n)


def sampling_update(
    F: np.ndarray,
    i: int,
    j: int,
    eta: float,
    kernel: WalkKernel,
    Y: np.ndarray,
    alpha: float,
    compat_printed_update: bool = False,
) -> None:
    """Apply one update to row i of F in place (rows aligned with kernel ids)."""
    if eta < 0.0:
        raise ValueError("eta must be >= 0")
    ratio = likelihood_ratio(i, j, kernel)
    if ratio == 0.0 or eta == 0.0:
        return
    op = kernel.operator
    ri = op.row_index(i)
    rj = op.row_index(j)
    h = float(op.row_sums[ri])
    if compat_printed_update:
        bracket = h * F[rj] - F[ri] + alpha * Y[ri]
    else:
        bracket = alpha * h * F[rj] - F[ri] + (1.0 - alpha) * Y[ri]
    F[ri] += eta * ratio * bracket


# -- sampling engine --------------------------------------------------------


class SamplingEngine:
    """Stateful stepper shared by static runs and the dynamic simulator.

    Keeps F and the per-node transition rows keyed by node id, so rows
    survive node churn; any graph mutation invalidates the row cache
    wholesale (mutations are rare relative to steps).
    """

    def __init__(
        self,
        graph: SimilarityGraph,
        labels: LabelAssignment,
        config: SolverConfig,
        F0: FeatureMatrix | None = None,
        t0: int = 0,
        rng: random.Random | None = None,
    ):
        if graph.node_count() == 0:
            raise ValueError("graph is empty")
        check_labels_in_graph(labels, graph)
        # Zero-degree nodes are tolerated (the walk teleports off them and
        # never updates their rows); only operator construction rejects them.
        self.graph = graph
        self.labels = labels
        self.config = config
        self.k = labels.n_classes
        self.t = t0
        self.rng = rng if rng is not None else random.Random(config.seed)

        self.alpha = config.alpha
        self.eps = config.epsilon
        self.sigma = config.sigma
        self._hcoef = 1.0 if config.compat_printed_update else self.alpha
        self._ycoef = self.alpha if config.compat_printed_update else 1.0 - self.alpha

        sched = config.schedule
        self._sched_c = sched.c if isinstance(sched, DecreasingSchedule) else 0
        self._sched_eta = sched.value if isinstance(sched, ConstantSchedule) else 0.0

        self._zero_row = [0.0] * self.k  # shared, never mutated
        self._yterm: dict[int, list[float]] = {}
        for node, cls in labels.items():
            row = [0.0] * self.k
            row[cls] = self._ycoef
            self._yterm[node] = row

        if F0 is None:
            self.F: dict[int, list[float]] = {}
            for node in graph.ids():
                row = [0.0] * self.k
                cls = labels.class_of(node)
                if config.initial == "labels" and cls is not None:
                    row[cls] = 1.0
                self.F[node] = row
        else:
            self.F = {node: list(vals) for node, vals in zip(F0.ids, F0.values)}
            for node in graph.ids():
                if node not in self.F:
                    raise ValueError(f"F0 is missing a row for node {node}")

        self._rows: dict[int, tuple[list[int], list[float], list[float], float]] = {}
        self._version = graph.mutation_count
        self._n = graph.node_count()

        policy = config.policy
        if isinstance(policy, McmcPolicy):
            self._policy_kind = 0
        elif isinstance(policy, RoundRobinPolicy):
            self._policy_kind = 1
        elif isinstance(policy, NewNodeFocusPolicy):
            self._policy_kind = 2
            if not graph.has_node(policy.node):
                raise ValueError(f"focus node {policy.node} not in graph")
            if graph.degree(policy.node) == 0.0:
                raise ValueError(f"focus node {policy.node} is isolated")
            self._focus = policy.node
        else:
            raise TypeError(f"unknown policy {policy!r}")
        self._cycle: list[int] = []
        self._cycle_pos = 0
        self._walker = graph.node_at(self.rng.randrange(self._n))

    # -- churn hooks (used by the dynamic simulator) --

    def add_node_row(self, node: int) -> None:
        self.F[node] = [0.0] * self.k

    def drop_node_row(self, node: int) -> None:
        del self.F[node]

    def sync_label(self, node: int) -> None:
        """Refresh the label term for one node after a label change."""
        cls = self.labels.class_of(node)
        if cls is None:
            self._yterm.pop(node, None)
        else:
            row = [0.0] * self.k
            row[cls] = self._ycoef
            self._yterm[node] = row

    # -- stepping --

    def _refresh(self) -> None:
        self._rows.clear()
        self._version = self.graph.mutation_count
        self._n = self.graph.node_count()
        if not self.graph.has_node(self._walker):
            # chain state departed: restart uniformly
            self._walker = self.graph.node_at(self.rng.randrange(self._n))

    def _build_row(self, i: int):
        g = self.graph
        sigma = self.sigma
        di = g.degree(i)
        if di == 0.0:
            row = ([], [], [], 0.0)
            self._rows[i] = row
            return row
        scale = di**-sigma
        nbr_ids: list[int] = []
        bvals: list[float] = []
        h = 0.0
        for j, wij in g.neighbors(i):
            b = scale * wij * g.degree(j) ** (sigma - 1.0)
            nbr_ids.append(j)
            bvals.append(b)
            h += b
        cum: list[float] = []
        acc = 0.0
        for b in bvals:
            acc += b / h
            cum.append(acc)
        pvals = [b / h for b in bvals]
        row = (nbr_ids, pvals, cum, h)
        self._rows[i] = row
        return row

    def _next_cycle_node(self) -> int:
        g = self.graph
        while True:
            if self._cycle_pos >= len(self._cycle):
                if self._policy_kind == 1:
                    self._cycle = g.ids()
                else:
                    v = self._focus
                    self._cycle = [v] + [j for j, _ in g.neighbors(v)]
                self._cycle_pos = 0
            node = self._cycle[self._cycle_pos]
            self._cycle_pos += 1
            if g.has_node(node):
                return node

    def step(self) -> None:
        """One sampling update step."""
        g = self.graph
        if self._version != g.mutation_count:
            self._refresh()
        i = self._walker if self._policy_kind == 0 else self._next_cycle_node()
        row = self._rows.get(i)
        if row is None:
            row = self._build_row(i)
        nbr, pvals, cum, h = row
        rng = self.rng
        n = self._n
        eps = self.eps
        if not nbr:
            # isolated node: pure teleport, likelihood ratio is zero
            j = g.node_at(rng.randrange(n))
            p = 0.0
        elif eps > 0.0 and rng.random() < eps:
            j = g.node_at(rng.randrange(n))
            pos = bisect_left(nbr, j)
            p = pvals[pos] if pos < len(nbr) and nbr[pos] == j else 0.0
        else:
            r = rng.random() * cum[-1]
            pos = bisect_left(cum, r)
            if pos >= len(nbr):
                pos = len(nbr) - 1
            j = nbr[pos]
            p = pvals[pos]
        t = self.t
        if p > 0.0:
            c = self._sched_c
            eta = 1.0 / (2 + t // c) if c else self._sched_eta
            er = eta * (p / ((1.0 - eps) * p + eps / n))
            bh = self._hcoef * h
            fi = self.F[i]
            fj = self.F[j]
            yt = self._yterm.get(i, self._zero_row)
            for k in range(self.k):
                fi[k] += er * (bh * fj[k] - fi[k] + yt[k])
        if self._policy_kind == 0:
            self._walker = j
        self.t = t + 1

    def run_steps(self, count: int) -> None:
        step = self.step
        for _ in range(count):
            step()

    # -- views --

    def feature_matrix(self) -> FeatureMatrix:
        ids = self.graph.ids()
        values = np.array([self.F[i] for i in ids])
        return FeatureMatrix(ids, values)

    def classify_map(self) -> dict[int, int]:
        out = {}
        for node in self.graph.ids():
            row = self.F[node]
            best = 0
            bv = row[0]
            for k in range(1, self.k):
                if row[k] > bv:
                    bv = row[k]
                    best = k
            out[node] = best
        return out


# -- high-level runs --------------------------------------------------------


def run_sampling(
    graph: SimilarityGraph,
    labels: LabelAssignment,
    config: SolverConfig,
    iterations: int,
    truth: dict[int, int] | None = None,
    snapshot_features: bool = False,
) -> tuple[FeatureMatrix, TrajectoryRecord]:
    """Run ``iterations * N`` update steps on a static graph.

    One iteration is N steps (N = node count), matching the per-iteration
    work of one power-iteration sweep. The trajectory records error against
    ``truth`` when provided, starting with the initial state at iteration 0.
    """
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    labels = as_label_assignment(labels)
    engine = SamplingEngine(graph, labels, config)
    n = graph.node_count()
    record = TrajectoryRecord()
    if snapshot_features:
        record.feature_snapshots = {}

    def snapshot(iteration: int) -> None:
        if truth is not None:
            count, pct = error_against(engine.classify_map(), truth, labels)
        else:
            count, pct = None, None
        record.append(iteration, count, pct, graph.node_count())
        if snapshot_features:
            record.feature_snapshots[iteration] = {
                node: list(row) for node, row in engine.F.items()
            }

    snapshot(0)
    for it in range(1, iterations + 1):
        engine.run_steps(n)
        snapshot(it)
    return engine.feature_matrix(), record


def track_new_node(
    F: FeatureMatrix,
    graph: SimilarityGraph,
    labels: LabelAssignment,
    v: int,
    steps: int,
    config: SolverConfig,
    t0: int = 0,
    rng: random.Random | None = None,
) -> tuple[FeatureMatrix, list[list[float]]]:
    """Update F along the focus cycle of new node ``v`` for ``steps`` steps.

    Only rows of ``v`` and its 1-hop neighbors change. Returns the updated
    features and the per-step trace of ``v``'s row (including the initial
    state), for plotting how its class scores evolve.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if not graph.has_node(v):
        raise ValueError(f"node {v} not in graph")
    if graph.degree(v) == 0.0:
        raise ValueError(f"node {v} is isolated; nothing to sample")
    cfg = SolverConfig(
        sigma=config.sigma,
        mu=config.mu,
        epsilon=config.epsilon,
        schedule=config.schedule,
        policy=NewNodeFocusPolicy(v),
        seed=config.seed,
        initial=config.initial,
        compat_printed_update=config.compat_printed_update,
    )
    engine = SamplingEngine(graph, labels, cfg, F0=F, t0=t0, rng=rng)
    trace = [list(engine.F[v])]
    for _ in range(steps):
        engine.step()
        trace.append(list(engine.F[v]))
    return engine.feature_matrix(), trace
