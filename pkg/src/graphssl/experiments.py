"""Experiment drivers shared by the CLI and the test suite."""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

import numpy as np

from .generators import GaussianMixtureSpec, generate_gaussian_mixture, insert_mixture_node, pick_labeled_nodes
from .graph import LabelAssignment, SimilarityGraph
from .metrics import error_against
from .operators import alpha_for, build_operator
from .power import power_solve
from .sampling import (
    McmcPolicy,
    SamplingEngine,
    SolverConfig,
    run_sampling,
    track_new_node,
)
from .metrics import classification_map


def derive_seed(seed: int | None, *keys: int) -> int:
    """Deterministic child seed for (seed, keys) stream splits."""
    ss = np.random.SeedSequence([0 if seed is None else int(seed), *keys])
    return int(ss.generate_state(1)[0])


def run_sweep(
    graph: SimilarityGraph,
    labels: LabelAssignment,
    truth: dict[int, int],
    sigmas,
    mus,
    repeats: int,
    method: str = "power",
    base_config: SolverConfig | None = None,
    iterations: int = 500,
    tol: float = 1e-10,
) -> list[tuple[float, float, float]]:
    """Average unlabeled error over the (sigma, mu) grid.

    Sampling repeats get independent seeds derived from (seed, cell,
    repeat); power repeats are deterministic, so averaging is a no-op.
    """
    if method not in ("power", "sampling"):
        raise ValueError(f"method must be power or sampling, got {method}")
    base = base_config or SolverConfig()
    rows = []
    for ci, sigma in enumerate(sigmas):
        for cj, mu in enumerate(mus):
            errs = []
            for rep in range(repeats):
                if method == "power":
                    operator = build_operator(graph, sigma)
                    Y = labels.indicator(graph)
                    F, _ = power_solve(
                        Y.copy(), operator, Y, alpha_for(mu), tol=tol, max_iters=iterations
                    )
                    pred = classification_map(F, operator.ids)
                else:
                    cfg = replace(
                        base,
                        sigma=sigma,
                        mu=mu,
                        seed=derive_seed(base.seed, ci, cj, rep),
                    )
                    F, _ = run_sampling(graph, labels, cfg, iterations)
                    pred = classification_map(F.values, F.ids)
                _, pct = error_against(pred, truth, labels)
                errs.append(pct)
            rows.append((float(sigma), float(mu), sum(errs) / len(errs)))
    return rows


@dataclass
class TrackResult:
    node: int
    planted_class: int
    predicted_class: int
    trace: list[list[float]]  # new node's row per post-phase record point
    pretrain_error_pct: float | None
    final_error_pct: float | None
    neighbor_count: int


def run_tracking_protocol(
    spec: GaussianMixtureSpec,
    config: SolverConfig,
    pretrain_iterations: int = 200,
    post_iterations: int = 20,
    follow: str = "mcmc",
    labeled_per_class: int = 2,
) -> TrackResult:
    """Pretrain on the mixture graph, insert one node, keep sampling.

    ``follow='mcmc'`` continues the chain over the grown graph for
    ``post_iterations`` iterations of N steps, recording the new node's row
    once per iteration. ``follow='focus'`` cycles the new node and its
    1-hop neighborhood instead, for ``post_iterations`` full cycles,
    recording per step. The step counter (hence the step-size schedule)
    continues across the two phases.
    """
    if follow not in ("mcmc", "focus"):
        raise ValueError(f"follow must be mcmc or focus, got {follow}")
    graph, truth, positions = generate_gaussian_mixture(spec)
    labels = pick_labeled_nodes(graph, truth, labeled_per_class)
    F, record = run_sampling(graph, labels, config, pretrain_iterations, truth=truth)
    pretrain_steps = pretrain_iterations * spec.n

    insert_rng = np.random.default_rng(derive_seed(config.seed, 1))
    v, planted, _pos = insert_mixture_node(graph, positions, spec, insert_rng)
    truth[v] = planted
    F.add_row(v)
    if graph.degree(v) == 0.0:
        raise ValueError(f"inserted node {v} landed isolated (no neighbors in radius)")

    post_rng = random.Random(derive_seed(config.seed, 2))
    trace: list[list[float]] = []
    if follow == "mcmc":
        cfg = replace(config, policy=McmcPolicy())
        engine = SamplingEngine(graph, labels, cfg, F0=F, t0=pretrain_steps, rng=post_rng)
        n = graph.node_count()
        trace.append(list(engine.F[v]))
        for _ in range(post_iterations):
            engine.run_steps(n)
            trace.append(list(engine.F[v]))
        F_out = engine.feature_matrix()
        pred = engine.classify_map()
    else:
        cycle_len = 1 + len(graph.neighbors(v))
        F_out, trace = track_new_node(
            F, graph, labels, v, post_iterations * cycle_len, config,
            t0=pretrain_steps, rng=post_rng,
        )
        pred = classification_map(F_out.values, F_out.ids)

    _, final_pct = error_against(pred, truth, labels)
    return TrackResult(
        node=v,
        planted_class=planted,
        predicted_class=pred[v],
        trace=trace,
        pretrain_error_pct=record.final_error_pct(),
        final_error_pct=final_pct,
        neighbor_count=len(graph.neighbors(v)),
    )
