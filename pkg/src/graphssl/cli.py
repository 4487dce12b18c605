"""Command-line interface: solve, sweep, generate, simulate, track.

Every seeded subcommand is bitwise reproducible: running it twice with the
same arguments produces identical output files.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import datasets, fileio
from .experiments import run_sweep, run_tracking_protocol
from .generators import (
    DynamicSbmSpec,
    GaussianMixtureSpec,
    generate_gaussian_mixture,
    generate_sbm,
    simulate_dynamic_sbm,
)
from .graph import GraphError
from .metrics import classification_map, classify, error_against, write_trajectory_csv, TrajectoryRecord
from .operators import alpha_for, build_operator
from .power import power_solve
from .sampling import SolverConfig, parse_policy, parse_schedule, run_sampling
from .validation import ZeroDegreeError, check_epsilon, check_mu


class CliError(Exception):
    """User-facing failure; printed without a traceback, exit status 2."""


def _require_file(path: str | None, what: str) -> Path:
    if path is None:
        raise CliError(f"missing required {what} path")
    p = Path(path)
    if not p.is_file():
        raise CliError(f"{what} file not found: {p}")
    return p


def _load_inputs(args):
    """Graph, labels, optional truth from --dataset or from file paths."""
    if getattr(args, "dataset", None):
        if args.dataset != "lesmis":
            raise CliError(f"unknown bundled dataset: {args.dataset}")
        graph, labels, truth, _names = datasets.load_les_miserables(
            unit_weights=not args.keep_weights
        )
        return graph, labels, truth
    graph = fileio.read_edge_list(
        _require_file(args.graph, "graph"), unit_weights=args.unit_weights
    )
    labels = fileio.read_label_file(_require_file(args.labels, "labels"))
    truth = None
    if getattr(args, "truth", None):
        truth = fileio.read_class_map(_require_file(args.truth, "truth"))
    return graph, labels, truth


def _solver_config(args) -> SolverConfig:
    check_epsilon(args.epsilon, strict=True)
    check_mu(args.mu)
    return SolverConfig(
        sigma=args.sigma,
        mu=args.mu,
        epsilon=args.epsilon,
        schedule=parse_schedule(args.schedule),
        policy=parse_policy(args.policy),
        seed=args.seed,
        initial=args.initial,
        compat_printed_update=args.compat_printed_update,
    )


def cmd_solve(args) -> int:
    graph, labels, truth = _load_inputs(args)
    out = fileio.ensure_dir(args.out_dir)
    if args.method == "power":
        operator = build_operator(graph, args.sigma)
        Y = labels.indicator(graph)
        F0 = Y.copy() if args.initial == "labels" else np.zeros_like(Y)
        record = TrajectoryRecord()

        def on_iteration(t, F):
            if truth is not None:
                pred = classification_map(F, operator.ids)
                count, pct = error_against(pred, truth, labels)
            else:
                count, pct = None, None
            record.append(t, count, pct, graph.node_count())

        F, report = power_solve(
            F0, operator, Y, alpha_for(args.mu),
            tol=args.tol, max_iters=args.iters, workers=args.workers,
            on_iteration=on_iteration,
        )
        ids = list(operator.ids)
        write_trajectory_csv(out / "trajectory.csv", record)
        summary = (
            f"power: {report.iterations} iterations, "
            f"final step {report.final_step_inf:.3e} (inf-norm), "
            f"converged={report.converged}"
        )
    else:
        config = _solver_config(args)
        fm, record = run_sampling(graph, labels, config, args.iters, truth=truth)
        F, ids = fm.values, fm.ids
        avg_degree = 2.0 * graph.edge_count() / graph.node_count()
        write_trajectory_csv(out / "trajectory.csv", record, avg_degree=avg_degree)
        summary = f"sampling: {args.iters} iterations of {graph.node_count()} steps, seed={args.seed}"

    pred = classify(F)
    fileio.write_features_csv(out / "features.csv", ids, F, pred)
    if truth is not None:
        count, pct = error_against(dict(zip(ids, pred.tolist())), truth, labels)
        summary += f", error {count} nodes ({pct:.2f}% of unlabeled)"
    print(summary)
    print(f"wrote {out / 'features.csv'} and {out / 'trajectory.csv'}")
    return 0


def cmd_sweep(args) -> int:
    graph, labels, truth = _load_inputs(args)
    if truth is None:
        raise CliError("sweep needs ground-truth classes (--truth or --dataset)")
    sigmas = [float(s) for s in args.sigma_list.split(",")]
    mus = [float(m) for m in args.mu_list.split(",")]
    config = _solver_config(args)
    rows = run_sweep(
        graph, labels, truth, sigmas, mus, args.repeats,
        method=args.method, base_config=config, iterations=args.iters, tol=args.tol,
    )
    out = fileio.ensure_dir(args.out_dir)
    fileio.write_sweep_csv(out / "sweep.csv", rows)
    best = min(rows, key=lambda r: r[2])
    print(f"sweep: {len(rows)} cells, best sigma={best[0]} mu={best[1]} avg_error={best[2]:.3f}%")
    print(f"wrote {out / 'sweep.csv'}")
    return 0


def cmd_generate(args) -> int:
    out = fileio.ensure_dir(args.out_dir)
    if args.family == "gaussian":
        spec = GaussianMixtureSpec(
            n=args.n, std=args.std, radius=args.radius, seed=args.seed
        )
        graph, truth, positions = generate_gaussian_mixture(spec)
        fileio.write_edge_list(out / "gaussian.edges", graph)
        fileio.write_label_file(out / "gaussian.labels", truth.items())
        fileio.write_positions(out / "gaussian.positions", positions)
        connected = graph.is_connected()
        print(
            f"gaussian mixture: {graph.node_count()} nodes, {graph.edge_count()} edges, "
            f"connected={connected}"
        )
        print(f"wrote gaussian.edges, gaussian.labels, gaussian.positions in {out}")
    else:
        sizes = tuple(int(s) for s in args.sizes.split(","))
        graph, truth = generate_sbm(sizes, args.p_in, args.p_out, seed=args.seed)
        fileio.write_edge_list(out / "sbm.edges", graph)
        fileio.write_label_file(out / "sbm.labels", truth.items())
        print(f"sbm: {graph.node_count()} nodes, {graph.edge_count()} edges")
        print(f"wrote sbm.edges, sbm.labels in {out}")
    return 0


def cmd_simulate(args) -> int:
    spec = DynamicSbmSpec(
        n_classes=args.classes,
        p_in=args.p_in,
        p_out=args.p_out,
        arrival_rate=args.arrival_rate,
        departure_rate=args.mu_dep,
        cap=args.cap,
        initial_size=args.init,
        labeled_per_class=args.labeled_per_class,
        permanent_labels=args.permanent_labels,
        seed=args.seed,
    )
    config = None
    if not args.no_solver:
        config = SolverConfig(
            sigma=args.sigma,
            mu=args.mu,
            epsilon=args.epsilon,
            schedule=parse_schedule(args.schedule),
            policy=parse_policy(args.policy),
            seed=args.seed,
            compat_printed_update=args.compat_printed_update,
        )
    record, events = simulate_dynamic_sbm(spec, config, args.duration)
    out = fileio.ensure_dir(args.out_dir)
    write_trajectory_csv(out / "trajectory.csv", record)
    fileio.write_event_log(out / "events.log", events)
    sizes = [row.n_nodes for row in record.rows]
    mean_size = sum(sizes[len(sizes) // 2 :]) / max(1, len(sizes) - len(sizes) // 2)
    print(
        f"dsbm: duration {args.duration:g}, {len(events)} events, "
        f"mean size (second half) {mean_size:.1f}"
    )
    final = record.final_error_pct()
    if final is not None:
        print(f"final error {final:.2f}%")
    print(f"wrote {out / 'trajectory.csv'} and {out / 'events.log'}")
    return 0


def cmd_track(args) -> int:
    spec = GaussianMixtureSpec(
        n=args.n, std=args.std, radius=args.radius, seed=args.seed
    )
    config = SolverConfig(
        sigma=args.sigma,
        mu=args.mu,
        epsilon=args.epsilon,
        schedule=parse_schedule(args.schedule),
        seed=args.seed,
    )
    result = run_tracking_protocol(
        spec, config,
        pretrain_iterations=args.pretrain,
        post_iterations=args.post,
        follow=args.follow,
    )
    out = fileio.ensure_dir(args.out_dir)
    k = len(result.trace[0])
    with open(out / "newnode.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["record"] + [f"f_{j}" for j in range(k)])
        for i, row in enumerate(result.trace):
            writer.writerow([i] + [repr(x) for x in row])
    print(
        f"track: new node {result.node} ({result.neighbor_count} neighbors), "
        f"planted class {result.planted_class}, classified {result.predicted_class}"
    )
    print(f"wrote {out / 'newnode.csv'}")
    return 0


def _add_common_solver_flags(p, schedule_default="dec:1000"):
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--schedule", default=schedule_default,
                   help="dec:<c> for 1/(2+floor(t/c)) or const:<eta>")
    p.add_argument("--policy", default="mcmc", choices=["mcmc", "round-robin"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--initial", default="labels", choices=["labels", "zeros"])
    p.add_argument("--compat-printed-update", action="store_true",
                   help="use the uncorrected update constants (comparison runs)")
    p.add_argument("--out-dir", default=".")


def _add_input_flags(p):
    p.add_argument("--graph", help="edge-list file: <u> <v> <w>")
    p.add_argument("--labels", help="label file: <node-id> <class-index>")
    p.add_argument("--truth", help="optional full class file for error curves")
    p.add_argument("--dataset", choices=["lesmis"],
                   help="use a bundled dataset instead of --graph/--labels")
    p.add_argument("--unit-weights", action="store_true",
                   help="force all loaded edge weights to 1")
    p.add_argument("--keep-weights", action="store_true",
                   help="with --dataset, keep the original weights")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphssl",
        description="Graph-based semi-supervised classification solvers and simulators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="classify one graph with one solver")
    _add_input_flags(p)
    p.add_argument("--method", default="power", choices=["power", "sampling"])
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--workers", type=int, default=1)
    _add_common_solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="average error over a sigma x mu grid")
    _add_input_flags(p)
    p.add_argument("--method", default="power", choices=["power", "sampling"])
    p.add_argument("--sigma-list", default="0,0.5,1")
    p.add_argument("--mu-list", default="0.5,1,2")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-10)
    _add_common_solver_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("generate", help="write a synthetic graph to disk")
    p.add_argument("family", choices=["gaussian", "sbm"])
    p.add_argument("--n", type=int, default=500, help="gaussian node count")
    p.add_argument("--std", type=float, default=1.0)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--sizes", default="100,100,100", help="sbm class sizes")
    p.add_argument("--p-in", type=float, default=0.1)
    p.add_argument("--p-out", type=float, default=0.005)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("simulate", help="dynamic block model co-simulation")
    p.add_argument("model", choices=["dsbm"])
    p.add_argument("--classes", type=int, default=3)
    p.add_argument("--cap", type=int, default=1000)
    p.add_argument("--lambda", dest="arrival_rate", type=float, default=5e-5,
                   help="arrival rate (events per time unit)")
    p.add_argument("--mu-dep", type=float, default=1e-7,
                   help="per-node departure rate")
    p.add_argument("--init", type=int, default=500, help="initial node count")
    p.add_argument("--duration", type=float, default=1e6,
                   help="simulation length in time units (= sampling steps)")
    p.add_argument("--p-in", type=float, default=0.1)
    p.add_argument("--p-out", type=float, default=0.005)
    p.add_argument("--labeled-per-class", type=int, default=2)
    p.add_argument("--permanent-labels", action="store_true",
                   help="labeled nodes never depart")
    p.add_argument("--no-solver", action="store_true",
                   help="run only the churn process (occupancy studies)")
    _add_common_solver_flags(p, schedule_default="const:0.001")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("track", help="new-node tracking protocol on a mixture graph")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--std", type=float, default=1.0)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--pretrain", type=int, default=200)
    p.add_argument("--post", type=int, default=20)
    p.add_argument("--follow", default="mcmc", choices=["mcmc", "focus"],
                   help="post-insertion selection: continue the chain or cycle the new node's neighborhood")
    _add_common_solver_flags(p)
    p.set_defaults(func=cmd_track)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (GraphError, ZeroDegreeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
