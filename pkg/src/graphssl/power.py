"""Deterministic power iteration of the affine map F <- alpha B F + (1-alpha) Y.

The map contracts with rate alpha in the weighted norm ||x||_w =
max_i |x_i|/w_i, w = d**(1-sigma), so the step norm decays geometrically and
bounds the distance to the fixed point by step * alpha / (1 - alpha).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .operators import DiffusionOperator, weighted_norm


@dataclass
class PowerSolveReport:
    """Convergence trace of one power_solve call.

    ``ratios`` holds successive step-norm ratios while both steps are above
    ``ratio_floor``; below that floor the quotient is dominated by float
    rounding rather than the contraction rate, so it is not recorded.
    """

    iterations: int = 0
    final_step_w: float = float("inf")
    final_step_inf: float = float("inf")
    converged: bool = False
    ratios: list[float] = field(default_factory=list)
    ratio_floor: float = 0.0


def _matmul(B, F: np.ndarray, workers: int) -> np.ndarray:
    """B @ F with optional row-parallelism.

    Rows are computed by the same sequential per-row kernel regardless of
    the partition, so results are bitwise identical for any worker count.
    """
    if workers <= 1:
        return B @ F
    n = B.shape[0]
    bounds = np.linspace(0, n, workers + 1, dtype=int)
    blocks = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
        parts = list(pool.map(lambda ab: B[ab[0] : ab[1]] @ F, blocks))
    return np.vstack(parts)


def power_step(
    F: np.ndarray,
    operator: DiffusionOperator,
    Y: np.ndarray,
    alpha: float,
    workers: int = 1,
) -> np.ndarray:
    """One application of the affine map."""
    F = np.asarray(F, dtype=float)
    Y = np.asarray(Y, dtype=float)
    n = operator.n
    if F.shape != Y.shape or F.shape[0] != n:
        raise ValueError(f"dimension mismatch: F {F.shape}, Y {Y.shape}, n={n}")
    return alpha * _matmul(operator.matrix, F, workers) + (1.0 - alpha) * Y


def power_solve(
    F0: np.ndarray,
    operator: DiffusionOperator,
    Y: np.ndarray,
    alpha: float,
    tol: float = 1e-10,
    max_iters: int = 1000,
    workers: int = 1,
    on_iteration=None,
) -> tuple[np.ndarray, PowerSolveReport]:
    """Iterate to the fixed point; stop when the w-norm step drops to tol.

    ``on_iteration(t, F)`` is invoked after every step (trajectory hooks).
    Returns the final iterate and a report; ``converged`` is False when
    ``max_iters`` ran out first.
    """
    if not tol >= 0.0:
        raise ValueError("tol must be >= 0")
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must be in [0, 1), got {alpha}")
    w = operator.perron_weights()
    F = np.array(F0, dtype=float, copy=True)
    report = PowerSolveReport()
    prev_step = None
    # Below ~1e-6 of the initial scale, successive-step quotients carry
    # rounding noise above the 1e-10 contraction slack; stop recording there.
    floor_scale = max(1.0, weighted_norm(F, w), weighted_norm(Y, w))
    report.ratio_floor = 1e-6 * floor_scale
    for t in range(1, max_iters + 1):
        F_next = power_step(F, operator, Y, alpha, workers=workers)
        diff = F_next - F
        step_w = weighted_norm(diff, w)
        step_inf = float(np.abs(diff).max(initial=0.0))
        if prev_step is not None and min(prev_step, step_w) >= report.ratio_floor:
            report.ratios.append(step_w / prev_step)
        prev_step = step_w
        F = F_next
        report.iterations = t
        report.final_step_w = step_w
        report.final_step_inf = step_inf
        if on_iteration is not None:
            on_iteration(t, F)
        if step_w <= tol:
            report.converged = True
            break
    return F, report
