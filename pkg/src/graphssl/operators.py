"""Diffusion operator, walk kernels, objective, and dense verification oracles.

The central object is the sparse operator B with entries

    B[i, j] = d(i)**(-sigma) * A[i, j] * d(j)**(sigma - 1),

whose Perron eigenvalue is 1 with positive eigenvector w = d**(1-sigma).
sigma=1 normalizes rows (standard Laplacian smoothing), sigma=0.5 gives the
symmetric normalized variant, sigma=0 the column-normalized walk.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graph import SimilarityGraph
from .validation import check_mu, check_positive_degrees, check_sigma, warn_if_disconnected


@dataclass(frozen=True)
class DiffusionOperator:
    """Sparse B with cached row sums, degree vector, and id order.

    Immutable after construction; safe for concurrent reads.
    """

    sigma: float
    ids: tuple[int, ...]
    matrix: sp.csr_matrix
    row_sums: np.ndarray  # H, diagonal of row sums of B
    degrees: np.ndarray

    @property
    def n(self) -> int:
        return len(self.ids)

    def row_index(self, node: int) -> int:
        # ids are sorted, so binary search is exact
        pos = int(np.searchsorted(self.ids, node))
        if pos >= len(self.ids) or self.ids[pos] != node:
            raise KeyError(f"node {node} not in operator")
        return pos

    def perron_weights(self) -> np.ndarray:
        """w = d**(1-sigma), the positive eigenvector with B w = w."""
        return self.degrees ** (1.0 - self.sigma)


def build_operator(graph: SimilarityGraph, sigma: float) -> DiffusionOperator:
    """Assemble B from the graph; all degrees must be strictly positive."""
    sigma = check_sigma(sigma)
    check_positive_degrees(graph)
    ids = graph.ids()
    n = len(ids)
    row_of = {node: r for r, node in enumerate(ids)}
    d = graph.degrees()
    rows, cols, vals = [], [], []
    dm_sig = d**-sigma
    d_sig1 = d ** (sigma - 1.0)
    for u in ids:
        ru = row_of[u]
        for v, w in graph.neighbors(u):
            rv = row_of[v]
            rows.append(ru)
            cols.append(rv)
            vals.append(dm_sig[ru] * w * d_sig1[rv])
    B = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    H = np.asarray(B.sum(axis=1)).ravel()
    return DiffusionOperator(
        sigma=sigma, ids=tuple(ids), matrix=B, row_sums=H, degrees=d
    )


def dense_operator(graph: SimilarityGraph, sigma: float) -> np.ndarray:
    """Dense D**(-sigma) A D**(sigma-1), built by explicit matrix products.

    Verification oracle for :func:`build_operator`; O(n^2) memory.
    """
    sigma = check_sigma(sigma)
    check_positive_degrees(graph)
    ids = graph.ids()
    n = len(ids)
    row_of = {node: r for r, node in enumerate(ids)}
    A = np.zeros((n, n))
    for u, v, w in graph.edges():
        A[row_of[u], row_of[v]] = w
        A[row_of[v], row_of[u]] = w
    d = graph.degrees()
    return np.diag(d**-sigma) @ A @ np.diag(d ** (sigma - 1.0))


def spectrum(graph: SimilarityGraph, sigma: float) -> np.ndarray:
    """Sorted real eigenvalue spectrum of B (dense; small graphs only).

    B is similar to the row-stochastic D**-1 A, so the spectrum is real and
    independent of sigma.
    """
    eigs = np.linalg.eigvals(dense_operator(graph, sigma))
    if np.abs(eigs.imag).max(initial=0.0) > 1e-8:
        raise ValueError("operator spectrum unexpectedly complex")
    return np.sort(eigs.real)


def perron_weights(graph: SimilarityGraph, sigma: float) -> np.ndarray:
    """w_i = d(i)**(1-sigma); satisfies B w = w on connected graphs."""
    sigma = check_sigma(sigma)
    check_positive_degrees(graph)
    warn_if_disconnected(graph, "Perron eigenvector is not unique")
    return graph.degrees() ** (1.0 - sigma)


def weighted_norm(x: np.ndarray, w: np.ndarray) -> float:
    """max_i |x_i| / w_i, extended row-wise to matrices."""
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0.0):
        raise ValueError("weights must be strictly positive")
    if x.shape[0] != w.shape[0]:
        raise ValueError(f"length mismatch: x has {x.shape[0]} rows, w has {w.shape[0]}")
    if x.ndim == 1:
        return float(np.max(np.abs(x) / w)) if x.size else 0.0
    return float(np.max(np.abs(x) / w[:, None])) if x.size else 0.0


def alpha_for(mu: float) -> float:
    """Regularization trade-off alpha = 2 / (2 + mu)."""
    return 2.0 / (2.0 + check_mu(mu))


def objective(
    F: np.ndarray,
    Y: np.ndarray,
    graph: SimilarityGraph,
    sigma: float,
    mu: float,
) -> float:
    """Regularized smoothness objective whose minimizer is the closed form.

    Smoothness term: 2 * sum_k (D**(sigma-1) F_k)^T L (D**(sigma-1) F_k),
    computed edge-wise so it is exactly non-negative. Fit term:
    mu * sum_k (F_k - Y_k)^T D**(2 sigma - 1) (F_k - Y_k).
    """
    sigma = check_sigma(sigma)
    mu = check_mu(mu)
    check_positive_degrees(graph)
    F = np.asarray(F, dtype=float)
    Y = np.asarray(Y, dtype=float)
    ids = graph.ids()
    if F.shape != Y.shape or F.shape[0] != len(ids):
        raise ValueError(
            f"dimension mismatch: F {F.shape}, Y {Y.shape}, graph n={len(ids)}"
        )
    row_of = {node: r for r, node in enumerate(ids)}
    d = graph.degrees()
    G = d[:, None] ** (sigma - 1.0) * F
    smooth = 0.0
    for u, v, w in graph.edges():
        diff = G[row_of[u]] - G[row_of[v]]
        smooth += w * float(diff @ diff)
    resid = F - Y
    fit = float(np.sum(d[:, None] ** (2.0 * sigma - 1.0) * resid * resid))
    return 2.0 * smooth + mu * fit


def closed_form_solve(
    graph: SimilarityGraph,
    Y: np.ndarray,
    sigma: float,
    mu: float,
    dense_limit: int = 2000,
) -> np.ndarray:
    """Exact minimizer F* = (1-alpha) (I - alpha B)^-1 Y by dense solve.

    Verification oracle for the iterative solvers; refuses graphs larger
    than ``dense_limit`` nodes.
    """
    mu = check_mu(mu)
    n = graph.node_count()
    if n > dense_limit:
        raise ValueError(f"graph has {n} nodes, over the dense limit {dense_limit}")
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2 or Y.shape[0] != n:
        raise ValueError(f"Y must be (n, K) with n={n}, got {Y.shape}")
    alpha = alpha_for(mu)
    B = dense_operator(graph, sigma)
    try:
        F = np.linalg.solve(np.eye(n) - alpha * B, (1.0 - alpha) * Y)
    except np.linalg.LinAlgError as exc:  # unreachable for alpha < 1
        raise ValueError(f"closed-form system singular: {exc}") from exc
    resid = np.abs(F - (alpha * (B @ F) + (1.0 - alpha) * Y)).max(initial=0.0)
    if resid > 1e-10:
        raise ValueError(f"closed-form residual {resid:.2e} exceeds 1e-10")
    return F


class WalkKernel:
    """Teleported transition kernel Q = (1-eps) P + (eps/N) E over a static B.

    P is the row-normalized operator, p(i,j) = B[i,j] / H[i]. Q is never
    materialized: q(i,j) is evaluated on demand and sampling mixes a
    teleport draw with a P-row draw. Indexes by node id.
    """

    def __init__(self, operator: DiffusionOperator, epsilon: float):
        epsilon = float(epsilon)
        if not 0.0 <= epsilon <= 1.0:
            raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
        self.operator = operator
        self.epsilon = epsilon
        self.n = operator.n
        B = operator.matrix
        H = operator.row_sums
        self._nbr_rows: dict[int, tuple[list[int], list[float], list[float]]] = {}
        indptr, indices, data = B.indptr, B.indices, B.data
        for r, node in enumerate(operator.ids):
            lo, hi = indptr[r], indptr[r + 1]
            nbr_ids = [operator.ids[c] for c in indices[lo:hi]]
            pvals = [float(v) / float(H[r]) for v in data[lo:hi]]
            cum: list[float] = []
            acc = 0.0
            for pv in pvals:
                acc += pv
                cum.append(acc)
            self._nbr_rows[node] = (nbr_ids, pvals, cum)

    def p(self, i: int, j: int) -> float:
        """Row-stochastic transition p(i, j); 0 off the neighbor set."""
        nbr_ids, pvals, _ = self._nbr_rows[i]
        pos = _find(nbr_ids, j)
        return pvals[pos] if pos >= 0 else 0.0

    def q(self, i: int, j: int) -> float:
        return (1.0 - self.epsilon) * self.p(i, j) + self.epsilon / self.n

    def p_row(self, i: int) -> tuple[list[int], list[float], list[float]]:
        """Neighbor ids, p values, and cumulative p values for row i."""
        return self._nbr_rows[i]


def _find(sorted_ids: list[int], j: int) -> int:
    import bisect

    pos = bisect.bisect_left(sorted_ids, j)
    if pos < len(sorted_ids) and sorted_ids[pos] == j:
        return pos
    return -1
