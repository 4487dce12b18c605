import math

import numpy as np
import pytest

from graphssl import (
    SimilarityGraph,
    alpha_for,
    build_operator,
    closed_form_solve,
    objective,
    perron_weights,
    weighted_norm,
)
from graphssl.operators import WalkKernel, dense_operator, spectrum
from graphssl.validation import ZeroDegreeError

from conftest import make_connected_graph, make_labels, path_graph, two_node_graph


def test_operator_entries_on_path_sigma_half():
    g = path_graph(3)
    op = build_operator(g, 0.5)
    B = op.matrix.toarray()
    # B[a,b] = d(a)^-.5 * 1 * d(b)^-.5 with d = (1, 2, 1)
    assert B[0, 1] == pytest.approx(2 ** -0.5, abs=1e-12)
    assert B[1, 0] == pytest.approx(2 ** -0.5, abs=1e-12)
    assert op.row_sums[1] == pytest.approx(2 / math.sqrt(2), abs=1e-12)
    # dense construction oracle
    assert np.allclose(B, dense_operator(g, 0.5), atol=1e-14)


def test_operator_row_stochastic_at_sigma_one():
    g = path_graph(3)
    op = build_operator(g, 1.0)
    assert np.allclose(np.asarray(op.matrix.sum(axis=1)).ravel(), 1.0, atol=1e-12)


def test_operator_sigma_zero_matches_dense_oracle():
    g = path_graph(3)
    B = build_operator(g, 0.0).matrix.toarray()
    assert B[0, 1] == pytest.approx(0.5, abs=1e-14)  # 1/d(b)
    assert np.allclose(B, dense_operator(g, 0.0), atol=1e-14)


def test_operator_sparsity_matches_adjacency():
    g = make_connected_graph(20, seed=3)
    op = build_operator(g, 0.5)
    B = op.matrix.toarray()
    for u, v, _ in g.edges():
        assert B[u, v] != 0.0 and B[v, u] != 0.0
    assert np.count_nonzero(B) == 2 * g.edge_count()


def test_operator_rejects_zero_degree():
    g = path_graph(2)
    isolated = g.add_node()
    with pytest.raises(ZeroDegreeError) as exc:
        build_operator(g, 0.5)
    assert isolated in exc.value.nodes


@pytest.mark.parametrize("sigma", [0.0, 0.5, 1.0])
def test_perron_identity_on_random_graphs(sigma):
    for seed in range(5):
        g = make_connected_graph(25, seed=seed)
        op = build_operator(g, sigma)
        w = perron_weights(g, sigma)
        resid = np.abs(op.matrix @ w - w).max() / np.abs(w).max()
        assert resid <= 1e-10


def test_perron_weights_on_path():
    g = path_graph(3)
    w = perron_weights(g, 0.5)
    assert np.allclose(w, [1.0, math.sqrt(2), 1.0], atol=1e-14)
    # hand check: B[a,b] * w[b] = (1/sqrt 2) * sqrt 2 = 1 = w[a]
    op = build_operator(g, 0.5)
    assert (op.matrix @ w)[0] == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(perron_weights(g, 1.0), 1.0)
    assert np.allclose(perron_weights(g, 0.0), g.degrees())


def test_perron_warns_on_disconnected():
    g = path_graph(2)
    g.add_nodes(2)
    g.add_edge(2, 3, 1.0)
    with pytest.warns(UserWarning, match="disconnected"):
        perron_weights(g, 0.5)


def test_weighted_norm_examples():
    w = np.array([1.0, 2.0])
    assert weighted_norm(w, w) == 1.0
    assert weighted_norm(np.zeros(2), w) == 0.0
    assert weighted_norm(np.array([2.0, -3.0]), w) == 2.0


def test_weighted_norm_errors():
    with pytest.raises(ValueError, match="length"):
        weighted_norm(np.ones(3), np.ones(2))
    with pytest.raises(ValueError, match="positive"):
        weighted_norm(np.ones(2), np.array([1.0, 0.0]))


def test_weighted_norm_matrix_rows():
    w = np.array([1.0, 2.0])
    X = np.array([[1.0, -4.0], [2.0, 2.0]])
    assert weighted_norm(X, w) == 4.0


def test_objective_zero_at_zero():
    g = path_graph(3)
    Z = np.zeros((3, 2))
    assert objective(Z, Z, g, 0.5, 1.0) == 0.0


def test_objective_constant_function_sigma_one():
    # constants are in the null space of the smoothness term at sigma=1,
    # leaving only mu * sum_i d(i) * F_i^2
    g = make_connected_graph(10, seed=0, unit_weights=True)
    c = 0.7
    F = np.full((10, 1), c)
    Y = np.zeros((10, 1))
    expected = 2.0 * float(sum(g.degree(i) for i in g.ids())) * c * c
    assert objective(F, Y, g, 1.0, 2.0) == pytest.approx(expected, rel=1e-12)


def test_objective_nonnegative_and_dimension_check():
    g = path_graph(3)
    rng = np.random.default_rng(0)
    F = rng.normal(size=(3, 2))
    Y = rng.normal(size=(3, 2))
    assert objective(F, Y, g, 0.5, 1.0) >= 0.0
    with pytest.raises(ValueError, match="dimension"):
        objective(F, Y[:2], g, 0.5, 1.0)


def _fd_gradient(g, F, Y, sigma, mu, h=1e-6):
    grad = np.zeros_like(F)
    for i in range(F.shape[0]):
        for k in range(F.shape[1]):
            up = F.copy()
            dn = F.copy()
            up[i, k] += h
            dn[i, k] -= h
            grad[i, k] = (objective(up, Y, g, sigma, mu) - objective(dn, Y, g, sigma, mu)) / (2 * h)
    return grad


@pytest.mark.parametrize("sigma,mu", [(0.0, 1.0), (0.5, 1.0), (1.0, 0.5)])
def test_finite_difference_gradient_vanishes_at_solution(sigma, mu):
    for seed in range(3):
        g = make_connected_graph(12, seed=seed)
        Y = make_labels(12, 2, seed).indicator(g)
        F = closed_form_solve(g, Y, sigma, mu)
        assert np.abs(_fd_gradient(g, F, Y, sigma, mu)).max() <= 1e-6


def test_closed_form_two_node_hand_algebra():
    # F*_col0 = (1-a)/(1-a^2) * (1, a) = (0.6, 0.4) at a = 2/3
    g = two_node_graph()
    Y = np.array([[1.0], [0.0]])
    F = closed_form_solve(g, Y, 0.5, 1.0)
    assert np.allclose(F[:, 0], [0.6, 0.4], atol=1e-12)
    # dense linear solve oracle, written out independently
    alpha = alpha_for(1.0)
    B = dense_operator(g, 0.5)
    expected = np.linalg.solve(np.eye(2) - alpha * B, (1 - alpha) * Y)
    assert np.allclose(F, expected, atol=1e-14)


def test_closed_form_zero_labels():
    g = path_graph(3)
    F = closed_form_solve(g, np.zeros((3, 2)), 0.5, 1.0)
    assert np.all(F == 0.0)


def test_closed_form_fixed_point_residual():
    for seed in range(5):
        g = make_connected_graph(30, seed=seed)
        Y = make_labels(30, 3, seed).indicator(g)
        B = dense_operator(g, 0.5)
        alpha = alpha_for(1.0)
        F = closed_form_solve(g, Y, 0.5, 1.0)
        assert np.abs(F - (alpha * B @ F + (1 - alpha) * Y)).max() <= 1e-10


def test_closed_form_respects_dense_limit():
    g = path_graph(5)
    with pytest.raises(ValueError, match="dense limit"):
        closed_form_solve(g, np.zeros((5, 1)), 0.5, 1.0, dense_limit=4)


def test_lesmis_golden_closed_form(lesmis):
    graph, labels, _truth, names = lesmis
    name_of = {v: k for k, v in names.items()}
    F = closed_form_solve(graph, labels.indicator(graph), 0.5, 1.0)
    # class order: Myriel, Valjean, Fantine, Cosette, Thenardier, Gavroche
    assert F[name_of["Woman2"]].argmax() == 3
    assert F[name_of["Tholomyes"]].argmax() == 2
    assert F[name_of["MlleBaptistine"]].argmax() == 0


def test_spectra_agree_with_row_stochastic_similarity():
    # B is similar to D^-1 A for every sigma, so spectra coincide
    for seed in range(4):
        g = make_connected_graph(18, seed=seed)
        s_half = spectrum(g, 0.5)
        s_one = spectrum(g, 1.0)
        s_zero = spectrum(g, 0.0)
        assert np.allclose(s_half, s_one, atol=1e-8)
        assert np.allclose(s_zero, s_one, atol=1e-8)
        assert s_one[-1] == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("sigma,mu", [(0.5, 1.0), (0.0, 2.0), (1.0, 0.5)])
def test_affine_map_contracts_in_weighted_norm(sigma, mu):
    alpha = alpha_for(mu)
    for seed in range(8):
        g = make_connected_graph(int(5 + seed * 5) or 5, seed=seed)
        n = g.node_count()
        op = build_operator(g, sigma)
        w = op.perron_weights()
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(n, 2))
        y = rng.normal(size=(n, 2))
        z = rng.normal(size=(n, 2))  # shared offset: G(x) - G(y) = alpha B (x - y)
        gx = alpha * (op.matrix @ x) + (1 - alpha) * z
        gy = alpha * (op.matrix @ y) + (1 - alpha) * z
        assert weighted_norm(gx - gy, w) <= alpha * weighted_norm(x - y, w) + 1e-12


def test_kernel_rows_and_bounds():
    g = make_connected_graph(15, seed=2)
    op = build_operator(g, 0.5)
    kernel = WalkKernel(op, 0.1)
    n = op.n
    for i in op.ids:
        total = sum(kernel.q(i, j) for j in op.ids)
        assert total == pytest.approx(1.0, abs=1e-12)
        _, pvals, _ = kernel.p_row(i)
        assert sum(pvals) == pytest.approx(1.0, abs=1e-12)
        for j in op.ids:
            assert kernel.q(i, j) >= 0.1 / n - 1e-15
            assert kernel.q(i, j) <= 1.0


def test_kernel_rejects_bad_epsilon():
    g = path_graph(3)
    op = build_operator(g, 0.5)
    with pytest.raises(ValueError):
        WalkKernel(op, 1.5)
