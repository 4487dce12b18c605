import math

import numpy as np
import pytest

from graphssl import (
    alpha_for,
    build_operator,
    closed_form_solve,
    power_solve,
    power_step,
    weighted_norm,
)

from conftest import make_connected_graph, make_labels, two_node_graph


def test_power_step_two_node_hand_computation():
    # d = (1,1) so B = A; F1 = (2/3) B Y + (1/3) Y gives column (1/3, 2/3)
    g = two_node_graph()
    op = build_operator(g, 0.5)
    Y = np.array([[1.0], [0.0]])
    F1 = power_step(Y, op, Y, 2.0 / 3.0)
    assert np.allclose(F1[:, 0], [1.0 / 3.0, 2.0 / 3.0], atol=1e-15)


def test_power_step_alpha_zero_returns_labels():
    g = make_connected_graph(10, seed=1)
    op = build_operator(g, 0.5)
    rng = np.random.default_rng(0)
    F = rng.normal(size=(10, 2))
    Y = rng.normal(size=(10, 2))
    assert np.array_equal(power_step(F, op, Y, 0.0), Y)


def test_power_step_zero_in_zero_out():
    g = make_connected_graph(6, seed=0)
    op = build_operator(g, 1.0)
    Z = np.zeros((6, 1))
    assert np.all(power_step(Z, op, Z, 0.5) == 0.0)


def test_power_step_dimension_mismatch():
    g = two_node_graph()
    op = build_operator(g, 0.5)
    with pytest.raises(ValueError, match="dimension"):
        power_step(np.zeros((3, 1)), op, np.zeros((3, 1)), 0.5)


@pytest.mark.parametrize("sigma,mu", [(0.0, 0.5), (0.5, 1.0), (1.0, 2.0)])
def test_power_solve_matches_closed_form(sigma, mu):
    g = make_connected_graph(30, seed=7)
    labels = make_labels(30, 3, seed=7)
    Y = labels.indicator(g)
    op = build_operator(g, sigma)
    F, report = power_solve(Y.copy(), op, Y, alpha_for(mu), tol=1e-10, max_iters=2000)
    assert report.converged
    F_star = closed_form_solve(g, Y, sigma, mu)
    assert np.abs(F - F_star).max() <= 1e-8


def test_power_solve_iteration_count_prediction():
    # steps to tol ~ log(tol / s0) / log(alpha), within +-3
    for seed in [0, 1, 2]:
        g = make_connected_graph(25, seed=seed)
        Y = make_labels(25, 2, seed=seed).indicator(g)
        mu = 1.0
        alpha = alpha_for(mu)
        op = build_operator(g, 0.5)
        w = op.perron_weights()
        s0 = weighted_norm(power_step(Y, op, Y, alpha) - Y, w)
        tol = 1e-8
        predicted = math.log(tol / s0) / math.log(alpha)
        _, report = power_solve(Y.copy(), op, Y, alpha, tol=tol, max_iters=1000)
        assert abs(report.iterations - predicted) <= 3


def test_power_solve_from_fixed_point_converges_immediately():
    g = make_connected_graph(15, seed=3)
    Y = make_labels(15, 2, seed=3).indicator(g)
    op = build_operator(g, 0.5)
    F_star = closed_form_solve(g, Y, 0.5, 1.0)
    _, report = power_solve(F_star, op, Y, alpha_for(1.0), tol=1e-10)
    assert report.converged
    assert report.iterations == 1


def test_power_solve_nonconvergence_flagged():
    g = make_connected_graph(20, seed=4)
    Y = make_labels(20, 2, seed=4).indicator(g)
    op = build_operator(g, 0.5)
    F, report = power_solve(Y.copy(), op, Y, alpha_for(1.0), tol=1e-12, max_iters=3)
    assert not report.converged
    assert report.iterations == 3
    assert np.all(np.isfinite(F))


def test_error_decays_geometrically_with_rate_alpha():
    for sigma, mu in [(0.5, 1.0), (0.0, 0.5)]:
        g = make_connected_graph(20, seed=9)
        Y = make_labels(20, 2, seed=9).indicator(g)
        alpha = alpha_for(mu)
        op = build_operator(g, sigma)
        w = op.perron_weights()
        F_star = closed_form_solve(g, Y, sigma, mu)
        F = Y.copy()
        e_prev = weighted_norm(F - F_star, w)
        for _ in range(60):
            F = power_step(F, op, Y, alpha)
            e = weighted_norm(F - F_star, w)
            assert e <= alpha * e_prev + 1e-12
            e_prev = e
            if e < 1e-12:
                break


def test_report_ratios_bounded_by_alpha():
    g = make_connected_graph(30, seed=12)
    Y = make_labels(30, 3, seed=12).indicator(g)
    alpha = alpha_for(0.5)  # the slowest contraction in the experiment grid
    op = build_operator(g, 0.5)
    _, report = power_solve(Y.copy(), op, Y, alpha, tol=1e-10, max_iters=2000)
    assert report.ratios, "expected recorded contraction ratios"
    assert max(report.ratios) <= alpha + 1e-10


def test_column_decoupling_is_bitwise():
    g = make_connected_graph(25, seed=5)
    Y = make_labels(25, 3, seed=5).indicator(g)
    op = build_operator(g, 0.5)
    alpha = alpha_for(1.0)
    F_joint, _ = power_solve(Y.copy(), op, Y, alpha, tol=1e-10)
    for k in range(Y.shape[1]):
        col = Y[:, k : k + 1]
        F_col, _ = power_solve(col.copy(), op, col, alpha, tol=1e-10)
        assert np.array_equal(F_joint[:, k : k + 1], F_col)


def test_worker_count_does_not_change_bits():
    g = make_connected_graph(40, seed=6)
    Y = make_labels(40, 4, seed=6).indicator(g)
    op = build_operator(g, 0.5)
    alpha = alpha_for(1.0)
    F1, r1 = power_solve(Y.copy(), op, Y, alpha, tol=1e-10, workers=1)
    F8, r8 = power_solve(Y.copy(), op, Y, alpha, tol=1e-10, workers=8)
    assert np.array_equal(F1, F8)
    assert r1.iterations == r8.iterations
