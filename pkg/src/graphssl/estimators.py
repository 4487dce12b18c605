"""Scikit-learn style estimators wrapping the two solvers.

Both classifiers take a :class:`SimilarityGraph` instead of a feature
array: ``fit(graph, y)`` with ``y`` a ``{node: class}`` mapping or a
:class:`LabelAssignment`. Hyperparameters live in ``__init__`` so
``get_params`` / ``set_params`` / ``clone`` work as usual.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from .graph import SimilarityGraph
from .metrics import classify, error_against
from .operators import alpha_for, build_operator
from .power import power_solve
from .sampling import SolverConfig, parse_policy, parse_schedule, run_sampling
from .validation import as_label_assignment, check_labels_in_graph


class _GraphClassifierBase(BaseEstimator, ClassifierMixin):
    def _check_fitted(self):
        if not hasattr(self, "features_"):
            raise NotFittedError(
                f"{type(self).__name__} is not fitted; call fit(graph, y) first"
            )

    def predict(self, nodes=None) -> np.ndarray:
        """Predicted class per node (ascending id order, or ``nodes``)."""
        self._check_fitted()
        pred = classify(self.features_)
        if nodes is None:
            return pred
        row = {node: r for r, node in enumerate(self.node_ids_)}
        return np.array([pred[row[n]] for n in nodes])

    def fit_predict(self, graph, y) -> np.ndarray:
        return self.fit(graph, y).predict()

    def predict_map(self) -> dict[int, int]:
        self._check_fitted()
        return dict(zip(self.node_ids_, classify(self.features_).tolist()))

    def score(self, truth) -> float:
        """Accuracy over unlabeled nodes against a {node: class} truth map."""
        self._check_fitted()
        _, pct = error_against(self.predict_map(), dict(truth), self.labels_)
        return 1.0 - pct / 100.0


class PowerIterationClassifier(_GraphClassifierBase):
    """Deterministic solver: iterate F <- alpha B F + (1 - alpha) Y.

    Parameters
    ----------
    sigma : operator exponent (1 standard Laplacian, 0.5 normalized, 0 PageRank-like).
    mu : regularization weight; alpha = 2 / (2 + mu) is the contraction rate.
    tol : stop when the weighted-norm step drops below this.
    max_iter : iteration cap; ``report_.converged`` records which stop fired.
    initial : 'labels' starts from Y, 'zeros' from the zero matrix.
    workers : row-parallel matvec threads (bitwise identical for any count).
    """

    def __init__(self, sigma=0.5, mu=1.0, tol=1e-10, max_iter=1000,
                 initial="labels", workers=1):
        self.sigma = sigma
        self.mu = mu
        self.tol = tol
        self.max_iter = max_iter
        self.initial = initial
        self.workers = workers

    def fit(self, graph: SimilarityGraph, y):
        labels = as_label_assignment(y)
        check_labels_in_graph(labels, graph)
        operator = build_operator(graph, self.sigma)
        Y = labels.indicator(graph)
        F0 = Y.copy() if self.initial == "labels" else np.zeros_like(Y)
        F, report = power_solve(
            F0,
            operator,
            Y,
            alpha_for(self.mu),
            tol=self.tol,
            max_iters=self.max_iter,
            workers=self.workers,
        )
        self.labels_ = labels
        self.node_ids_ = list(operator.ids)
        self.features_ = F
        self.report_ = report
        self.n_iter_ = report.iterations
        return self


class SamplingClassifier(_GraphClassifierBase):
    """Stochastic solver: one sampled row update per step.

    ``schedule`` is a StepSchedule or a string like ``'dec:1000'`` /
    ``'const:0.001'``; ``policy`` is ``'mcmc'`` or ``'round-robin'``. One
    iteration is N steps. Runs are bitwise reproducible for a fixed seed.
    """

    def __init__(self, sigma=0.5, mu=1.0, epsilon=0.1, schedule="dec:1000",
                 policy="mcmc", iterations=200, seed=None, initial="labels",
                 compat_printed_update=False):
        self.sigma = sigma
        self.mu = mu
        self.epsilon = epsilon
        self.schedule = schedule
        self.policy = policy
        self.iterations = iterations
        self.seed = seed
        self.initial = initial
        self.compat_printed_update = compat_printed_update

    def _config(self) -> SolverConfig:
        schedule = self.schedule
        if isinstance(schedule, str):
            schedule = parse_schedule(schedule)
        policy = self.policy
        if isinstance(policy, str):
            policy = parse_policy(policy)
        return SolverConfig(
            sigma=self.sigma,
            mu=self.mu,
            epsilon=self.epsilon,
            schedule=schedule,
            policy=policy,
            seed=self.seed,
            initial=self.initial,
            compat_printed_update=self.compat_printed_update,
        )

    def fit(self, graph: SimilarityGraph, y, truth=None):
        labels = as_label_assignment(y)
        F, record = run_sampling(
            graph, labels, self._config(), self.iterations, truth=truth
        )
        self.labels_ = labels
        self.node_ids_ = list(F.ids)
        self.features_ = F.values
        self.trajectory_ = record
        return self
