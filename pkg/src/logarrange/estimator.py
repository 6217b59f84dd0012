"""scikit-learn style front end to the V-cycle solver."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .arrangement import beta, from_order
from .exceptions import ValidationError
from .graph import Graph
from .solver import SolverParams, solve
from .validation import check_graph

_OVERRIDES = ("theta1", "theta2", "omega", "n_vectors", "jor_iters", "interp_order",
              "coarsest_size", "nn_k", "nn_passes", "compat_sweeps", "gs_sweeps",
              "exact_threshold")


class LogArrangement(TransformerMixin, BaseEstimator):
    """Node ordering that minimizes the weighted sum of log link lengths.

    ``fit`` takes a graph (a :class:`~logarrange.graph.Graph`, or a square
    sparse/dense weighted adjacency matrix) and stores the ordering;
    ``transform`` returns the graph relabeled in that order. Parameters left
    at ``None`` take the value of ``preset``.

    Attributes
    ----------
    order_ : ndarray
        Node placed at each rank.
    ranks_ : ndarray
        Rank of each node.
    cost_, beta_ : float
        Arrangement cost and bits per link on the fitted graph.
    levels_ : list of dict
        Per-level statistics of the hierarchy.
    """

    def __init__(self, preset="default", theta1=None, theta2=None, omega=None,
                 n_vectors=None, jor_iters=None, interp_order=None, coarsest_size=None,
                 nn_k=None, nn_passes=None, compat_sweeps=None, gs_sweeps=None,
                 exact_threshold=None, random_state=0):
        self.preset = preset
        self.theta1 = theta1
        self.theta2 = theta2
        self.omega = omega
        self.n_vectors = n_vectors
        self.jor_iters = jor_iters
        self.interp_order = interp_order
        self.coarsest_size = coarsest_size
        self.nn_k = nn_k
        self.nn_passes = nn_passes
        self.compat_sweeps = compat_sweeps
        self.gs_sweeps = gs_sweeps
        self.exact_threshold = exact_threshold
        self.random_state = random_state

    def solver_params(self):
        over = {k: getattr(self, k) for k in _OVERRIDES if getattr(self, k) is not None}
        seed = self.random_state
        if seed is None:
            seed = 0
        elif not isinstance(seed, (int, np.integer)):
            raise ValidationError("random_state must be an int or None")
        return SolverParams.preset(self.preset, seed=int(seed), **over)

    def fit(self, X, y=None):
        g = check_graph(X)
        result = solve(g, self.solver_params())
        self.arrangement_ = result.arrangement
        self.order_ = np.array(result.order)
        self.ranks_ = np.array(result.ranks)
        self.cost_ = result.cost
        self.beta_ = result.beta
        self.levels_ = result.levels
        self.timings_ = result.timings
        self.n_nodes_ = g.n
        return self

    def _check_n(self, n):
        if n != self.n_nodes_:
            raise ValidationError(f"fitted on {self.n_nodes_} nodes, got {n}")

    def transform(self, X):
        """Relabel ``X`` so that node ``r`` of the output is ``order_[r]``."""
        check_is_fitted(self, "order_")
        if isinstance(X, Graph):
            self._check_n(X.n)
            return X.subgraph(self.order_)
        if sp.issparse(X):
            A = sp.csr_matrix(X)
            self._check_n(A.shape[0])
            return A[self.order_][:, self.order_]
        A = np.asarray(X)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValidationError("expected a square adjacency matrix")
        self._check_n(A.shape[0])
        return A[np.ix_(self.order_, self.order_)]

    def score(self, X, y=None):
        """Negative bits per link of the fitted ordering on ``X`` (higher is better)."""
        check_is_fitted(self, "order_")
        g = check_graph(X)
        self._check_n(g.n)
        return -beta(g, from_order(self.order_, g.volumes))
