"""Input coercion and checks shared by the estimator, CLI and benchmark code."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .exceptions import ValidationError
from .graph import Graph, un


def check_graph(X, directed=None):
    """Coerce ``X`` to a :class:`Graph`.

    Accepts a ``Graph``, a square scipy sparse matrix or a square dense
    array (weighted adjacency). Matrices are treated as directed unless they
    are symmetric or ``directed=False`` is given.
    """
    if isinstance(X, Graph):
        if directed is False and X.directed:
            return un(X)
        return X
    if sp.issparse(X):
        A = sp.csr_matrix(X, dtype=np.float64, copy=True)
    else:
        try:
            arr = np.asarray(X, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"cannot interpret {type(X).__name__} as a graph") from exc
        if arr.ndim != 2:
            raise ValidationError(f"expected a 2-D adjacency matrix, got shape {arr.shape}")
        A = sp.csr_matrix(arr)
    if A.shape[0] != A.shape[1]:
        raise ValidationError(f"adjacency matrix must be square, got {A.shape}")
    if A.nnz and (not np.all(np.isfinite(A.data)) or A.data.min() < 0):
        raise ValidationError("adjacency weights must be finite and non-negative")
    A.eliminate_zeros()
    symmetric = (A != A.T).nnz == 0
    if directed is None:
        directed = not symmetric
    if directed or not symmetric:
        coo = A.tocoo()
        g = Graph(A.shape[0], coo.row, coo.col, coo.data, directed=True)
        return g if directed else un(g)
    return Graph.from_adjacency(A)


def check_permutation(order, n):
    """Validate that ``order`` is a permutation of ``0..n-1``, naming offenders."""
    order = np.asarray(order)
    if order.ndim != 1 or not np.issubdtype(order.dtype, np.integer):
        raise ValidationError("permutation must be a 1-D integer array")
    counts = np.bincount(order[(order >= 0) & (order < n)], minlength=n)
    bad = order[(order < 0) | (order >= n)]
    if len(bad):
        raise ValidationError(f"permutation contains out-of-range id {int(bad[0])}")
    dup = np.flatnonzero(counts > 1)
    if len(dup):
        raise ValidationError(f"permutation repeats id {int(dup[0])}")
    missing = np.flatnonzero(counts == 0)
    if len(missing):
        raise ValidationError(f"permutation is missing id {int(missing[0])}")
    return order.astype(np.int64)


def check_same_nodes(g, *arrangements):
    for a in arrangements:
        if a.n != g.n:
            raise ValidationError(f"arrangement over {a.n} nodes does not match graph with {g.n}")
