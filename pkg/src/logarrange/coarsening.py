"""Seed selection, interpolation and coarse graph construction."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numba as nb
import numpy as np
import scipy.sparse as sp

from .exceptions import ValidationError
from .graph import Graph

logger = logging.getLogger(__name__)

__all__ = [
    "InterpolationMatrix",
    "Partition",
    "build_interpolation",
    "coarsen_graph",
    "future_volume_order",
    "future_volumes",
    "select_seeds",
]

_NUMBA = {"cache": True, "nogil": True}


@dataclass(frozen=True)
class Partition:
    """C/F splitting of the fine nodes.

    Attributes
    ----------
    is_seed : ndarray of bool
    coarse_index : ndarray of int
        Coarse ordinal of each seed, -1 for F nodes.
    nbr_ptr, nbr_idx : ndarray of int
        CSR lists of the coarse neighborhood (seed node ids) of every node;
        empty for seeds.
    visit_order : ndarray of int
        Traversal order used for selection (descending future volume).
    future_volume : ndarray of float
    """

    is_seed: np.ndarray
    coarse_index: np.ndarray
    nbr_ptr: np.ndarray
    nbr_idx: np.ndarray
    visit_order: np.ndarray
    future_volume: np.ndarray

    @property
    def n_coarse(self):
        return int(self.is_seed.sum())

    @property
    def seeds(self):
        return np.flatnonzero(self.is_seed)

    def coarse_neighbors(self, i):
        return self.nbr_idx[self.nbr_ptr[i]:self.nbr_ptr[i + 1]]


@dataclass(frozen=True)
class InterpolationMatrix:
    """Row-stochastic fine-to-coarse membership matrix and the partition it was built from."""

    P: sp.csr_matrix
    partition: Partition

    @property
    def shape(self):
        return self.P.shape

    def toarray(self):
        return self.P.toarray()


def _strength_csr(g, rho):
    s = np.asarray(rho.strength if hasattr(rho, "strength") else rho, dtype=np.float64)
    if s.shape != g.indices.shape:
        raise ValidationError("coupling map does not match the graph's adjacency")
    return s


def future_volumes(g, rho):
    """``v_i + sum_j v_j rho_ij / sum_k rho_jk``: each neighbor donates volume by coupling share."""
    s = _strength_csr(g, rho)
    R = sp.csr_matrix((s, g.indices, g.indptr), shape=(g.n, g.n))
    totals = np.asarray(R.sum(axis=1)).reshape(-1)
    share = np.zeros(g.n)
    pos = totals > 0
    share[pos] = g.volumes[pos] / totals[pos]
    return g.volumes + R @ share


def future_volume_order(fv, n_buckets=None):
    """Rough descending order of ``fv`` using logarithmic buckets; ties by node id."""
    fv = np.asarray(fv, dtype=np.float64)
    n = len(fv)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    if n_buckets is None:
        n_buckets = int(np.ceil(np.log2(max(n, 2)))) + 1
    lo, hi = np.log2(fv.min()), np.log2(fv.max())
    if hi > lo:
        b = np.floor((np.log2(fv) - lo) / (hi - lo) * n_buckets).astype(np.int64)
        b = np.minimum(b, n_buckets - 1)
    else:
        b = np.zeros(n, dtype=np.int64)
    return np.lexsort((np.arange(n), -b))


@nb.njit(**_NUMBA)
def _select(indptr, indices, w, rho, order, theta1, theta2, is_seed):
    n = len(indptr) - 1
    rho_tot = np.zeros(n)
    w_tot = np.zeros(n)
    for i in range(n):
        for e in range(indptr[i], indptr[i + 1]):
            rho_tot[i] += rho[e]
            w_tot[i] += w[e]
    for i in order:
        if rho_tot[i] <= 0.0 or w_tot[i] <= 0.0:
            is_seed[i] = True
            continue
        rc = 0.0
        wc = 0.0
        for e in range(indptr[i], indptr[i + 1]):
            if is_seed[indices[e]]:
                rc += rho[e]
                wc += w[e]
        if not (rc / rho_tot[i] >= theta1 and wc / w_tot[i] >= theta2):
            is_seed[i] = True


@nb.njit(**_NUMBA)
def _better(r1, w1, j1, r2, w2, j2):
    if r1 != r2:
        return r1 > r2
    if w1 != w2:
        return w1 > w2
    return j1 < j2


@nb.njit(**_NUMBA)
def _neighborhoods(indptr, indices, w, rho, is_seed, order_cap):
    n = len(indptr) - 1
    ptr = np.zeros(n + 1, dtype=np.int64)
    for i in range(n):
        c = 0
        if not is_seed[i]:
            for e in range(indptr[i], indptr[i + 1]):
                if is_seed[indices[e]]:
                    c += 1
        ptr[i + 1] = ptr[i] + min(c, order_cap)
    out = np.empty(ptr[n], dtype=np.int64)
    for i in range(n):
        k = ptr[i + 1] - ptr[i]
        if k == 0:
            continue
        # partial selection sort of the best k seed neighbors
        chosen = np.full(k, -1, dtype=np.int64)
        for slot in range(k):
            best = -1
            for e in range(indptr[i], indptr[i + 1]):
                j = indices[e]
                if not is_seed[j]:
                    continue
                taken = False
                for q in range(slot):
                    if chosen[q] == e:
                        taken = True
                if taken:
                    continue
                if best < 0 or _better(rho[e], w[e], j, rho[best], w[best], indices[best]):
                    best = e
            chosen[slot] = best
        for slot in range(k):
            out[ptr[i] + slot] = indices[chosen[slot]]
    return ptr, out


def _finish_partition(g, rho, is_seed, order, fv, interp_order):
    s = _strength_csr(g, rho)
    while True:
        ptr, idx = _neighborhoods(g.indptr, g.indices, g.data, s, is_seed, interp_order)
        orphans = ~is_seed & (np.diff(ptr) == 0)
        if not orphans.any():
            break
        is_seed = is_seed | orphans
    coarse_index = np.full(g.n, -1, dtype=np.int64)
    coarse_index[is_seed] = np.arange(int(is_seed.sum()))
    return Partition(is_seed, coarse_index, ptr, idx, order, fv)


def select_seeds(g, rho, theta1=0.5, theta2=0.5, interp_order=1, order=None, fv=None):
    """Choose the seed set C by one pass in descending future-volume order.

    A visited node stays a fine (F) node iff its coupling share and its
    weight share towards the current C are at least ``theta1`` and
    ``theta2``; otherwise it joins C. When no node ends up in F the
    thresholds are halved once, and failing that every second node in
    traversal order becomes a seed. F nodes left without a seed neighbor are
    promoted to seeds.

    Parameters
    ----------
    g : Graph
        Undirected graph.
    rho : CouplingMap or ndarray
        Strength per adjacency entry.
    theta1, theta2 : float
        Coupling and weight thresholds in (0, 1).
    interp_order : int
        Maximum number of seeds in a coarse neighborhood.
    order, fv : ndarray, optional
        Traversal order and future volumes; computed when omitted.
    """
    if not (0 < theta1 < 1 and 0 < theta2 < 1):
        raise ValidationError("thresholds must lie in (0, 1)")
    if interp_order < 1:
        raise ValidationError("interpolation order must be at least 1")
    s = _strength_csr(g, rho)
    if fv is None:
        fv = future_volumes(g, s)
    if order is None:
        order = future_volume_order(fv)
    order = np.asarray(order, dtype=np.int64)

    is_seed = np.zeros(g.n, dtype=np.bool_)
    _select(g.indptr, g.indices, g.data, s, order, theta1, theta2, is_seed)
    if g.n > 1 and g.m > 0 and is_seed.all():
        logger.debug("seed selection stalled; halving thresholds")
        is_seed[:] = False
        _select(g.indptr, g.indices, g.data, s, order, theta1 / 2, theta2 / 2, is_seed)
        if is_seed.all():
            logger.debug("seed selection stalled twice; taking every second node")
            is_seed[:] = False
            is_seed[order[::2]] = True
    return _finish_partition(g, s, is_seed, order, fv, interp_order)


def build_interpolation(g, partition):
    """Interpolation matrix: seeds map to their own aggregate with weight 1, F nodes
    split over their coarse neighborhood proportionally to edge weight.

    F nodes with an empty neighborhood are promoted to singleton seeds first.
    """
    p = partition
    orphans = ~p.is_seed & (np.diff(p.nbr_ptr) == 0)
    if orphans.any():
        is_seed = p.is_seed | orphans
        coarse_index = np.full(g.n, -1, dtype=np.int64)
        coarse_index[is_seed] = np.arange(int(is_seed.sum()))
        ptr = np.zeros(g.n + 1, dtype=np.int64)
        counts = np.where(is_seed, 0, np.diff(p.nbr_ptr))
        np.cumsum(counts, out=ptr[1:])
        p = Partition(is_seed, coarse_index, ptr, p.nbr_idx, p.visit_order, p.future_volume)

    counts = np.where(p.is_seed, 1, np.diff(p.nbr_ptr))
    indptr = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    cols = np.empty(indptr[-1], dtype=np.int64)
    vals = np.empty(indptr[-1])
    seeds = np.flatnonzero(p.is_seed)
    cols[indptr[seeds]] = p.coarse_index[seeds]
    vals[indptr[seeds]] = 1.0
    _fill_f_rows(g.indptr, g.indices, g.data, p.is_seed, p.coarse_index,
                 p.nbr_ptr, p.nbr_idx, indptr, cols, vals)
    P = sp.csr_matrix((vals, cols, indptr), shape=(g.n, p.n_coarse))
    return InterpolationMatrix(P, p)


@nb.njit(**_NUMBA)
def _fill_f_rows(gptr, gidx, gw, is_seed, cindex, nptr, nidx, indptr, cols, vals):
    n = len(gptr) - 1
    for i in range(n):
        if is_seed[i]:
            continue
        k = nptr[i + 1] - nptr[i]
        total = 0.0
        for q in range(k):
            j = nidx[nptr[i] + q]
            wij = 0.0
            for e in range(gptr[i], gptr[i + 1]):
                if gidx[e] == j:
                    wij += gw[e]
            vals[indptr[i] + q] = wij
            cols[indptr[i] + q] = cindex[j]
            total += wij
        for q in range(k):
            if total > 0.0:
                vals[indptr[i] + q] /= total
            else:
                vals[indptr[i] + q] = 1.0 / k


def coarsen_graph(g, interp):
    """Coarse graph ``P^T W P`` without self-loops; coarse volumes ``P^T v``."""
    P = interp.P if isinstance(interp, InterpolationMatrix) else sp.csr_matrix(interp)
    Ac = (P.T @ g.adjacency @ P).tocsr()
    Ac.setdiag(0)
    Ac.eliminate_zeros()
    vc = P.T @ g.volumes
    return Graph.from_adjacency(Ac, volumes=vc)
