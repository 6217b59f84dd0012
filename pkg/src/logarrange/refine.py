"""Coarse-to-fine initialization, relaxation sweeps and node-by-node refinement."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numba as nb
import numpy as np

from .arrangement import _apply_swap, _swap_delta, cost, from_order, legalize
from .exceptions import ValidationError
from .graph import un
from .placement import DEFAULT_EXACT_THRESHOLD, _place_index

logger = logging.getLogger(__name__)

__all__ = [
    "RefineParams",
    "compatible_relaxation",
    "gs_relaxation",
    "initialize_fine",
    "nn_refinement",
]

_NUMBA = {"cache": True, "nogil": True}
ACCEPT_TOL = 1e-12
# A node placed onto a neighbor's coordinate is nudged by this fraction of
# the neighbor's half-volume so that it lands beside it rather than on it.
NUDGE = 1e-3


@dataclass(frozen=True)
class RefineParams:
    compat_sweeps: int = 20
    gs_sweeps: int = 20
    nn_k: int = 5
    nn_passes: int = 1
    tol: float = 1e-4
    exact_threshold: int = DEFAULT_EXACT_THRESHOLD
    gs: bool = True

    def __post_init__(self):
        for name in ("compat_sweeps", "gs_sweeps", "nn_k", "nn_passes", "exact_threshold"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be non-negative")
        if self.tol < 0:
            raise ValidationError("tol must be non-negative")


@nb.njit(**_NUMBA)
def _relax(indptr, indices, w, x, vol, visit, use_nbr, placed, tau, has_prev):
    maxdeg = 0
    for i in visit:
        maxdeg = max(maxdeg, indptr[i + 1] - indptr[i])
    bx = np.empty(maxdeg)
    bw = np.empty(maxdeg)
    bj = np.empty(maxdeg, dtype=np.int64)
    sx = np.empty(maxdeg)
    sw = np.empty(maxdeg)
    sj = np.empty(maxdeg, dtype=np.int64)
    for i in visit:
        k = 0
        for e in range(indptr[i], indptr[i + 1]):
            j = indices[e]
            if j != i and use_nbr[j] and placed[j]:
                bx[k] = x[j]
                bw[k] = w[e]
                bj[k] = j
                k += 1
        if k == 0:
            continue
        if k <= 32:
            # stable insertion sort into the s* buffers
            for q in range(k):
                p = q
                while p > 0 and sx[p - 1] > bx[q]:
                    sx[p] = sx[p - 1]
                    sw[p] = sw[p - 1]
                    sj[p] = sj[p - 1]
                    p -= 1
                sx[p] = bx[q]
                sw[p] = bw[q]
                sj[p] = bj[q]
        else:
            perm = np.argsort(bx[:k], kind="mergesort")
            for q in range(k):
                sx[q] = bx[perm[q]]
                sw[q] = bw[perm[q]]
                sj[q] = bj[perm[q]]
        t = _place_index(sx[:k], sw[:k], tau)
        xt = sx[t]
        jt = sj[t]
        left = 0.0
        right = 0.0
        for q in range(k):
            if sx[q] < xt:
                left += sw[q]
            elif sx[q] > xt:
                right += sw[q]
        if right > left:
            side = 1.0
        elif left > right:
            side = -1.0
        elif has_prev and placed[i] and x[i] < xt:
            side = -1.0
        else:
            side = 1.0
        x[i] = xt + side * NUDGE * vol[jt] / 2.0
        placed[i] = True


def _run_relax(g, x, visit, use_nbr, placed, tau, has_prev):
    _relax(g.indptr, g.indices, g.data, x, np.asarray(g.volumes), np.asarray(visit, dtype=np.int64),
           use_nbr, placed, int(tau), has_prev)


def _f_visit_order(partition):
    order = partition.visit_order
    return order[~partition.is_seed[order]]


def initialize_fine(g, partition, coarse, params=None):
    """Fine arrangement from a coarse one.

    Seeds take their aggregate's coordinate; each F node is then placed using
    only its seed neighbors; the result is legalized. F nodes without any
    placed neighbor go last.
    """
    params = params or RefineParams()
    g = un(g)
    if coarse.n != partition.n_coarse:
        raise ValidationError("coarse arrangement does not match the partition")
    x = np.full(g.n, np.inf)
    seeds = partition.seeds
    x[seeds] = coarse.coords[partition.coarse_index[seeds]]
    placed = partition.is_seed.copy()
    _run_relax(g, x, _f_visit_order(partition), partition.is_seed, placed,
               params.exact_threshold, False)
    return legalize(x, g.volumes)


def _sweeps(g, a, n_sweeps, tol, step, label):
    current = a
    c = cost(g, current)
    for s in range(n_sweeps):
        cand = step(current)
        c_new = cost(g, cand)
        if c_new > c:
            logger.debug("%s sweep %d rejected (%.6g > %.6g)", label, s, c_new, c)
            break
        gain = (c - c_new) / max(abs(c), 1e-300)
        current, c = cand, c_new
        if gain < tol:
            break
    return current


def compatible_relaxation(g, a, partition, sweeps=20, params=None):
    """Move F nodes over all their neighbors while seed coordinates stay fixed."""
    params = params or RefineParams()
    g = un(g)
    if partition.is_seed.all() or sweeps == 0:
        return a
    visit = _f_visit_order(partition)
    use_nbr = np.ones(g.n, dtype=np.bool_)

    def step(cur):
        x = np.array(cur.coords)
        placed = np.ones(g.n, dtype=np.bool_)
        _run_relax(g, x, visit, use_nbr, placed, params.exact_threshold, True)
        return legalize(x, g.volumes)

    return _sweeps(g, a, sweeps, params.tol, step, "compatible")


def gs_relaxation(g, a, sweeps=20, params=None):
    """Gauss-Seidel sweeps: every node, in rank order, moves to its best local position."""
    params = params or RefineParams()
    g = un(g)
    if sweeps == 0 or g.m == 0:
        return a
    use_nbr = np.ones(g.n, dtype=np.bool_)

    def step(cur):
        x = np.array(cur.coords)
        placed = np.ones(g.n, dtype=np.bool_)
        _run_relax(g, x, cur.order, use_nbr, placed, params.exact_threshold, True)
        return legalize(x, g.volumes)

    return _sweeps(g, a, sweeps, params.tol, step, "gs")


@nb.njit(**_NUMBA)
def _nn_pass(indptr, indices, w, order, ranks, x, vol, k, visit):
    n = len(order)
    total = 0.0
    moves = 0
    saved = np.empty(2 * k + 1)
    for i in visit:
        r0 = ranks[i]
        lo = max(0, r0 - k)
        hi = min(n - 1, r0 + k)
        for r in range(lo, hi + 1):
            saved[r - lo] = x[order[r]]
        best = 0.0
        best_r = r0
        cum = 0.0
        r = r0
        while r < hi:
            cum += _swap_delta(indptr, indices, w, x, vol, i, order[r + 1], 1.0)
            _apply_swap(order, ranks, x, vol, r)
            r += 1
            if cum < best:
                best = cum
                best_r = r
        while r > r0:
            _apply_swap(order, ranks, x, vol, r - 1)
            r -= 1
        cum = 0.0
        while r > lo:
            cum += _swap_delta(indptr, indices, w, x, vol, i, order[r - 1], -1.0)
            _apply_swap(order, ranks, x, vol, r - 1)
            r -= 1
            if cum < best:
                best = cum
                best_r = r
        while r < r0:
            _apply_swap(order, ranks, x, vol, r)
            r += 1
        for q in range(lo, hi + 1):
            x[order[q]] = saved[q - lo]
        if best < -ACCEPT_TOL:
            while r < best_r:
                _apply_swap(order, ranks, x, vol, r)
                r += 1
            while r > best_r:
                _apply_swap(order, ranks, x, vol, r - 1)
                r -= 1
            total += best
            moves += 1
    return total, moves


def nn_refinement(g, a, k=5, passes=1):
    """Node-by-node strict minimization.

    Each node, in current rank order, is tried at the ``k`` ranks to its left
    and right; the best insertion is applied only if it lowers the total cost.
    """
    if k < 0 or passes < 0:
        raise ValidationError("k and passes must be non-negative")
    g = un(g)
    if k == 0 or passes == 0 or g.m == 0 or g.n < 2:
        return a
    order = np.array(a.order)
    ranks = np.array(a.ranks)
    vol = np.asarray(g.volumes, dtype=np.float64)
    for p in range(passes):
        x = np.array(from_order(order, vol).coords)
        gain, moves = _nn_pass(g.indptr, g.indices, g.data, order, ranks, x, vol,
                               int(k), order.copy())
        logger.debug("nn pass %d: %d moves, delta %.6g", p, moves, gain)
        if moves == 0:
            break
    return from_order(order, vol)
