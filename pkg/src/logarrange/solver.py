"""Multilevel V-cycle for the generalized minimum logarithmic arrangement."""
from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field, replace

import numba as nb
import numpy as np

from .algebraic_distance import compute_couplings
from .arrangement import EPS, beta, cost, from_order
from .coarsening import (build_interpolation, coarsen_graph, future_volume_order,
                         future_volumes, select_seeds)
from .exceptions import ContractError, ValidationError
from .graph import un
from .refine import (RefineParams, compatible_relaxation, gs_relaxation,
                     initialize_fine, nn_refinement)

logger = logging.getLogger(__name__)

__all__ = ["PRESETS", "SolveResult", "SolverParams", "solve", "solve_exhaustive", "vcycle"]

EXHAUSTIVE_CAP = 10


@dataclass(frozen=True)
class SolverParams:
    """Tunables of one V-cycle. Use :meth:`preset` for the named configurations."""

    theta1: float = 0.5
    theta2: float = 0.5
    omega: float = 0.5
    n_vectors: int = 5
    jor_iters: int = 20
    interp_order: int = 1
    coarsest_size: int = 9
    refine: RefineParams = field(default_factory=RefineParams)
    seed: int = 0
    name: str = "default"

    def __post_init__(self):
        if not (0 < self.theta1 < 1 and 0 < self.theta2 < 1):
            raise ValidationError("theta1 and theta2 must lie in (0, 1)")
        if not 0 <= self.omega <= 1:
            raise ValidationError("omega must lie in [0, 1]")
        if self.n_vectors < 1 or self.jor_iters < 1:
            raise ValidationError("n_vectors and jor_iters must be at least 1")
        if self.interp_order < 1:
            raise ValidationError("interp_order must be at least 1")
        if not 2 <= self.coarsest_size <= EXHAUSTIVE_CAP:
            raise ValidationError(f"coarsest_size must lie in [2, {EXHAUSTIVE_CAP}]")

    @classmethod
    def preset(cls, name="default", **overrides):
        if name not in PRESETS:
            raise ValidationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        base = PRESETS[name]
        refine_fields = {f for f in RefineParams.__dataclass_fields__}
        rkw = {k: overrides.pop(k) for k in list(overrides) if k in refine_fields}
        return replace(base, refine=replace(base.refine, **rkw), **overrides)

    def to_dict(self):
        d = asdict(self)
        d.update(d.pop("refine"))
        return d


PRESETS = {
    "default": SolverParams(),
    "fast": SolverParams(n_vectors=1, refine=RefineParams(compat_sweeps=5, gs_sweeps=5, nn_k=0),
                         name="fast"),
    "slow": SolverParams(refine=RefineParams(compat_sweeps=40, gs_sweeps=40, nn_k=25), name="slow"),
}


@dataclass
class SolveResult:
    arrangement: object
    cost: float
    beta: float
    levels: list
    timings: dict
    params: SolverParams

    @property
    def order(self):
        return self.arrangement.order

    @property
    def ranks(self):
        return self.arrangement.ranks


@nb.njit(cache=True, nogil=True)
def _full_cost(src, dst, w, x):
    c = 0.0
    for e in range(len(src)):
        c += w[e] * np.log2(max(abs(x[src[e]] - x[dst[e]]), EPS))
    return c


@nb.njit(cache=True, nogil=True)
def _branch_and_bound(n, src, dst, w, vol):
    # Lexicographic DFS; leaves are scored with _full_cost so ties and rounding
    # match plain enumeration. Pruning keeps a margin far above rounding error.
    m = len(src)
    lb = np.empty(m)
    scale = 1.0
    lg_total = abs(np.log2(max(vol.sum(), EPS)))
    for e in range(m):
        lb[e] = w[e] * np.log2(max((vol[src[e]] + vol[dst[e]]) / 2.0, EPS))
        scale += abs(lb[e]) + w[e] * lg_total
    margin = 1e-9 * scale
    rem = lb.sum()
    perm = np.empty(n, dtype=np.int64)
    best = np.arange(n)
    best_c = np.inf
    used = np.zeros(n, dtype=np.bool_)
    x = np.empty(n)
    acc = np.zeros(n + 1)
    partial = np.zeros(n + 1)
    rem_at = np.zeros(n + 1)
    nxt = np.zeros(n + 1, dtype=np.int64)
    rem_at[0] = rem
    d = 0
    while d >= 0:
        if d == n:
            c = _full_cost(src, dst, w, x)
            if c < best_c:
                best_c = c
                best[:] = perm
            d -= 1
            used[perm[d]] = False
            continue
        u = nxt[d]
        while u < n and used[u]:
            u += 1
        if u >= n:
            nxt[d] = 0
            d -= 1
            if d >= 0:
                used[perm[d]] = False
            continue
        nxt[d] = u + 1
        x[u] = acc[d] + vol[u] / 2.0
        p = partial[d]
        r = rem_at[d]
        for e in range(m):
            a, b = src[e], dst[e]
            if a == u and used[b]:
                p += w[e] * np.log2(max(abs(x[u] - x[b]), EPS))
                r -= lb[e]
            elif b == u and used[a]:
                p += w[e] * np.log2(max(abs(x[u] - x[a]), EPS))
                r -= lb[e]
        if p + r > best_c + margin:
            continue
        perm[d] = u
        used[u] = True
        acc[d + 1] = acc[d] + vol[u]
        partial[d + 1] = p
        rem_at[d + 1] = r
        d += 1
    return best


@nb.njit(cache=True, nogil=True)
def _enumerate_all(n, src, dst, w, vol):
    perm = np.arange(n)
    best = perm.copy()
    best_c = np.inf
    x = np.empty(n)
    while True:
        acc = 0.0
        for r in range(n):
            i = perm[r]
            x[i] = acc + vol[i] / 2.0
            acc += vol[i]
        c = 0.0
        for e in range(len(src)):
            c += w[e] * np.log2(max(abs(x[src[e]] - x[dst[e]]), EPS))
        if c < best_c:
            best_c = c
            best[:] = perm
        k = n - 2
        while k >= 0 and perm[k] >= perm[k + 1]:
            k -= 1
        if k < 0:
            break
        m = n - 1
        while perm[m] <= perm[k]:
            m -= 1
        perm[k], perm[m] = perm[m], perm[k]
        a, b = k + 1, n - 1
        while a < b:
            perm[a], perm[b] = perm[b], perm[a]
            a += 1
            b -= 1
    return best


def solve_exhaustive(g):
    """Optimal arrangement by enumerating all orders (lexicographically first optimum)."""
    if g.n > EXHAUSTIVE_CAP:
        raise ContractError(f"exhaustive search is capped at {EXHAUSTIVE_CAP} nodes, got {g.n}")
    if g.n == 0:
        return from_order(np.zeros(0, dtype=np.int64), g.volumes)
    order = _branch_and_bound(g.n, g.src, g.dst, g.weights, np.asarray(g.volumes))
    return from_order(order, g.volumes)


def _with_isolated_last(g, core, solve_core):
    iso = np.setdiff1d(np.arange(g.n), core)
    a = solve_core(g.subgraph(core))
    return from_order(np.concatenate([core[a.order], iso]), g.volumes)


def _active_nodes(g):
    touched = np.zeros(g.n, dtype=bool)
    pos = g.weights > 0
    touched[g.src[pos]] = True
    touched[g.dst[pos]] = True
    return np.flatnonzero(touched)


def _drop_zero_weights(g):
    if np.all(g.weights > 0):
        return g
    keep = g.weights > 0
    return type(g)(g.n, g.src[keep], g.dst[keep], g.weights[keep], g.volumes,
                   directed=False, labels=g.labels)


def _uncoarsen(g, a, partition, params, trace):
    rp = params.refine
    t0 = time.perf_counter()
    a = compatible_relaxation(g, a, partition, rp.compat_sweeps, rp)
    if rp.gs:
        a = gs_relaxation(g, a, rp.gs_sweeps, rp)
    t1 = time.perf_counter()
    a = nn_refinement(g, a, rp.nn_k, rp.nn_passes)
    t2 = time.perf_counter()
    trace["t_relax"] = t1 - t0
    trace["t_refine"] = t2 - t1
    return a


def _vcycle(g, params, rng, levels, depth):
    if g.n <= params.coarsest_size:
        levels.append({"level": depth, "n": g.n, "m": g.m, "volume": g.total_volume,
                       "weight": g.total_weight, "exhaustive": True})
        return solve_exhaustive(g)
    g = _drop_zero_weights(g)
    core = _active_nodes(g)
    if len(core) < g.n:
        if len(core) == 0:
            return from_order(np.arange(g.n), g.volumes)
        return _with_isolated_last(g, core, lambda sub: _vcycle(sub, params, rng, levels, depth))

    entry = {"level": depth, "n": g.n, "m": g.m, "volume": g.total_volume,
             "weight": g.total_weight, "exhaustive": False}
    levels.append(entry)
    t0 = time.perf_counter()
    rho = compute_couplings(g, params.n_vectors, params.jor_iters, params.omega, rng)
    fv = future_volumes(g, rho)
    part = select_seeds(g, rho, params.theta1, params.theta2, params.interp_order,
                        order=future_volume_order(fv), fv=fv)
    interp = build_interpolation(g, part)
    part = interp.partition
    entry["n_coarse"] = part.n_coarse
    if part.n_coarse >= g.n:
        logger.warning("coarsening made no progress at level %d (n=%d)", depth, g.n)
        entry["t_coarsen"] = time.perf_counter() - t0
        return _uncoarsen(g, from_order(np.arange(g.n), g.volumes), part, params, entry)
    gc = coarsen_graph(g, interp)
    entry["volume_coarse"] = gc.total_volume
    entry["t_coarsen"] = time.perf_counter() - t0

    coarse = _vcycle(gc, params, rng, levels, depth + 1)

    t1 = time.perf_counter()
    a = initialize_fine(g, part, coarse, params.refine)
    entry["t_init"] = time.perf_counter() - t1
    entry["cost_init"] = cost(g, a)
    a = _uncoarsen(g, a, part, params, entry)
    entry["cost_final"] = cost(g, a)
    logger.debug("level %d: n=%d cost %.6g -> %.6g", depth, g.n,
                 entry["cost_init"], entry["cost_final"])
    return a


def vcycle(g, params=None, levels=None):
    """One V-cycle on an undirected graph.

    Graphs with at most ``params.coarsest_size`` nodes are solved exactly.
    Otherwise couplings, seeds and the interpolation are computed, the coarse
    graph is solved recursively, and its arrangement is interpolated back,
    relaxed and refined. Nodes without edges are placed last at every level.
    """
    if g.directed:
        raise ContractError("vcycle() expects an undirected graph; use solve() for directed input")
    params = params or SolverParams()
    levels = [] if levels is None else levels
    rng = np.random.default_rng(params.seed)
    return _vcycle(g, params, rng, levels, 0)


def solve(g, params=None):
    """Arrange any graph: run the V-cycle on ``un(g)`` and score the result on ``g``.

    Nodes without edges are ranked last, in id order.

    Returns
    -------
    SolveResult
    """
    params = params or SolverParams()
    t0 = time.perf_counter()
    work = un(g)
    levels = []
    core = _active_nodes(work)
    if len(core) == 0:
        a = from_order(np.arange(g.n), g.volumes)
    elif len(core) < g.n:
        a = _with_isolated_last(work, core, lambda sub: vcycle(sub, params, levels))
    else:
        a = vcycle(work, params, levels)
    total = time.perf_counter() - t0
    timings = {"total": total}
    for key in ("t_coarsen", "t_init", "t_relax", "t_refine"):
        timings[key[2:]] = float(sum(lv.get(key, 0.0) for lv in levels))
    c = cost(g, a)
    b = beta(g, a) if g.total_weight > 0 else 0.0
    return SolveResult(a, c, b, levels, timings, params)
