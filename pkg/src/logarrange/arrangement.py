"""Arrangements (orderings with center-of-mass coordinates) and their cost."""
from __future__ import annotations

import io
import os

import numba as nb
import numpy as np

from .exceptions import ContractError, GraphFormatError, ValidationError

__all__ = [
    "Arrangement",
    "beta",
    "cost",
    "cost_delta_move",
    "from_order",
    "legalize",
    "read_permutation",
    "write_permutation",
]

EPS = 1e-12
_NUMBA = {"cache": True, "nogil": True}


class Arrangement:
    """A node ordering together with its legalized coordinates.

    ``order[r]`` is the node at (0-based) rank ``r``; ``ranks`` is the inverse
    permutation; ``coords[i]`` is the center of node ``i``'s segment.
    Instances are built through :func:`legalize` or :func:`from_order`.
    """

    __slots__ = ("order", "ranks", "coords", "volumes")

    def __init__(self, order, coords, volumes):
        self.order = order
        self.coords = coords
        self.volumes = volumes
        self.ranks = np.empty_like(order)
        self.ranks[order] = np.arange(len(order))
        for a in (self.order, self.ranks, self.coords):
            a.setflags(write=False)

    @property
    def n(self):
        return len(self.order)

    def __eq__(self, other):
        return isinstance(other, Arrangement) and np.array_equal(self.order, other.order)

    def __repr__(self):
        head = self.order[:8].tolist()
        return f"Arrangement(n={self.n}, order={head}{'...' if self.n > 8 else ''})"

    def reversed(self):
        return from_order(self.order[::-1], self.volumes)


def _coords_from_order(order, volumes):
    v = volumes[order]
    before = np.empty_like(v)
    if len(v):
        before[0] = 0.0
        np.cumsum(v[:-1], out=before[1:])
    x = np.empty_like(v)
    x[order] = before + v / 2
    return x


def from_order(order, volumes):
    """Arrangement placing ``order[0]`` first, ``order[1]`` second, and so on."""
    order = np.asarray(order, dtype=np.int64)
    volumes = np.asarray(volumes, dtype=np.float64)
    n = len(volumes)
    if order.shape != (n,) or not np.array_equal(np.sort(order), np.arange(n)):
        raise ValidationError("order must be a permutation of 0..n-1")
    return Arrangement(order.copy(), _coords_from_order(order, volumes), volumes)


def legalize(raw, volumes):
    """Turn raw real coordinates into a legal arrangement.

    Nodes are ranked by ``raw`` (ties broken by node id) and moved to the
    centers of consecutive segments of length ``volumes``.

    >>> legalize([0.9, 0.1, 0.5], [1, 1, 1]).coords
    array([2.5, 0.5, 1.5])
    """
    raw = np.asarray(raw, dtype=np.float64)
    volumes = np.asarray(volumes, dtype=np.float64)
    if raw.shape != volumes.shape:
        raise ValidationError("one coordinate per node is required")
    if np.isnan(raw).any():
        raise ValidationError("NaN coordinate")
    if np.any(volumes <= 0):
        raise ValidationError("volumes must be positive")
    order = np.argsort(raw, kind="stable")
    return Arrangement(order, _coords_from_order(order, volumes), volumes)


def _check_pair(g, a):
    if not isinstance(a, Arrangement):
        raise ContractError("expected a legalized Arrangement")
    if a.n != g.n:
        raise ContractError(f"arrangement has {a.n} nodes, graph has {g.n}")


def cost(g, a):
    """Sum of ``w_ij * lg|x_i - x_j|`` over the edges of ``g``.

    Directed graphs are scored edge by edge, which equals the cost on ``un(g)``.
    """
    _check_pair(g, a)
    if g.m == 0:
        return 0.0
    d = np.abs(a.coords[g.src] - a.coords[g.dst])
    return float(np.dot(g.weights, np.log2(np.maximum(d, EPS))))


def beta(g, a):
    """Bits per link: ``cost(g, a) / total edge weight``."""
    total = g.total_weight
    if not total > 0:
        raise ValidationError("beta is undefined for a graph with zero total weight")
    return cost(g, a) / total


@nb.njit(**_NUMBA)
def _swap_delta(indptr, indices, data, x, vol, i, j, sign):
    # i moves by sign*vol[j], j moves by -sign*vol[i]; only edges touching i or j change.
    di = sign * vol[j]
    dj = -sign * vol[i]
    delta = 0.0
    for e in range(indptr[i], indptr[i + 1]):
        u = indices[e]
        if u == j:
            continue
        old = abs(x[i] - x[u])
        new = abs(x[i] + di - x[u])
        delta += data[e] * (np.log2(max(new, EPS)) - np.log2(max(old, EPS)))
    for e in range(indptr[j], indptr[j + 1]):
        u = indices[e]
        if u == i:
            continue
        old = abs(x[j] - x[u])
        new = abs(x[j] + dj - x[u])
        delta += data[e] * (np.log2(max(new, EPS)) - np.log2(max(old, EPS)))
    return delta


@nb.njit(**_NUMBA)
def _apply_swap(order, ranks, x, vol, r):
    # exchange the nodes at ranks r and r+1
    i = order[r]
    j = order[r + 1]
    x[i] += vol[j]
    x[j] -= vol[i]
    order[r] = j
    order[r + 1] = i
    ranks[j] = r
    ranks[i] = r + 1


@nb.njit(**_NUMBA)
def _move_delta(indptr, indices, data, order, ranks, x, vol, i, target):
    """Cost change of moving ``i`` to rank ``target``; state is restored on return."""
    start = ranks[i]
    total = 0.0
    r = start
    while r < target:
        j = order[r + 1]
        total += _swap_delta(indptr, indices, data, x, vol, i, j, 1.0)
        _apply_swap(order, ranks, x, vol, r)
        r += 1
    while r > target:
        j = order[r - 1]
        total += _swap_delta(indptr, indices, data, x, vol, i, j, -1.0)
        _apply_swap(order, ranks, x, vol, r - 1)
        r -= 1
    while r < start:
        _apply_swap(order, ranks, x, vol, r)
        r += 1
    while r > start:
        _apply_swap(order, ranks, x, vol, r - 1)
        r -= 1
    return total


def _working_state(a):
    return a.order.copy(), a.ranks.copy(), a.coords.copy()


def _sym_csr(g):
    from .graph import un
    u = un(g)
    return u.indptr, u.indices, u.data


def cost_delta_move(g, a, i, r):
    """Exact cost change of removing node ``i`` and reinserting it at rank ``r``.

    Only edges incident to ``i`` and to the nodes between its old and new rank
    are visited.
    """
    _check_pair(g, a)
    if not 0 <= r < a.n:
        raise ValidationError(f"target rank {r} outside 0..{a.n - 1}")
    indptr, indices, data = _sym_csr(g)
    order, ranks, x = _working_state(a)
    vol = np.asarray(a.volumes, dtype=np.float64)
    return float(_move_delta(indptr, indices, data, order, ranks, x, vol, int(i), int(r)))


def apply_move(a, i, r):
    """Arrangement obtained by moving node ``i`` to rank ``r``."""
    order = a.order.tolist()
    order.remove(i)
    order.insert(r, i)
    return from_order(order, a.volumes)


def write_permutation(a, stream, labels=None):
    """One line per rank holding the (original) node id at that rank."""
    ids = a.order if labels is None else np.asarray(labels)[a.order]
    stream.write("".join(f"{v}\n" for v in ids.tolist()))


def read_permutation(stream, g):
    """Read a permutation file written against ``g``'s original labels."""
    if isinstance(stream, (str, os.PathLike)) and os.path.exists(stream):
        with open(stream, encoding="utf-8") as fh:
            return read_permutation(fh, g)
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    index = {int(lab): i for i, lab in enumerate(g.labels)}
    order = []
    seen = set()
    for lineno, line in enumerate(stream, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            lab = int(line.split()[0])
        except ValueError:
            raise GraphFormatError(f"bad node id {line!r}", lineno) from None
        if lab not in index:
            raise ValidationError(f"line {lineno}: node id {lab} is not in the graph")
        if lab in seen:
            raise ValidationError(f"line {lineno}: node id {lab} appears twice")
        seen.add(lab)
        order.append(index[lab])
    if len(order) != g.n:
        missing = [int(lab) for lab in g.labels if int(lab) not in seen]
        shown = ", ".join(map(str, missing[:10]))
        raise ValidationError(f"permutation is missing {len(missing)} node id(s): {shown}")
    return from_order(order, g.volumes)
