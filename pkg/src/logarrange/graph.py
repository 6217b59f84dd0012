"""Weighted graph container, edge-list I/O and Laplacian access."""
from __future__ import annotations

import gzip
import io
import logging
import os
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .exceptions import ContractError, GraphFormatError, ValidationError

logger = logging.getLogger(__name__)

__all__ = [
    "Graph",
    "LaplacianView",
    "laplacian",
    "parse_edge_list",
    "read_edge_list",
    "read_volumes",
    "un",
    "write_edge_list",
]


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True).reshape(-1)
    a.setflags(write=False)
    return a


def _merge_undirected(n, src, dst, w):
    lo = np.minimum(src, dst)
    hi = np.maximum(src, dst)
    key = lo * np.int64(n) + hi
    uniq, inv = np.unique(key, return_inverse=True)
    merged = np.bincount(inv, weights=w, minlength=len(uniq))
    return uniq // n, uniq % n, merged


class Graph:
    """Immutable weighted graph with node volumes.

    Undirected graphs keep each edge once with ``src < dst`` (duplicates are
    merged by summing weights); directed graphs keep parallel edges as given.
    Nodes are ``0..n-1``; ``labels`` maps them back to the ids found in the
    input file.

    Parameters
    ----------
    n : int
        Number of nodes.
    src, dst : array_like of int
        Edge endpoints.
    weights : array_like of float, optional
        Non-negative edge weights, default 1.
    volumes : array_like of float, optional
        Positive node volumes, default 1.
    directed : bool, default False
    labels : array_like of int, optional
        Original node ids, default ``arange(n)``.
    """

    def __init__(self, n, src, dst, weights=None, volumes=None, directed=False,
                 labels=None, self_loops_dropped=0):
        n = int(n)
        if n < 0:
            raise ValidationError("node count must be non-negative")
        src = np.asarray(src, dtype=np.int64).reshape(-1)
        dst = np.asarray(dst, dtype=np.int64).reshape(-1)
        if src.shape != dst.shape:
            raise ValidationError("src and dst must have the same length")
        if weights is None:
            weights = np.ones(len(src))
        weights = np.asarray(weights, dtype=np.float64).reshape(-1)
        if weights.shape != src.shape:
            raise ValidationError("one weight per edge is required")
        if len(src) and (src.min() < 0 or dst.min() < 0
                         or src.max() >= n or dst.max() >= n):
            raise ValidationError("edge endpoint out of range")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise ValidationError("edge weights must be finite and non-negative")
        if volumes is None:
            volumes = np.ones(n)
        volumes = np.asarray(volumes, dtype=np.float64).reshape(-1)
        if volumes.shape != (n,):
            raise ValidationError("one volume per node is required")
        if not np.all(np.isfinite(volumes)) or np.any(volumes <= 0):
            raise ValidationError("node volumes must be finite and positive")

        loops = src == dst
        if loops.any():
            self_loops_dropped += int(loops.sum())
            keep = ~loops
            src, dst, weights = src[keep], dst[keep], weights[keep]
        if not directed and len(src):
            src, dst, weights = _merge_undirected(n, src, dst, weights)

        self.n = n
        self.directed = bool(directed)
        self.src = _frozen(src, np.int64)
        self.dst = _frozen(dst, np.int64)
        self.weights = _frozen(weights, np.float64)
        self.volumes = _frozen(volumes, np.float64)
        self.labels = _frozen(np.arange(n) if labels is None else labels, np.int64)
        if self.labels.shape != (n,):
            raise ValidationError("one label per node is required")
        self.self_loops_dropped = int(self_loops_dropped)

    @classmethod
    def from_adjacency(cls, adj, volumes=None, labels=None):
        """Build an undirected graph from a symmetric sparse matrix (diagonal ignored)."""
        upper = sp.triu(sp.csr_matrix(adj), k=1).tocoo()
        return cls(adj.shape[0], upper.row, upper.col, upper.data,
                   volumes=volumes, directed=False, labels=labels)

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return f"Graph(n={self.n}, m={self.m}, {kind})"

    @property
    def m(self):
        return len(self.src)

    @property
    def total_weight(self):
        return float(self.weights.sum())

    @property
    def total_volume(self):
        return float(self.volumes.sum())

    @cached_property
    def _index(self):
        if self.directed:
            rows, cols, w = self.src, self.dst, self.weights
        else:
            rows = np.concatenate([self.src, self.dst])
            cols = np.concatenate([self.dst, self.src])
            w = np.concatenate([self.weights, self.weights])
        perm = np.lexsort((cols, rows))
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=self.n), out=indptr[1:])
        out = (indptr, cols[perm].astype(np.int64), w[perm].astype(np.float64))
        for a in out:
            a.setflags(write=False)
        return out

    @property
    def indptr(self):
        return self._index[0]

    @property
    def indices(self):
        return self._index[1]

    @property
    def data(self):
        return self._index[2]

    @cached_property
    def adjacency(self):
        """CSR adjacency: both endpoints for undirected graphs, out-edges for directed ones.

        Parallel directed edges stay separate entries.
        """
        return sp.csr_matrix((self.data, self.indices, self.indptr),
                             shape=(self.n, self.n))

    def neighbors(self, i):
        """Return ``(ids, weights)`` of the neighbors (out-neighbors if directed) of ``i``."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.data[lo:hi]

    def degree(self):
        """Weighted degree (row sums of the adjacency)."""
        return np.asarray(self.adjacency.sum(axis=1)).reshape(-1)

    def edges(self):
        return list(zip(self.src.tolist(), self.dst.tolist(), self.weights.tolist()))

    def with_volumes(self, volumes):
        return Graph(self.n, self.src, self.dst, self.weights, volumes,
                     directed=self.directed, labels=self.labels,
                     self_loops_dropped=self.self_loops_dropped)

    def subgraph(self, nodes):
        """Induced subgraph on ``nodes`` (renumbered in the given order)."""
        nodes = np.asarray(nodes, dtype=np.int64)
        remap = np.full(self.n, -1, dtype=np.int64)
        remap[nodes] = np.arange(len(nodes))
        a, b = remap[self.src], remap[self.dst]
        keep = (a >= 0) & (b >= 0)
        return Graph(len(nodes), a[keep], b[keep], self.weights[keep],
                     self.volumes[nodes], directed=self.directed,
                     labels=self.labels[nodes])


def un(g):
    """Undirected working graph; reciprocal and parallel edge weights are summed."""
    if not g.directed:
        return g
    return Graph(g.n, g.src, g.dst, g.weights, g.volumes, directed=False,
                 labels=g.labels, self_loops_dropped=g.self_loops_dropped)


class LaplacianView:
    """Read-only view of ``L = D - W`` for an undirected graph."""

    def __init__(self, g):
        self.graph = g
        self.adjacency = g.adjacency
        self.diagonal = g.degree()
        self.diagonal.setflags(write=False)

    @property
    def shape(self):
        return (self.graph.n, self.graph.n)

    def row(self, i):
        """Return ``(columns, values)`` of row ``i`` including the diagonal entry."""
        ids, w = self.graph.neighbors(i)
        return np.concatenate([[i], ids]), np.concatenate([[self.diagonal[i]], -w])

    def rows(self):
        for i in range(self.graph.n):
            yield self.row(i)

    def matvec(self, x):
        return self.diagonal * x - self.adjacency @ x

    def toarray(self):
        return np.diag(self.diagonal) - self.adjacency.toarray()


def laplacian(g):
    if g.directed:
        raise ContractError("laplacian() requires an undirected graph; apply un() first")
    return LaplacianView(g)


def _open_text(path):
    path = os.fspath(path)
    if path.endswith(".gz"):
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8")
    return open(path, encoding="utf-8")


def parse_edge_list(stream, weighted=False, directed=False):
    """Parse a whitespace-separated edge list.

    Each non-comment line is ``src dst`` or ``src dst weight``; ``#`` starts a
    comment line. Node ids are remapped densely in first-seen order. Without
    ``weighted`` a third column is ignored and every edge gets weight 1.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    ids = {}
    src, dst, wts = [], [], []
    loops = 0
    for lineno, line in enumerate(stream, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) < 2 or len(fields) > 3:
            raise GraphFormatError(f"expected 2 or 3 fields, got {len(fields)}", lineno)
        try:
            a, b = int(fields[0]), int(fields[1])
        except ValueError:
            raise GraphFormatError(f"node ids must be integers: {line!r}", lineno) from None
        if a < 0 or b < 0:
            raise GraphFormatError("node ids must be non-negative", lineno)
        w = 1.0
        if weighted and len(fields) == 3:
            try:
                w = float(fields[2])
            except ValueError:
                raise GraphFormatError(f"bad weight {fields[2]!r}", lineno) from None
            if not w >= 0 or w == float("inf"):
                raise ValidationError(f"line {lineno}: weight must be finite and non-negative")
        ia = ids.setdefault(a, len(ids))
        ib = ids.setdefault(b, len(ids))
        if ia == ib:
            loops += 1
            continue
        src.append(ia)
        dst.append(ib)
        wts.append(w)
    if not ids:
        raise ValidationError("empty graph: no edges found")
    if loops:
        logger.warning("dropped %d self-loop(s)", loops)
    labels = np.fromiter(ids.keys(), dtype=np.int64, count=len(ids))
    return Graph(len(ids), src, dst, wts, directed=directed, labels=labels,
                 self_loops_dropped=loops)


def read_edge_list(path, weighted=False, directed=False, volumes=None):
    """Read an edge-list file (``.gz`` allowed), optionally with a volumes file."""
    with _open_text(path) as fh:
        g = parse_edge_list(fh, weighted=weighted, directed=directed)
    if volumes is not None:
        with _open_text(volumes) as fh:
            g = g.with_volumes(read_volumes(fh, g))
    return g


def read_volumes(stream, g):
    """Parse ``node volume`` lines (original node ids); unlisted nodes keep volume 1."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    index = {int(lab): i for i, lab in enumerate(g.labels)}
    vol = np.ones(g.n)
    for lineno, line in enumerate(stream, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 2:
            raise GraphFormatError("expected 'node volume'", lineno)
        try:
            node, v = int(fields[0]), float(fields[1])
        except ValueError:
            raise GraphFormatError(f"malformed volume line {line!r}", lineno) from None
        if node not in index:
            raise ValidationError(f"line {lineno}: unknown node id {node}")
        if not v > 0 or v == float("inf"):
            raise ValidationError(f"line {lineno}: volume must be positive")
        vol[index[node]] = v
    return vol


def write_edge_list(g, stream, weighted=None):
    """Write ``g`` as an edge list using its original labels, edges sorted by (src, dst).

    Isolated nodes are written as self-loop lines so that parsing the output
    recovers the node set.
    """
    if weighted is None:
        weighted = bool(np.any(g.weights != 1.0))
    order = np.lexsort((g.dst, g.src))
    lab = g.labels
    for k in order:
        a, b = lab[g.src[k]], lab[g.dst[k]]
        if weighted:
            stream.write(f"{a} {b} {float(g.weights[k])!r}\n")
        else:
            stream.write(f"{a} {b}\n")
    touched = np.zeros(g.n, dtype=bool)
    touched[g.src] = True
    touched[g.dst] = True
    for i in np.flatnonzero(~touched):
        stream.write(f"{lab[i]} {lab[i]}\n")
