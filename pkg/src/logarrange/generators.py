"""Synthetic graphs for tests and benchmarks.

``from_spec`` understands strings such as ``"grid:rows=100,cols=50"`` or
``"pa:n=10000,m=3,seed=1"`` so that benchmark manifests can name generated
graphs instead of files.
"""
from __future__ import annotations

import networkx as nx
import numpy as np

from .exceptions import ValidationError
from .graph import Graph


def path(n):
    return Graph(n, np.arange(n - 1), np.arange(1, n))


def grid(rows, cols):
    idx = np.arange(rows * cols).reshape(rows, cols)
    src = np.concatenate([idx[:, :-1].ravel(), idx[:-1, :].ravel()])
    dst = np.concatenate([idx[:, 1:].ravel(), idx[1:, :].ravel()])
    return Graph(rows * cols, src, dst)


def star(leaves):
    """Center 0 joined to nodes ``1..leaves``."""
    return Graph(leaves + 1, np.zeros(leaves, dtype=np.int64), np.arange(1, leaves + 1))


def _from_nx(G):
    e = np.array(list(G.edges()), dtype=np.int64).reshape(-1, 2)
    return Graph(G.number_of_nodes(), e[:, 0], e[:, 1])


def random_regular(n, d, seed=0):
    return _from_nx(nx.random_regular_graph(d, n, seed=seed))


def preferential_attachment(n, m, seed=0):
    return _from_nx(nx.barabasi_albert_graph(n, m, seed=seed))


def shuffled(g, seed=0):
    """Same graph with node ids randomly permuted."""
    perm = np.random.default_rng(seed).permutation(g.n)
    return Graph(g.n, perm[g.src], perm[g.dst], g.weights, g.volumes[np.argsort(perm)],
                 directed=g.directed)


GENERATORS = {
    "path": (path, ("n",)),
    "grid": (grid, ("rows", "cols")),
    "star": (star, ("leaves",)),
    "regular": (random_regular, ("n", "d", "seed")),
    "pa": (preferential_attachment, ("n", "m", "seed")),
}


def from_spec(spec):
    """Build a graph from ``"name:key=value,..."``; an optional ``shuffle=SEED`` relabels it."""
    name, _, rest = spec.partition(":")
    if name not in GENERATORS:
        raise ValidationError(f"unknown generator {name!r}; choose from {sorted(GENERATORS)}")
    fn, allowed = GENERATORS[name]
    kwargs = {}
    for part in filter(None, rest.split(",")):
        key, _, val = part.partition("=")
        kwargs[key.strip()] = int(val)
    shuffle = kwargs.pop("shuffle", None)
    unknown = set(kwargs) - set(allowed)
    if unknown:
        raise ValidationError(f"unknown parameter(s) for {name}: {sorted(unknown)}")
    g = fn(**kwargs)
    return g if shuffle is None else shuffled(g, shuffle)
