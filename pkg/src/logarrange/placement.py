"""Best position for a single node given its placed neighbors.

The exact rule tries every neighbor coordinate as a candidate (quadratic in the
neighbor count). The approximate rule picks the neighbor coordinate of maximal
kernel density, computed in linear time with two prefix passes.
"""
from __future__ import annotations

import numba as nb
import numpy as np

from .exceptions import ValidationError

__all__ = [
    "DEFAULT_EXACT_THRESHOLD",
    "bandwidth",
    "estimate_density",
    "candidate_energies",
    "place",
    "place_density",
    "place_exact",
]

EPS = 1e-12
DEFAULT_EXACT_THRESHOLD = 32
_NUMBA = {"cache": True, "nogil": True}


@nb.njit(**_NUMBA)
def _energy_at(xs, ws, k):
    s = 0.0
    xk = xs[k]
    for j in range(len(xs)):
        if j != k:
            s += ws[j] * np.log2(max(abs(xk - xs[j]), EPS))
    return s


@nb.njit(**_NUMBA)
def _argmin_exact(xs, ws):
    best = 0
    best_e = np.inf
    for k in range(len(xs)):
        e = _energy_at(xs, ws, k)
        if e < best_e:
            best_e = e
            best = k
    return best


@nb.njit(**_NUMBA)
def _density(xs, ps, h, out):
    k = len(xs)
    s = np.empty(k)
    r = np.empty(k)
    s[0] = ps[0]
    for t in range(1, k):
        s[t] = ps[t] + s[t - 1] * 2.0 ** ((xs[t - 1] - xs[t]) / h)
    r[k - 1] = ps[k - 1]
    for t in range(k - 2, -1, -1):
        r[t] = ps[t] + r[t + 1] * 2.0 ** ((xs[t] - xs[t + 1]) / h)
    for t in range(k):
        out[t] = s[t] + r[t] - ps[t]


@nb.njit(**_NUMBA)
def _bandwidth(xs):
    span = xs[len(xs) - 1] - xs[0]
    if span <= 1.0:
        return 1.0
    return span / (2.0 * np.log2(span))


@nb.njit(**_NUMBA)
def _argmax_density(xs, ws):
    d = np.empty(len(xs))
    _density(xs, ws, _bandwidth(xs), d)
    best = 0
    for t in range(1, len(xs)):
        if d[t] > d[best]:
            best = t
    return best


@nb.njit(**_NUMBA)
def _place_index(xs, ws, tau):
    """Index into the sorted sample chosen by the dispatching rule."""
    if len(xs) <= tau:
        return _argmin_exact(xs, ws)
    return _argmax_density(xs, ws)


def _sample(positions, weights=None):
    xs = np.asarray(positions, dtype=np.float64).reshape(-1)
    if len(xs) == 0:
        raise ValidationError("at least one placed neighbor is required")
    ws = np.ones_like(xs) if weights is None else np.asarray(weights, dtype=np.float64).reshape(-1)
    if ws.shape != xs.shape:
        raise ValidationError("one weight per neighbor is required")
    if np.any(ws < 0) or np.isnan(xs).any():
        raise ValidationError("weights must be non-negative and positions finite")
    order = np.argsort(xs, kind="stable")
    return xs[order], ws[order]


def candidate_energies(positions, weights=None):
    """Sorted positions and the energy of placing the node at each of them."""
    xs, ws = _sample(positions, weights)
    return xs, np.array([_energy_at(xs, ws, k) for k in range(len(xs))])


def place_exact(positions, weights=None):
    """Neighbor coordinate minimizing the node's finite log-distance energy.

    Candidate ``x_k`` scores ``sum_{j != k} w_j lg|x_k - x_j|``; coincident
    neighbors contribute ``lg(1e-12)``. Ties go to the smaller position.
    """
    xs, ws = _sample(positions, weights)
    return float(xs[_argmin_exact(xs, ws)])


def bandwidth(positions):
    """Kernel width ``N / (2 lg N)`` for sample range ``N``; 1 when ``N <= 1``."""
    xs = np.sort(np.asarray(positions, dtype=np.float64))
    return float(_bandwidth(xs))


def estimate_density(positions, weights, h):
    """Unnormalized density ``sum_j p_j 2^(-|x_t - x_j| / h)`` at each sorted sample ``x_t``.

    Runs in linear time; ``positions`` must be sorted ascending.
    """
    xs = np.asarray(positions, dtype=np.float64).reshape(-1)
    ps = np.asarray(weights, dtype=np.float64).reshape(-1)
    if not h > 0:
        raise ValidationError("bandwidth must be positive")
    if len(xs) == 0 or xs.shape != ps.shape:
        raise ValidationError("need matching, non-empty positions and weights")
    if np.any(np.diff(xs) < 0):
        raise ValidationError("positions must be sorted ascending")
    out = np.empty(len(xs))
    _density(xs, ps, float(h), out)
    return out


def place_density(positions, weights=None):
    """Neighbor coordinate of maximal kernel density (ties to the smaller position)."""
    xs, ws = _sample(positions, weights)
    return float(xs[_argmax_density(xs, ws)])


def place(positions, weights=None, exact_threshold=DEFAULT_EXACT_THRESHOLD):
    """Exact rule for at most ``exact_threshold`` neighbors, density rule above."""
    if exact_threshold < 0:
        raise ValidationError("exact_threshold must be non-negative")
    xs, ws = _sample(positions, weights)
    return float(xs[_place_index(xs, ws, int(exact_threshold))])
