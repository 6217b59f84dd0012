"""Edge coupling strengths from relaxed random test vectors."""
from __future__ import annotations

from dataclasses import dataclass

import numba as nb
import numpy as np
import scipy.sparse as sp

from .exceptions import ContractError, ValidationError
from .graph import LaplacianView, laplacian

__all__ = ["CouplingMap", "compute_couplings", "couplings_from_vectors",
           "jor_sweep", "relax_test_vectors"]

EPS = 1e-12
MAX_STRENGTH_PER_VECTOR = -np.log2(EPS)


@dataclass(frozen=True)
class CouplingMap:
    """Coupling strength per adjacency entry, aligned with ``graph.indices``.

    Larger values mean the endpoints stayed closer through relaxation.
    """

    indptr: np.ndarray
    indices: np.ndarray
    strength: np.ndarray
    n_vectors: int

    def __getitem__(self, edge):
        i, j = edge
        lo, hi = self.indptr[i], self.indptr[i + 1]
        pos = lo + np.searchsorted(self.indices[lo:hi], j)
        if pos >= hi or self.indices[pos] != j:
            raise KeyError(edge)
        return float(self.strength[pos])

    def tocsr(self):
        n = len(self.indptr) - 1
        return sp.csr_matrix((self.strength, self.indices, self.indptr), shape=(n, n))

    def row_sums(self):
        return np.asarray(self.tocsr().sum(axis=1)).reshape(-1)

    def items(self):
        """Yield ``(i, j, strength)`` once per undirected edge (``i < j``)."""
        for i in range(len(self.indptr) - 1):
            for e in range(self.indptr[i], self.indptr[i + 1]):
                j = int(self.indices[e])
                if i < j:
                    yield i, j, float(self.strength[e])


def _as_laplacian(L):
    if isinstance(L, LaplacianView):
        return L
    return laplacian(L)


def _check_omega(omega):
    if not 0.0 <= omega <= 1.0:
        raise ValidationError(f"omega must lie in [0, 1], got {omega}")


def jor_sweep(L, chi, omega=0.5):
    """One Jacobi over-relaxation step ``(1 - omega) chi + omega D^-1 W chi``.

    ``chi`` may be a vector or an ``(n, R)`` block of vectors. Rows of isolated
    nodes are left unchanged.
    """
    _check_omega(omega)
    L = _as_laplacian(L)
    chi = np.asarray(chi, dtype=np.float64)
    d = L.diagonal
    avg = L.adjacency @ chi
    out = chi.copy()
    live = d > 0
    if chi.ndim == 1:
        out[live] = (1.0 - omega) * chi[live] + omega * avg[live] / d[live]
    else:
        out[live] = (1.0 - omega) * chi[live] + omega * avg[live] / d[live, None]
    return out


@nb.njit(cache=True, nogil=True)
def _jor_iterate(indptr, indices, data, chi, omega, iterations):
    n, R = chi.shape
    inv_d = np.zeros(n)
    for i in range(n):
        d = 0.0
        for e in range(indptr[i], indptr[i + 1]):
            d += data[e]
        if d > 0.0:
            inv_d[i] = 1.0 / d
    nxt = np.empty_like(chi)
    acc = np.empty(R)
    for _ in range(iterations):
        for i in range(n):
            if inv_d[i] == 0.0:
                for r in range(R):
                    nxt[i, r] = chi[i, r]
                continue
            for r in range(R):
                acc[r] = 0.0
            for e in range(indptr[i], indptr[i + 1]):
                j = indices[e]
                for r in range(R):
                    acc[r] += data[e] * chi[j, r]
            for r in range(R):
                nxt[i, r] = (1.0 - omega) * chi[i, r] + omega * acc[r] * inv_d[i]
        chi, nxt = nxt, chi
    return chi


def relax_test_vectors(g, n_vectors, iterations, omega, rng):
    """Draw ``n_vectors`` uniform vectors on [-1/2, 1/2] and apply ``iterations`` JOR sweeps.

    Returns an ``(n, n_vectors)`` array.
    """
    chi = rng.uniform(-0.5, 0.5, size=(g.n, n_vectors))
    return _jor_iterate(g.indptr, g.indices, g.data, chi, float(omega), int(iterations))


@nb.njit(cache=True, nogil=True)
def _strengths(indptr, indices, chi, out):
    n, R = chi.shape
    for i in range(n):
        for e in range(indptr[i], indptr[i + 1]):
            j = indices[e]
            s = 0.0
            for r in range(R):
                s += np.log2(max(abs(chi[i, r] - chi[j, r]), EPS))
            out[e] = -s


def couplings_from_vectors(g, chi):
    """Strength ``-sum_r lg max(|chi_i - chi_j|, eps)`` for each adjacency entry of ``g``."""
    chi = np.ascontiguousarray(chi, dtype=np.float64)
    if chi.ndim == 1:
        chi = chi[:, None]
    out = np.empty(len(g.indices))
    _strengths(g.indptr, g.indices, chi, out)
    return CouplingMap(g.indptr, g.indices, out, chi.shape[1])


def compute_couplings(g, n_vectors=5, iterations=20, omega=0.5, seed=None):
    """Algebraic-distance couplings of an undirected graph.

    Parameters
    ----------
    g : Graph
        Undirected graph.
    n_vectors : int
        Number of random test vectors (R).
    iterations : int
        JOR sweeps applied to each vector.
    omega : float
        JOR damping in [0, 1].
    seed : int or numpy.random.Generator, optional

    Returns
    -------
    CouplingMap
    """
    if g.directed:
        raise ContractError("couplings are defined on undirected graphs")
    if n_vectors < 1 or iterations < 1:
        raise ValidationError("n_vectors and iterations must be at least 1")
    _check_omega(omega)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    chi = relax_test_vectors(g, n_vectors, iterations, omega, rng)
    return couplings_from_vectors(g, chi)
