import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logarrange import ContractError, Graph, ValidationError, laplacian
from logarrange.algebraic_distance import (MAX_STRENGTH_PER_VECTOR, compute_couplings,
                                           couplings_from_vectors, jor_sweep,
                                           relax_test_vectors)

from oracles import jor_matrix, matvec

EDGE = Graph(2, [0], [1])
TRIANGLE = Graph(3, [0, 1, 0], [1, 2, 2])


def random_graph(rng, n, p=0.4):
    iu = np.triu_indices(n, 1)
    keep = rng.random(len(iu[0])) < p
    return Graph(n, iu[0][keep], iu[1][keep], rng.uniform(0.1, 3, keep.sum()))


class TestJOR:
    def test_single_edge(self):
        assert jor_sweep(laplacian(EDGE), [0.2, -0.4], 0.5).tolist() == pytest.approx([-0.1, -0.1])

    def test_constant_fixed(self):
        g = random_graph(np.random.default_rng(3), 12)
        assert np.allclose(jor_sweep(g, np.full(12, 0.3), 0.7), 0.3)

    def test_triangle_matches_matrix_oracle(self):
        got = jor_sweep(TRIANGLE, [1.0, 0.0, 0.0], 0.5)
        H = jor_matrix([[0, 1, 1], [1, 0, 1], [1, 1, 0]], 0.5)
        assert got.tolist() == pytest.approx(matvec(H, [1.0, 0.0, 0.0]))
        assert got.tolist() == pytest.approx([0.5, 0.25, 0.25])

    def test_isolated_rows_unchanged(self):
        g = Graph(3, [0], [1])
        assert jor_sweep(g, [1.0, 0.0, 0.4], 0.5)[2] == 0.4

    def test_block_equals_columns(self):
        rng = np.random.default_rng(1)
        g = random_graph(rng, 10)
        chi = rng.uniform(-0.5, 0.5, (10, 3))
        block = jor_sweep(g, chi, 0.5)
        for r in range(3):
            assert np.allclose(block[:, r], jor_sweep(g, chi[:, r], 0.5))

    @pytest.mark.parametrize("omega", [-0.1, 1.5])
    def test_omega_range(self, omega):
        with pytest.raises(ValidationError):
            jor_sweep(EDGE, [0.0, 1.0], omega)

    def test_directed_rejected(self):
        with pytest.raises(ContractError):
            jor_sweep(Graph(2, [0], [1], directed=True), [0.0, 1.0])

    @given(st.integers(2, 20), st.floats(0, 1), st.integers(0, 2**32 - 1))
    @settings(max_examples=60)
    def test_preserves_range(self, n, omega, seed):
        rng = np.random.default_rng(seed)
        g = random_graph(rng, n)
        chi = rng.uniform(-0.5, 0.5, n)
        out = jor_sweep(g, chi, omega)
        assert np.max(np.abs(out)) <= np.max(np.abs(chi)) + 1e-15

    @given(st.integers(2, 15), st.integers(1, 6), st.integers(0, 2**32 - 1))
    @settings(max_examples=40)
    def test_compiled_iteration_matches_reference(self, n, iters, seed):
        rng = np.random.default_rng(seed)
        g = random_graph(rng, n)
        fast = relax_test_vectors(g, 2, iters, 0.5, np.random.default_rng(seed))
        chi = np.random.default_rng(seed).uniform(-0.5, 0.5, (n, 2))
        for _ in range(iters):
            chi = jor_sweep(g, chi, 0.5)
        assert np.allclose(fast, chi, rtol=0, atol=1e-14)


class TestCouplings:
    def test_coincident_endpoints_clamped(self):
        rho = couplings_from_vectors(EDGE, np.array([[0.1] * 5, [0.1] * 5]))
        assert rho[0, 1] == pytest.approx(5 * MAX_STRENGTH_PER_VECTOR)
        assert MAX_STRENGTH_PER_VECTOR == pytest.approx(39.863, abs=1e-3)

    def test_two_node_one_sweep_is_clamped_maximum(self):
        rho = compute_couplings(EDGE, n_vectors=1, iterations=1, omega=0.5, seed=0)
        assert rho[0, 1] == pytest.approx(MAX_STRENGTH_PER_VECTOR)

    def test_half_differences(self):
        chi = np.array([[0.25] * 5, [-0.25] * 5])
        assert couplings_from_vectors(EDGE, chi)[0, 1] == pytest.approx(5.0)

    def test_missing_edge_raises(self):
        rho = compute_couplings(Graph(3, [0], [1]), seed=0)
        with pytest.raises(KeyError):
            rho[0, 2]

    def test_items_once_per_edge(self):
        g = random_graph(np.random.default_rng(0), 8, 0.6)
        items = list(compute_couplings(g, seed=1).items())
        assert len(items) == g.m and all(i < j for i, j, _ in items)

    def test_deterministic(self):
        g = random_graph(np.random.default_rng(0), 30)
        a = compute_couplings(g, seed=7).strength
        b = compute_couplings(g, seed=7).strength
        assert a.tobytes() == b.tobytes()

    def test_directed_rejected(self):
        with pytest.raises(ContractError):
            compute_couplings(Graph(2, [0], [1], directed=True))

    @given(st.integers(2, 25), st.integers(1, 6), st.integers(0, 2**32 - 1))
    @settings(max_examples=50)
    def test_symmetric_and_bounded(self, n, R, seed):
        g = random_graph(np.random.default_rng(seed), n)
        rho = compute_couplings(g, n_vectors=R, iterations=5, seed=seed)
        M = rho.tocsr()
        assert (abs(M - M.T)).max() == 0 if M.nnz else True
        assert np.all(rho.strength > 0)
        assert np.all(rho.strength <= R * MAX_STRENGTH_PER_VECTOR + 1e-9)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=40)
    def test_monotone_discrimination(self, seed):
        rng = np.random.default_rng(seed)
        g = Graph(3, [0, 0], [1, 2])
        base = rng.uniform(-0.5, 0.5, 4)
        d_small = rng.uniform(1e-6, 0.2, 4)
        d_large = d_small + rng.uniform(1e-3, 0.2, 4)
        chi = np.stack([base, base + d_small, base + d_large])
        rho = couplings_from_vectors(g, chi)
        assert rho[0, 1] > rho[0, 2]
