import numpy as np
import pytest
import scipy.sparse as sp
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from logarrange import Graph, LogArrangement, ValidationError, beta, from_order, solve
from logarrange.generators import GENERATORS, from_spec, grid, shuffled, star
from logarrange.validation import check_graph, check_permutation


class TestEstimator:
    def test_params_round_trip(self):
        est = LogArrangement(preset="fast", nn_k=2, random_state=3)
        p = est.get_params()
        assert p["preset"] == "fast" and p["nn_k"] == 2 and p["random_state"] == 3
        c = clone(est)
        assert c.get_params() == p
        est.set_params(theta1=0.4)
        assert est.solver_params().theta1 == 0.4

    def test_fit_attributes_match_solve(self):
        g = grid(10, 10)
        est = LogArrangement(random_state=2).fit(g)
        r = solve(g, est.solver_params())
        assert est.order_.tolist() == r.order.tolist()
        assert est.beta_ == r.beta and est.n_nodes_ == 100
        assert sorted(est.ranks_[est.order_].tolist()) == list(range(100))

    def test_transform_graph(self):
        g = shuffled(grid(6, 6), seed=1)
        est = LogArrangement().fit(g)
        h = est.transform(g)
        assert h.n == g.n and h.m == g.m
        assert beta(h, from_order(np.arange(h.n), h.volumes)) == pytest.approx(est.beta_)

    def test_transform_matrices(self):
        A = grid(5, 5).adjacency
        est = LogArrangement().fit(A)
        S = est.transform(A)
        D = est.transform(A.toarray())
        assert sp.issparse(S) and np.array_equal(S.toarray(), D)
        assert np.array_equal(D, A.toarray()[np.ix_(est.order_, est.order_)])

    def test_fit_transform(self):
        A = star(6).adjacency.toarray()
        out = LogArrangement().fit_transform(A)
        assert out.shape == A.shape

    def test_score(self):
        g = star(3)
        est = LogArrangement().fit(g)
        assert est.score(g) == pytest.approx(-1 / 3)

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            LogArrangement().transform(star(3))

    def test_size_mismatch(self):
        est = LogArrangement().fit(star(3))
        with pytest.raises(ValidationError):
            est.transform(star(4))

    def test_bad_random_state(self):
        with pytest.raises(ValidationError):
            LogArrangement(random_state=np.random.default_rng(0)).fit(star(3))


class TestCheckGraph:
    def test_symmetric_dense(self):
        g = check_graph([[0, 2], [2, 0]])
        assert not g.directed and g.edges() == [(0, 1, 2.0)]

    def test_asymmetric_is_directed(self):
        g = check_graph(np.array([[0, 1], [0, 0]]))
        assert g.directed and g.m == 1

    def test_asymmetric_forced_undirected_sums(self):
        g = check_graph(np.array([[0, 1], [3, 0]]), directed=False)
        assert not g.directed and g.edges() == [(0, 1, 4.0)]

    def test_graph_passthrough(self):
        g = star(3)
        assert check_graph(g) is g

    @pytest.mark.parametrize("bad", [np.ones((2, 3)), np.ones(3), [[0, -1], [-1, 0]],
                                     [[0, np.nan], [np.nan, 0]], "graph"])
    def test_rejects(self, bad):
        with pytest.raises(ValidationError):
            check_graph(bad)


class TestCheckPermutation:
    def test_ok(self):
        assert check_permutation([2, 0, 1], 3).tolist() == [2, 0, 1]

    def test_duplicate(self):
        with pytest.raises(ValidationError, match="repeats id 1"):
            check_permutation([1, 1, 0], 3)

    def test_missing(self):
        with pytest.raises(ValidationError, match="missing id 2"):
            check_permutation([0, 1], 3)

    def test_out_of_range(self):
        with pytest.raises(ValidationError, match="out-of-range id 5"):
            check_permutation([0, 5, 1], 3)


class TestGenerators:
    def test_shapes(self):
        assert from_spec("path:n=5").m == 4
        assert from_spec("grid:rows=3,cols=4").m == 17
        assert from_spec("star:leaves=7").m == 7
        g = from_spec("regular:n=20,d=3,seed=1")
        assert np.all(g.degree() == 3)
        assert from_spec("pa:n=50,m=2,seed=1").n == 50

    def test_shuffle_preserves_structure(self):
        g = from_spec("grid:rows=4,cols=4,shuffle=3")
        assert sorted(g.degree().tolist()) == sorted(grid(4, 4).degree().tolist())

    def test_errors(self):
        with pytest.raises(ValidationError):
            from_spec("torus:n=3")
        with pytest.raises(ValidationError):
            from_spec("path:n=3,k=2")

    def test_registry(self):
        assert set(GENERATORS) == {"path", "grid", "star", "regular", "pa"}
