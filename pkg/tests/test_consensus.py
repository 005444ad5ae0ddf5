import numpy as np
import pytest

from dfix import (Graph, InvalidParameterError, WeightValidationError, make_geometric_graph,
                  make_regular_graph, metropolis_weights, validate_weights)
from dfix.problems import grid_positions


def metropolis_oracle(g):
    n = g.n
    nbrs = [[j for j in range(n) if j != i and (j, i) in g.edges] for i in range(n)]
    w = np.zeros((n, n))
    for i in range(n):
        for j in nbrs[i]:
            w[i, j] = 1.0 / (1 + max(len(nbrs[i]), len(nbrs[j])))
        w[i, i] = 1.0 - sum(w[i, j] for j in nbrs[i])
    return w


@pytest.mark.parametrize("n,m", [(6, 2), (10, 4), (100, 8), (51, 50)])
def test_regular_uniform_weights(n, m):
    w = metropolis_weights(make_regular_graph(n, m))
    g = make_regular_graph(n, m)
    expect = np.where(g.adj.T, 1.0 / (m + 1), 0.0)
    np.testing.assert_allclose(w.entries, expect, rtol=0, atol=1e-15)


def test_single_vertex():
    w = metropolis_weights(Graph(1))
    assert w.entries.tolist() == [[1.0]]


def test_path_of_three():
    g = Graph(3, [(0, 1), (1, 0), (1, 2), (2, 1)])
    w = metropolis_weights(g).entries
    third = 1 / 3
    expect = np.array([[2 * third, third, 0], [third, third, third], [0, third, 2 * third]])
    np.testing.assert_allclose(w, expect, atol=1e-15)


def test_directed_rejected():
    with pytest.raises(InvalidParameterError):
        metropolis_weights(Graph(2, [(0, 1)]))


def test_ring_wmin():
    g = make_regular_graph(6, 2)
    assert validate_weights(metropolis_weights(g), g) == pytest.approx(1 / 3, abs=1e-15)


def test_matches_oracle_and_properties(rng):
    graphs = [make_geometric_graph(grid_positions(6, 3.0), r) for r in (1.3, 1.8, 2.6)]
    graphs += [make_geometric_graph(rng.uniform(-3, 3, (25, 2)), 1.5) for _ in range(10)]
    for g in graphs:
        w = metropolis_weights(g)
        np.testing.assert_allclose(w.entries, metropolis_oracle(g), atol=1e-15)
        assert np.array_equal(w.entries, w.entries.T)
        np.testing.assert_allclose(w.entries.sum(axis=0), 1.0, atol=1e-12)
        assert validate_weights(w, g) == w.w_min > 0


class TestValidate:
    def setup_method(self):
        self.g = make_regular_graph(6, 2)
        self.w = metropolis_weights(self.g).entries.copy()

    def test_row_sum(self):
        self.w[2, 2] -= 0.1
        with pytest.raises(WeightValidationError, match="row 2"):
            validate_weights(self.w, self.g)

    def test_sparsity(self):
        self.w[0, 3] = 0.1
        self.w[0, 0] -= 0.1
        with pytest.raises(WeightValidationError, match=r"w\[0,3\]"):
            validate_weights(self.w, self.g)

    def test_missing_edge_weight(self):
        self.w[0, 0] += self.w[0, 1]
        self.w[0, 1] = 0
        with pytest.raises(WeightValidationError, match="zero entry on an edge"):
            validate_weights(self.w, self.g)

    def test_negative(self):
        self.w[0, 1] = -0.1
        with pytest.raises(WeightValidationError, match="negative"):
            validate_weights(self.w, self.g)

    def test_shape(self):
        with pytest.raises(InvalidParameterError):
            validate_weights(np.eye(3), self.g)

    def test_directed_user_matrix(self):
        g = Graph(3, [(0, 1), (1, 2), (2, 0)])
        w = 0.5 * (np.eye(3) + g.adj.T.astype(float) - np.eye(3))
        assert validate_weights(w, g) == 0.5
