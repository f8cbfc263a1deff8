from __future__ import annotations

import random

import numpy as np
import pytest

from ramseyfit.errors import InputError
from ramseyfit.graph import CycleWitness, Graph, codegree, edge_count_between, verify_cycle


def random_graph(rng: random.Random, n: int, p: float) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])


class TestConstruction:
    def test_rejects_self_loops_and_asymmetry(self):
        with pytest.raises(InputError):
            Graph.from_edges(3, [(1, 1)])
        with pytest.raises(InputError):
            Graph(2, [0b10, 0])

    def test_rejects_out_of_range(self):
        with pytest.raises(InputError):
            Graph.from_edges(3, [(0, 3)])

    def test_counts(self):
        g = Graph.petersen()
        assert g.n == 10 and g.edge_count == 15
        assert set(g.degrees()) == {3}
        assert Graph.complete(6).edge_count == 15
        assert Graph.complete_bipartite(3, 4).edge_count == 12

    def test_structural_equality_and_hash(self):
        a = Graph.from_edges(4, [(0, 1), (2, 3)])
        b = Graph.from_edges(4, [(3, 2), (1, 0)])
        assert a == b and hash(a) == hash(b)
        assert a != Graph.from_edges(4, [(0, 1)])

    def test_adjacency_matrix_symmetric(self):
        a = Graph.petersen().adjacency_matrix()
        assert np.array_equal(a, a.T) and not a.diagonal().any()

    def test_with_edges(self):
        g = Graph.cycle(5).with_edges(add=[(0, 2)], remove=[(0, 1)])
        assert g.has_edge(0, 2) and not g.has_edge(0, 1)
        assert g.edge_count == 5


class TestCodegree:
    def test_complete(self):
        g = Graph.complete(4)
        assert all(codegree(g, v, w) == 2 for v in range(4) for w in range(4) if v != w)

    def test_c5_adjacent(self):
        assert codegree(Graph.cycle(5), 0, 1) == 0

    def test_petersen_nonadjacent(self):
        g = Graph.petersen()
        for v in range(10):
            for w in range(10):
                if v != w and not g.has_edge(v, w):
                    assert codegree(g, v, w) == 1

    def test_errors(self):
        with pytest.raises(InputError):
            codegree(Graph.complete(3), 1, 1)
        with pytest.raises(InputError):
            codegree(Graph.complete(3), 0, 7)

    def test_matches_edge_count_between(self):
        rng = random.Random(5)
        for _ in range(20):
            g = random_graph(rng, 12, 0.4)
            for v in range(12):
                for w in range(12):
                    if v != w:
                        assert codegree(g, v, w) == edge_count_between(g, g.neighbors(v), [w])


class TestEdgeCountBetween:
    def test_examples(self):
        assert edge_count_between(Graph.complete(3), range(3), range(3)) == 6
        assert edge_count_between(Graph.cycle(4), [0, 1], [2, 3]) == 2
        assert edge_count_between(Graph.path(3), [0, 1], [1, 2]) == 2

    def test_out_of_range(self):
        with pytest.raises(InputError):
            edge_count_between(Graph.complete(3), [0, 5], [1])

    def test_inside_counts_twice(self):
        rng = random.Random(11)
        for _ in range(50):
            g = random_graph(rng, 10, 0.5)
            S = [v for v in range(10) if rng.random() < 0.5]
            inside = sum(1 for u, v in g.edges() if u in S and v in S)
            assert edge_count_between(g, S, S) == 2 * inside


class TestCycleWitness:
    def test_validation(self):
        with pytest.raises(InputError):
            CycleWitness([0, 1])
        with pytest.raises(InputError):
            CycleWitness([0, 1, 0])

    def test_verify(self):
        g = Graph.cycle(5)
        assert CycleWitness([0, 1, 2, 3, 4]).verify(g)
        assert not verify_cycle(g, [0, 2, 4, 1, 3])
