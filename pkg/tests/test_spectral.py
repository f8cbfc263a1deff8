from __future__ import annotations

import random

import numpy as np
import pytest

from oracles import max_discrepancy_brute
from ramseyfit.errors import InputError
from ramseyfit.fit import sample_uniform_graph
from ramseyfit.graph import Graph, edge_count_between
from ramseyfit.spectral import (
    discrepancy_from_norm,
    max_discrepancy,
    sampled_max_discrepancy,
    spectral_discrepancy_bound,
)


def random_graph(rng, n, p):
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])


def exact_norm(g: Graph) -> float:
    m = g.adjacency_matrix(np.float64) - 0.5
    np.fill_diagonal(m, 0.0)
    return float(np.abs(np.linalg.eigvalsh(m)).max())


class TestSpectralBound:
    @pytest.mark.parametrize("m", [2, 5, 12])
    def test_complete_and_empty(self, m):
        for g in (Graph.complete(m), Graph.empty(m)):
            rep = spectral_discrepancy_bound(g)
            assert rep.converged
            assert rep.spectral_norm_estimate == pytest.approx((m - 1) / 2, rel=1e-6)

    def test_too_small(self):
        with pytest.raises(InputError):
            spectral_discrepancy_bound(Graph.empty(1))

    def test_matches_eigendecomposition(self):
        rng = random.Random(4)
        for _ in range(30):
            g = random_graph(rng, rng.randint(3, 40), 0.5)
            rep = spectral_discrepancy_bound(g)
            true = exact_norm(g)
            assert rep.certified_bound >= rep.spectral_norm_estimate - rep.residual
            if rep.converged:
                assert rep.spectral_norm_estimate == pytest.approx(true, rel=1e-4)
                assert rep.certified_bound >= true * (1 - 1e-9)

    def test_random_graph_scale(self):
        # at n=300 the norm should be near sqrt(2n-1); check the same scaling at n=60
        g = sample_uniform_graph(60, 3)
        rep = spectral_discrepancy_bound(g)
        assert abs(rep.spectral_norm_estimate - np.sqrt(119)) <= 0.15 * np.sqrt(119)

    def test_bound_holds_exhaustively(self):
        rng = random.Random(8)
        for _ in range(25):
            n = rng.randint(2, 8)
            g = random_graph(rng, n, rng.random())
            bound = spectral_discrepancy_bound(g).discrepancy_bound(n)
            assert max_discrepancy_brute(n, g.edges()) <= bound + 1e-9


class TestExactDiscrepancy:
    def test_matches_brute(self):
        rng = random.Random(12)
        for _ in range(40):
            n = rng.randint(1, 7)
            g = random_graph(rng, n, rng.random())
            val, S, T = max_discrepancy(g)
            assert val == pytest.approx(max_discrepancy_brute(n, g.edges()))
            assert abs(edge_count_between(g, S, T) - len(S) * len(T) / 2) == pytest.approx(val)

    def test_k5_full_set(self):
        val, S, T = max_discrepancy(Graph.complete(5))
        assert val == 7.5 and S == T == frozenset(range(5))

    def test_bound_on_14_vertices(self):
        g = sample_uniform_graph(7, 5)  # 13 vertices
        val, _, _ = max_discrepancy(g)
        rep = spectral_discrepancy_bound(g)
        assert val <= discrepancy_from_norm(rep.certified_bound, g.n)


def test_sampled_is_lower_bound_with_valid_witness():
    g = sample_uniform_graph(6, 1)
    exact, _, _ = max_discrepancy(g)
    val, S, T = sampled_max_discrepancy(g, 500, seed=2)
    assert val <= exact + 1e-9
    assert abs(edge_count_between(g, S, T) - len(S) * len(T) / 2) == pytest.approx(val)
