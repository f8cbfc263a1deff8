from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from oracles import max_matching_size, property_mt_brute, regular_by_double_loop
from ramseyfit.coloring import Color, EdgeColoring
from ramseyfit.errors import InputError
from ramseyfit.graph import Graph
from ramseyfit.regularity import (
    Partition,
    check_regular_pair,
    dense_even_core,
    find_induced_bipartite,
    maximum_matching,
    pair_density,
    property_Mt,
    reduced_graph,
    strongly_regular_trim,
)


def bipartite_from_matrix(cross: np.ndarray) -> Graph:
    p, q = cross.shape
    return Graph.from_edges(p + q, [(i, p + j) for i in range(p) for j in range(q) if cross[i, j]])


def random_cross(rng, p, q, density=0.5):
    return (rng.random((p, q)) < density).astype(np.int64)


def random_graph(rng, n, p):
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])


class TestDensity:
    def test_examples(self):
        assert pair_density(Graph.complete_bipartite(3, 4), range(3), range(3, 7)) == 1
        assert pair_density(Graph.empty(6), [0, 1], [2, 3]) == 0
        cross = np.zeros((4, 4), dtype=np.int64)
        cross[:2] = 1
        assert pair_density(bipartite_from_matrix(cross), range(4), range(4, 8)) == Fraction(1, 2)

    def test_symmetric(self):
        rng = np.random.default_rng(0)
        g = bipartite_from_matrix(random_cross(rng, 5, 7))
        assert pair_density(g, range(5), range(5, 12)) == pair_density(g, range(5, 12), range(5))

    def test_errors(self):
        g = Graph.complete(4)
        with pytest.raises(InputError):
            pair_density(g, [], [1])
        with pytest.raises(InputError):
            pair_density(g, [0, 1], [1, 2])


class TestRegularPair:
    def test_complete_is_regular(self):
        g = Graph.complete_bipartite(5, 5)
        for eps in (Fraction(1, 10), Fraction(1, 2)):
            v = check_regular_pair(g, range(5), range(5, 10), eps)
            assert v.status == "regular" and v.deviation == 0

    def test_empty_box_witness(self):
        rng = np.random.default_rng(4)
        cross = random_cross(rng, 8, 8)
        # force density 1/2 and an empty 2x2 box on rows/cols {0, 1}
        cross[:2, :2] = 0
        flat = [(i, j) for i in range(8) for j in range(8) if not (i < 2 and j < 2)]
        while cross.sum() < 32:
            i, j = flat[rng.integers(len(flat))]
            cross[i, j] = 1
        while cross.sum() > 32:
            i, j = flat[rng.integers(len(flat))]
            cross[i, j] = 0
        g = bipartite_from_matrix(cross)
        v = check_regular_pair(g, range(8), range(8, 16), Fraction(1, 4))
        assert v.status == "irregular" and v.deviation == Fraction(1, 2)
        W1, W2 = v.witness
        assert len(W1) == len(W2) == 2
        sub = pair_density(g, W1, W2)
        assert abs(sub - Fraction(1, 2)) == Fraction(1, 2)

    def test_matches_double_loop_oracle(self):
        rng = np.random.default_rng(11)
        for trial in range(12):
            p, q = (8, 8) if trial < 6 else (int(rng.integers(3, 7)), int(rng.integers(3, 7)))
            cross = random_cross(rng, p, q)
            g = bipartite_from_matrix(cross)
            ok, worst = regular_by_double_loop(cross, Fraction(1, 4))
            v = check_regular_pair(g, range(p), range(p, p + q), Fraction(1, 4))
            assert v.is_regular == ok and v.deviation == worst
            if not ok:
                W1, W2 = v.witness
                assert abs(pair_density(g, W1, W2) - v.density) == worst

    def test_self_dual(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            cross = random_cross(rng, 6, 7)
            g = bipartite_from_matrix(cross)
            a = check_regular_pair(g, range(6), range(6, 13), Fraction(1, 5))
            b = check_regular_pair(g, range(6, 13), range(6), Fraction(1, 5))
            assert a.status == b.status and a.deviation == b.deviation
            if a.witness:
                assert sorted(map(len, a.witness)) == sorted(map(len, b.witness))

    def test_sampled_never_certifies(self):
        g = Graph.complete_bipartite(20, 20)
        v = check_regular_pair(g, range(20), range(20, 40), Fraction(1, 10), mode="sampled", samples=100)
        assert v.status == "heuristic-regular"

    def test_sampled_finds_planted_irregularity(self):
        cross = np.ones((20, 20), dtype=np.int64)
        cross[:10, :10] = 0
        g = bipartite_from_matrix(cross)
        v = check_regular_pair(g, range(20), range(20, 40), Fraction(1, 10), mode="sampled", samples=200)
        assert v.status == "irregular"
        assert abs(pair_density(g, *v.witness) - v.density) == v.deviation > Fraction(1, 10)

    def test_guards(self):
        g = Graph.complete_bipartite(16, 2)
        with pytest.raises(InputError):
            check_regular_pair(g, range(16), [16, 17], Fraction(1, 4))
        with pytest.raises(InputError):
            check_regular_pair(g, [0], [16], 0)
        with pytest.raises(InputError):
            check_regular_pair(g, [0], [16], Fraction(1, 2), mode="magic")


class TestStrongTrim:
    def test_complete_unchanged(self):
        r = strongly_regular_trim(Graph.complete_bipartite(4, 5), range(4), range(4, 9), Fraction(1, 10))
        assert r.W1 == frozenset(range(4)) and r.W2 == frozenset(range(4, 9)) and r.guarantee_held

    def test_isolated_vertex_removed(self):
        g = Graph.from_edges(9, [(i, j) for i in range(4) for j in range(5, 9)])
        r = strongly_regular_trim(g, range(5), range(5, 9), Fraction(1, 10))
        assert r.W1 == frozenset(range(4)) and r.W2 == frozenset(range(5, 9))

    def test_random_40_40(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            g = bipartite_from_matrix(random_cross(rng, 40, 40))
            r = strongly_regular_trim(g, range(40), range(40, 80), Fraction(1, 10))
            assert len(r.W1) >= 32 and len(r.W2) >= 32 and r.guarantee_held

    def test_idempotent(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            g = bipartite_from_matrix(random_cross(rng, 12, 12, density=0.15))
            r = strongly_regular_trim(g, range(12), range(12, 24), Fraction(1, 10))
            again = strongly_regular_trim(g, r.W1, r.W2, Fraction(1, 10))
            assert (again.W1, again.W2) == (r.W1, r.W2)


class TestReducedGraph:
    @staticmethod
    def two_part(red_count):
        # parts {0..4}, {5..9}; 10 cross edges i -> 5 + (i + s) % 5 for s in {0, 1}
        cross = [(i, 5 + (i + s) % 5) for s in (0, 1) for i in range(5)]
        g = Graph.from_edges(10, cross)
        return g, EdgeColoring(g, cross[:red_count])

    def test_majority_and_draw(self):
        part = Partition([range(5), range(5, 10)])
        for red, expect in [(6, Color.RED), (5, Color.RED), (4, Color.BLUE)]:
            g, c = self.two_part(red)
            rg = reduced_graph(g, c, part, 1)
            assert rg.edges[(0, 1)] is expect
            dr, db = rg.densities[(0, 1)]
            assert (dr, db) == (Fraction(red, 25), Fraction(10 - red, 25))
            assert rg.to_json()["pairs"][0]["red_density"] == f"{dr.numerator}/{dr.denominator}"

    def test_irregular_absent(self):
        cross = np.ones((6, 6), dtype=np.int64)
        cross[:3, :3] = 0
        g = bipartite_from_matrix(cross)
        c = EdgeColoring.monochromatic(g, Color.RED)
        rg = reduced_graph(g, c, Partition([range(6), range(6, 12)]), Fraction(1, 4))
        assert rg.edges[(0, 1)] is None

    def test_red_iff_red_count_at_least_blue(self):
        rng = random.Random(6)
        part = Partition([range(4), range(4, 8), range(8, 12)])
        for _ in range(20):
            g = random_graph(rng, 12, 0.5)
            c = EdgeColoring(g, [e for e in g.edges() if rng.random() < 0.5])
            rg = reduced_graph(g, c, part, 1)
            for (i, j), col in rg.edges.items():
                dr, db = rg.densities[(i, j)]
                assert (col is Color.RED) == (dr >= db)

    def test_partition_validation(self):
        g = Graph.complete(6)
        c = EdgeColoring.monochromatic(g, Color.RED)
        for parts in ([range(3), range(2, 6)], [range(3), range(3, 5)], [range(1), range(1, 6)]):
            with pytest.raises(InputError):
                reduced_graph(g, c, Partition(parts), 1)


class TestMatchings:
    def test_c5(self):
        cert = property_Mt(Graph.cycle(5), 4)
        assert len(cert.matching) == 2 and cert.saturated == 4 and len(cert.odd_cycle) == 5

    def test_c6_bipartite(self):
        assert property_Mt(Graph.cycle(6), 2) is None

    def test_bad_t(self):
        with pytest.raises(InputError):
            property_Mt(Graph.cycle(5), 0)

    def test_petersen_perfect(self):
        assert len(maximum_matching(Graph.petersen())) == 5

    def test_matches_oracle(self):
        rng = random.Random(31)
        for trial in range(500):
            n = rng.randint(1, 12)
            g = random_graph(rng, n, rng.choice([0.15, 0.25, 0.4]))
            assert len(maximum_matching(g)) == max_matching_size(n, g.edges()), trial
            t = rng.uniform(0.5, n + 1)
            ok, best = property_mt_brute(n, g.edges(), t)
            cert = property_Mt(g, t)
            assert (cert is not None) == ok, (trial, g.edges(), t)
            if cert is not None:
                assert cert.saturated == best
                used = [v for e in cert.matching for v in e]
                assert len(used) == len(set(used)) and set(used) <= cert.component
                assert all(g.has_edge(u, v) for u, v in cert.matching)
                assert cert.odd_cycle.verify(g) and set(cert.odd_cycle.vertices) <= cert.component

    def test_monotone_in_t(self):
        rng = random.Random(8)
        for _ in range(50):
            g = random_graph(rng, 10, 0.3)
            ts = [x / 2 for x in range(1, 22)]
            res = [property_Mt(g, t) is not None for t in ts]
            assert res == sorted(res, reverse=True)


class TestReducedStructure:
    def test_dense_even_core(self):
        h = Graph.complete(5)
        assert dense_even_core(h, range(5), 0.01) == frozenset(range(4))
        assert dense_even_core(Graph.empty(5), range(5), 0.01) == frozenset()

    def test_find_induced_bipartite(self):
        w1, w2, exact = find_induced_bipartite(Graph.cycle(6), 3)
        assert exact and {w1, w2} == {frozenset({0, 2, 4}), frozenset({1, 3, 5})}
        assert find_induced_bipartite(Graph.complete(3), 2) is None
        w1, w2, _ = find_induced_bipartite(Graph.complete(4), 1)
        assert len(w1) == len(w2) == 1 and not w1 & w2

    def test_greedy_above_limit(self):
        res = find_induced_bipartite(Graph.cycle(30), 10, exact_limit=20)
        w1, w2, exact = res
        assert not exact and len(w1) >= 10 and len(w2) >= 10
        h = Graph.cycle(30)
        for w in (w1, w2):
            assert not any(h.has_edge(a, b) for a in w for b in w)
