from __future__ import annotations

import math
import random

import pytest

from oracles import has_cycle, is_bipartite_brute
from ramseyfit.coloring import (
    ALL_ODD,
    AvoidanceSpec,
    Color,
    EdgeColoring,
    color_bipartite_blocking,
    color_extremal_lower_bound,
    extremal_partition,
    monochromatic_cycle,
    verify_avoidance,
)
from ramseyfit.cycles import components_bipartiteness
from ramseyfit.errors import InputError
from ramseyfit.graph import Graph


def random_graph(rng, n, p):
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])


def random_coloring(rng, g):
    return EdgeColoring(g, [e for e in g.edges() if rng.random() < 0.5])


def sparse_graph(rng, n):
    """Random graph on 2n-1 vertices with fewer edges than an n-fit graph."""
    v = 2 * n - 1
    pairs = [(i, j) for i in range(v) for j in range(i + 1, v)]
    limit = math.ceil((n + 1) * (2 * n - 1) / 2)
    return Graph.from_edges(v, rng.sample(pairs, rng.randrange(limit)))


class TestEdgeColoring:
    def test_partition(self):
        g = Graph.petersen()
        c = random_coloring(random.Random(1), g)
        assert c.red.edge_count + c.blue.edge_count == g.edge_count
        assert all(c.color_of(u, v) in (Color.RED, Color.BLUE) for u, v in g.edges())

    def test_rejects_foreign_edge(self):
        with pytest.raises(InputError):
            EdgeColoring(Graph.cycle(5), [(0, 2)])

    def test_from_map_must_be_total(self):
        g = Graph.path(3)
        with pytest.raises(InputError):
            EdgeColoring.from_map(g, {(0, 1): "R"})
        c = EdgeColoring.from_map(g, {(0, 1): "R", (2, 1): "B"})
        assert c.color_of(1, 2) is Color.BLUE


class TestAvoidanceSpec:
    def test_validation(self):
        with pytest.raises(InputError):
            AvoidanceSpec(2)
        with pytest.raises(InputError):
            AvoidanceSpec(5, 4)
        assert AvoidanceSpec(5).blue_forbidden is ALL_ODD


class TestExtremal:
    def test_c9(self):
        g = Graph.cycle(9)
        c = color_extremal_lower_bound(g, 5)
        v, vp, vs = extremal_partition(g, 5)
        assert v == 0 and vp == [1, 2, 3, 8] and len(vs) == 5
        assert all(x.bipartite for x in components_bipartiteness(c.blue))
        assert all((a in vp) != (b in vp) for a, b in c.blue.edges())

    def test_inapplicable(self):
        assert color_extremal_lower_bound(Graph.complete(9), 5) is None

    def test_wrong_size(self):
        with pytest.raises(InputError):
            color_extremal_lower_bound(Graph.complete(8), 5)

    def test_v_has_at_most_one_neighbour_outside(self):
        rng = random.Random(3)
        for _ in range(100):
            n = rng.randint(3, 8)
            g = sparse_graph(rng, n)
            v, vp, vs = extremal_partition(g, n)
            assert len(vp) == n - 1 and v in vs
            assert sum(g.has_edge(v, w) for w in vs) <= 1

    def test_clean_by_brute_force(self):
        rng = random.Random(5)
        for _ in range(60):
            n = rng.randint(3, 5)
            g = sparse_graph(rng, n)
            c = color_extremal_lower_bound(g, n)
            assert not has_cycle(g.n, c.red.edges(), n)
            assert is_bipartite_brute(set(range(g.n)), c.blue.edges())


class TestBlocking:
    def test_n5_k3(self):
        g, c = color_bipartite_blocking(5, 3)
        assert g == Graph.complete(8)
        assert c.blue == Graph.complete_bipartite(4, 4)
        assert verify_avoidance(g, c, AvoidanceSpec(5, 3)).clean

    def test_n3(self):
        g, c = color_bipartite_blocking(3, 3)
        assert g.n == 4 and c.blue == Graph.complete_bipartite(2, 2)

    def test_bad_k(self):
        for n, k in [(5, 4), (5, 7), (5, 1), (2, 3)]:
            with pytest.raises(InputError):
                color_bipartite_blocking(n, k)

    def test_clean_exhaustively(self):
        for n in range(3, 7):
            for k in range(3, n + 1, 2):
                g, c = color_bipartite_blocking(n, k)
                assert not has_cycle(g.n, c.red.edges(), n)
                assert not has_cycle(g.n, c.blue.edges(), k)


class TestMonochromaticCycle:
    def test_all_red_k6(self):
        g = Graph.complete(6)
        w = monochromatic_cycle(g, EdgeColoring.monochromatic(g, Color.RED), Color.RED, 3)
        assert w is not None and len(w) == 3

    def test_blocking_blue_odd(self):
        g, c = color_bipartite_blocking(6, 5)
        assert all(monochromatic_cycle(g, c, Color.BLUE, l) is None for l in (3, 5, 7, 9))

    def test_matches_oracle(self):
        rng = random.Random(77)
        for trial in range(500):
            g = random_graph(rng, 8, rng.choice([0.4, 0.6, 0.8]))
            c = random_coloring(rng, g)
            color = rng.choice([Color.RED, Color.BLUE])
            l = rng.randint(3, 8)
            w = monochromatic_cycle(g, c, color, l)
            sub = c.subgraph(color)
            assert (w is not None) == has_cycle(8, sub.edges(), l), trial
            if w is not None:
                assert all(c.color_of(a, b) is color for a, b in zip(w.vertices, w.vertices[1:] + w.vertices[:1]))


class TestVerifyAvoidance:
    def test_all_red_violation(self):
        g = Graph.complete(9)
        v = verify_avoidance(g, EdgeColoring.monochromatic(g, Color.RED), AvoidanceSpec(5))
        assert not v.clean and v.violation[0] is Color.RED and len(v.violation[1]) == 5
        assert v.violation[1].verify(g)

    def test_blue_odd_witness(self):
        g = Graph.complete(5)
        v = verify_avoidance(g, EdgeColoring.monochromatic(g, Color.BLUE), AvoidanceSpec(5, 3))
        assert v.violation[0] is Color.BLUE and len(v.violation[1]) == 3

    def test_monotone_in_blue_lengths(self):
        rng = random.Random(21)
        for _ in range(100):
            g = random_graph(rng, 8, 0.6)
            c = random_coloring(rng, g)
            single = [verify_avoidance(g, c, AvoidanceSpec(5, k)).clean for k in (3, 5, 7)]
            if not all(single):
                assert not verify_avoidance(g, c, AvoidanceSpec(5, ALL_ODD)).clean
