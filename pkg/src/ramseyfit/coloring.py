"""Red/blue edge colourings, the two extremal constructions, and avoidance checks."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from .cycles import UNKNOWN, SearchBudget, components_bipartiteness, find_cycle_of_length
from .errors import BudgetExhausted, InputError
from .graph import CycleWitness, Graph, bits, verify_cycle

__all__ = [
    "Color",
    "EdgeColoring",
    "AvoidanceSpec",
    "AvoidanceVerdict",
    "ALL_ODD",
    "extremal_partition",
    "color_extremal_lower_bound",
    "color_bipartite_blocking",
    "monochromatic_cycle",
    "verify_avoidance",
]


class Color(str, enum.Enum):
    RED = "R"
    BLUE = "B"

    @property
    def other(self) -> "Color":
        return Color.BLUE if self is Color.RED else Color.RED


class EdgeColoring:
    """Total 2-colouring of a host graph's edges.

    Stored as two spanning subgraphs ``red`` and ``blue`` whose rows
    partition the host rows.
    """

    __slots__ = ("host", "red", "blue")

    def __init__(self, host: Graph, red_edges: Iterable[tuple[int, int]]):
        red = host.subgraph(red_edges)
        blue = Graph._trusted(host.n, [h & ~r for h, r in zip(host.rows, red.rows)])
        self.host = host
        self.red = red
        self.blue = blue
        assert red.edge_count + blue.edge_count == host.edge_count

    @classmethod
    def from_map(cls, host: Graph, colors: dict[tuple[int, int], Color | str]) -> "EdgeColoring":
        norm = {}
        for (u, v), c in colors.items():
            e = (min(u, v), max(u, v))
            if e in norm:
                raise InputError(f"edge {e} coloured twice")
            norm[e] = Color(c)
        edges = set(host.edges())
        if set(norm) != edges:
            missing = sorted(edges - set(norm))[:5]
            extra = sorted(set(norm) - edges)[:5]
            raise InputError(f"colouring does not biject with host edges (missing {missing}, extra {extra})")
        return cls(host, [e for e, c in norm.items() if c is Color.RED])

    @classmethod
    def monochromatic(cls, host: Graph, color: Color) -> "EdgeColoring":
        return cls(host, host.edges() if color is Color.RED else [])

    def subgraph(self, color: Color) -> Graph:
        return self.red if Color(color) is Color.RED else self.blue

    def color_of(self, u: int, v: int) -> Color:
        if self.red.has_edge(u, v):
            return Color.RED
        if self.blue.has_edge(u, v):
            return Color.BLUE
        raise InputError(f"({u}, {v}) is not an edge of the host graph")

    def items(self) -> list[tuple[tuple[int, int], Color]]:
        return [(e, self.color_of(*e)) for e in self.host.edges()]

    def __eq__(self, other) -> bool:
        return isinstance(other, EdgeColoring) and self.host == other.host and self.red == other.red

    def __repr__(self) -> str:
        return f"EdgeColoring(n={self.host.n}, red={self.red.edge_count}, blue={self.blue.edge_count})"


class _AllOdd:
    def __repr__(self) -> str:
        return "ALL_ODD"


ALL_ODD = _AllOdd()


@dataclass(frozen=True)
class AvoidanceSpec:
    red_forbidden: int
    blue_forbidden: int | _AllOdd = ALL_ODD

    def __post_init__(self):
        if self.red_forbidden < 3:
            raise InputError("forbidden red cycle length must be at least 3")
        if self.blue_forbidden is not ALL_ODD:
            k = self.blue_forbidden
            if not isinstance(k, int) or k < 3 or k % 2 == 0:
                raise InputError("forbidden blue length must be an odd integer >= 3")


@dataclass(frozen=True)
class AvoidanceVerdict:
    clean: bool
    violation: tuple[Color, CycleWitness] | None = None


def extremal_partition(g: Graph, n: int) -> tuple[int, list[int], list[int]] | None:
    """The (v, V', V'') split behind the degree-<=n lower-bound colouring.

    v is the least vertex of degree <= n; V' holds the n-1 least-id
    neighbours of v, padded with least-id non-neighbours other than v.
    """
    if g.n != 2 * n - 1:
        raise InputError(f"expected {2 * n - 1} vertices for n={n}, got {g.n}")
    low = [v for v in range(g.n) if g.degree(v) <= n]
    if not low:
        return None
    v = low[0]
    nbrs = g.neighbors(v)
    others = [w for w in range(g.n) if w != v and not g.has_edge(v, w)]
    v_prime = sorted((nbrs + others)[: n - 1])
    chosen = set(v_prime)
    v_second = [w for w in range(g.n) if w not in chosen]
    return v, v_prime, v_second


def color_extremal_lower_bound(g: Graph, n: int) -> EdgeColoring | None:
    """Blue between V' and V'', red elsewhere; ``None`` if min degree > n."""
    split = extremal_partition(g, n)
    if split is None:
        return None
    v, v_prime, v_second = split
    assert sum(1 for w in v_second if g.has_edge(v, w)) <= 1
    side = 0
    for w in v_prime:
        side |= 1 << w
    red = [(a, b) for a, b in g.edges() if ((side >> a) & 1) == ((side >> b) & 1)]
    return EdgeColoring(g, red)


def color_bipartite_blocking(n: int, k: int) -> tuple[Graph, EdgeColoring]:
    """K_{2n-2} with halves {0..n-2}, {n-1..2n-3}: cross edges blue, inside red."""
    if n < 3:
        raise InputError("n must be at least 3")
    if k % 2 == 0 or not 3 <= k <= n:
        raise InputError("k must be odd with 3 <= k <= n")
    g = Graph.complete(2 * n - 2)
    half = n - 1
    red = [(a, b) for a, b in g.edges() if (a < half) == (b < half)]
    return g, EdgeColoring(g, red)


def monochromatic_cycle(g: Graph, coloring: EdgeColoring, color: Color, length: int,
                        budget: SearchBudget | int | None = None):
    """Cycle of the given length in one colour class: witness, None or UNKNOWN."""
    if coloring.host != g:
        raise InputError("colouring belongs to a different host graph")
    sub = coloring.subgraph(Color(color))
    res = find_cycle_of_length(sub, length, budget)
    if res is not None and res is not UNKNOWN:
        assert verify_cycle(sub, res.vertices)
    return res


def verify_avoidance(g: Graph, coloring: EdgeColoring, spec: AvoidanceSpec,
                     budget: SearchBudget | int | None = None) -> AvoidanceVerdict:
    """Clean iff no red C_n and no blue cycle of the forbidden length(s).

    "All odd lengths" is decided exactly by 2-colouring the blue graph.
    Raises BudgetExhausted rather than ever reporting an undecided check
    as clean.
    """
    red = monochromatic_cycle(g, coloring, Color.RED, spec.red_forbidden, budget)
    if red is UNKNOWN:
        raise BudgetExhausted(f"red C_{spec.red_forbidden} search ran out of budget")
    if red is not None:
        return AvoidanceVerdict(False, (Color.RED, red))
    if spec.blue_forbidden is ALL_ODD:
        for comp in components_bipartiteness(coloring.blue):
            if not comp.bipartite:
                return AvoidanceVerdict(False, (Color.BLUE, comp.odd_cycle))
        return AvoidanceVerdict(True)
    blue = monochromatic_cycle(g, coloring, Color.BLUE, spec.blue_forbidden, budget)
    if blue is UNKNOWN:
        raise BudgetExhausted(f"blue C_{spec.blue_forbidden} search ran out of budget")
    if blue is not None:
        return AvoidanceVerdict(False, (Color.BLUE, blue))
    return AvoidanceVerdict(True)
