"""Immutable simple graphs stored as per-vertex adjacency bit rows.

Row ``v`` is a Python ``int`` whose bit ``w`` is set iff ``{v, w}`` is an
edge.  Neighbourhood intersections are a single ``&`` and ``int.bit_count``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InputError

__all__ = [
    "Graph",
    "CycleWitness",
    "bits",
    "to_mask",
    "codegree",
    "edge_count_between",
    "verify_cycle",
]


def bits(mask: int) -> Iterator[int]:
    """Yield the indices of set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int] | int, n: int) -> int:
    """Convert a vertex collection (or an existing mask) to a bit mask.

    Raises InputError for ids outside ``0..n-1``.
    """
    if isinstance(vertices, (int, np.integer)) and not isinstance(vertices, bool):
        mask = int(vertices)
        if mask < 0 or mask >> n:
            raise InputError(f"vertex mask has bits outside 0..{n - 1}")
        return mask
    mask = 0
    for v in vertices:
        v = int(v)
        if not 0 <= v < n:
            raise InputError(f"vertex {v} out of range 0..{n - 1}")
        mask |= 1 << v
    return mask


class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    Instances are immutable; every "modification" returns a new graph.
    Equality and hashing are structural.
    """

    __slots__ = ("_n", "_rows", "_m")

    def __init__(self, n: int, rows: Sequence[int]):
        if n < 0:
            raise InputError("vertex count must be nonnegative")
        if len(rows) != n:
            raise InputError("need exactly one adjacency row per vertex")
        rows = tuple(int(r) for r in rows)
        full = (1 << n) - 1
        deg_sum = 0
        for v, r in enumerate(rows):
            if r & ~full:
                raise InputError(f"row {v} references vertices >= {n}")
            if (r >> v) & 1:
                raise InputError(f"self-loop at vertex {v}")
            for w in bits(r):
                if not (rows[w] >> v) & 1:
                    raise InputError(f"asymmetric adjacency between {v} and {w}")
            deg_sum += r.bit_count()
        self._n = n
        self._rows = rows
        self._m = deg_sum // 2

    # -- construction -------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls._trusted(n, rows)

    @classmethod
    def from_adjacency(cls, matrix) -> "Graph":
        a = np.asarray(matrix)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InputError("adjacency matrix must be square")
        if (a != a.T).any():
            raise InputError("adjacency matrix must be symmetric")
        if np.diag(a).any():
            raise InputError("adjacency matrix must have zero diagonal")
        n = a.shape[0]
        rows = []
        for v in range(n):
            r = 0
            for w in np.flatnonzero(a[v]):
                r |= 1 << int(w)
            rows.append(r)
        return cls._trusted(n, rows)

    @classmethod
    def _trusted(cls, n: int, rows: Sequence[int]) -> "Graph":
        # Skips validation; callers guarantee symmetry and no loops.
        g = cls.__new__(cls)
        g._n = n
        g._rows = tuple(rows)
        g._m = sum(r.bit_count() for r in g._rows) // 2
        return g

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls._trusted(n, [0] * n)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        full = (1 << n) - 1
        return cls._trusted(n, [full ^ (1 << v) for v in range(n)])

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        if n < 3:
            raise InputError("a cycle needs at least 3 vertices")
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def complete_bipartite(cls, a: int, b: int) -> "Graph":
        return cls.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])

    @classmethod
    def petersen(cls) -> "Graph":
        outer = [(i, (i + 1) % 5) for i in range(5)]
        spokes = [(i, i + 5) for i in range(5)]
        inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        return cls.from_edges(10, outer + spokes + inner)

    # -- queries ------------------------------------------------------

    @property
    def n(self) -> int:
        return self._n

    vertex_count = n

    @property
    def rows(self) -> tuple[int, ...]:
        return self._rows

    @property
    def edge_count(self) -> int:
        return self._m

    @property
    def full_mask(self) -> int:
        return (1 << self._n) - 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self._rows[u] >> v) & 1)

    def neighbors(self, v: int) -> list[int]:
        return list(bits(self._rows[v]))

    def degree(self, v: int) -> int:
        return self._rows[v].bit_count()

    def degrees(self) -> list[int]:
        return [r.bit_count() for r in self._rows]

    def edges(self) -> list[tuple[int, int]]:
        """Edges as ``(u, v)`` with ``u < v``, sorted ascending."""
        out = []
        for u, r in enumerate(self._rows):
            for v in bits(r >> (u + 1)):
                out.append((u, u + 1 + v))
        return out

    def adjacency_matrix(self, dtype=np.int64) -> np.ndarray:
        a = np.zeros((self._n, self._n), dtype=dtype)
        for u, v in self.edges():
            a[u, v] = a[v, u] = 1
        return a

    def induced_mask(self, mask: int) -> "Graph":
        """Same vertex ids, keeping only edges with both ends in ``mask``."""
        return Graph._trusted(
            self._n, [(r & mask) if (mask >> v) & 1 else 0 for v, r in enumerate(self._rows)]
        )

    def subgraph(self, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Spanning subgraph on the given edges; every edge must exist here."""
        edges = list(edges)
        for u, v in edges:
            if not self.has_edge(u, v):
                raise InputError(f"({u}, {v}) is not an edge of the host graph")
        return Graph.from_edges(self._n, edges)

    def with_edges(self, add=(), remove=()) -> "Graph":
        rows = list(self._rows)
        for u, v in remove:
            rows[u] &= ~(1 << v)
            rows[v] &= ~(1 << u)
        for u, v in add:
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return Graph._trusted(self._n, rows)

    def is_subgraph_of(self, other: "Graph") -> bool:
        return self._n == other._n and all(a & ~b == 0 for a, b in zip(self._rows, other._rows))

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self._n == other._n and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self._n, self._rows))

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, m={self._m})"


@dataclass(frozen=True)
class CycleWitness:
    """A cycle given by its vertex sequence (the closing edge is implicit)."""

    vertices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(int(v) for v in self.vertices))
        if len(self.vertices) < 3:
            raise InputError("a cycle has at least 3 vertices")
        if len(set(self.vertices)) != len(self.vertices):
            raise InputError("cycle vertices must be distinct")

    @property
    def length(self) -> int:
        return len(self.vertices)

    def edges(self) -> list[tuple[int, int]]:
        vs = self.vertices
        return [tuple(sorted((vs[i], vs[(i + 1) % len(vs)]))) for i in range(len(vs))]

    def verify(self, g: Graph) -> bool:
        return verify_cycle(g, self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)


def verify_cycle(g: Graph, vertices: Sequence[int]) -> bool:
    """Independent re-check: distinct in-range vertices, consecutive ones adjacent."""
    k = len(vertices)
    if k < 3 or len(set(vertices)) != k:
        return False
    if any(not 0 <= v < g.n for v in vertices):
        return False
    return all(g.has_edge(vertices[i], vertices[(i + 1) % k]) for i in range(k))


def codegree(g: Graph, v: int, w: int) -> int:
    """Number of common neighbours of ``v`` and ``w``."""
    if not (0 <= v < g.n and 0 <= w < g.n):
        raise InputError(f"vertices ({v}, {w}) out of range 0..{g.n - 1}")
    if v == w:
        raise InputError("codegree needs two distinct vertices")
    return (g.rows[v] & g.rows[w]).bit_count()


def edge_count_between(g: Graph, S, T) -> int:
    """Ordered-pair edge count e(S, T); edges inside S ∩ T count twice."""
    s_mask = to_mask(S, g.n)
    t_mask = to_mask(T, g.n)
    rows = g.rows
    return sum((rows[v] & t_mask).bit_count() for v in bits(s_mask))
