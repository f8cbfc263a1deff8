"""Exact fixed-length cycle search, cycle spectra and bipartiteness.

The search is a depth-first extension over bit rows.  Candidates at depth
``i`` are restricted to vertices whose BFS distance back to the anchor is at
most the number of edges still to place, so dead branches die early.  The
anchor is the minimum vertex of the cycle and anchors are tried in increasing
order.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field

from .errors import BudgetExhausted, InputError
from .graph import CycleWitness, Graph, bits, verify_cycle

__all__ = [
    "Presence",
    "UNKNOWN",
    "SearchBudget",
    "ComponentInfo",
    "CycleSpectrum",
    "find_cycle_of_length",
    "find_path_of_length",
    "cycle_spectrum",
    "components_bipartiteness",
    "two_core",
]


class Presence(str, enum.Enum):
    PRESENT = "present"
    ABSENT = "absent"
    UNKNOWN = "unknown"


UNKNOWN = Presence.UNKNOWN

DEFAULT_NODE_BUDGET = 10_000_000


class _Counter:
    """Mutable node counter; ``limit=None`` means unbounded."""

    __slots__ = ("used", "limit")

    def __init__(self, limit: int | None):
        self.used = 0
        self.limit = limit

    def spend(self, k: int = 1) -> None:
        self.used += k
        if self.limit is not None and self.used > self.limit:
            raise BudgetExhausted(f"node budget of {self.limit} exhausted")


@dataclass(frozen=True)
class SearchBudget:
    """Search limits.  Cycle searches only read ``nodes``; the arrowing
    search also honours the time cap, worker count and determinism flag."""

    nodes: int | None = DEFAULT_NODE_BUDGET
    seconds: float | None = None
    threads: int = 1
    deterministic: bool = True

    def __post_init__(self):
        if self.nodes is not None and self.nodes <= 0:
            raise InputError("node budget must be positive")
        if self.seconds is not None and self.seconds <= 0:
            raise InputError("time budget must be positive")
        if self.threads < 1:
            raise InputError("thread count must be at least 1")


def two_core(g: Graph, mask: int | None = None) -> int:
    """Mask of the 2-core of ``g`` restricted to ``mask``; no cycle leaves it."""
    rows = g.rows
    alive = g.full_mask if mask is None else mask
    queue = [v for v in bits(alive) if (rows[v] & alive).bit_count() < 2]
    while queue:
        v = queue.pop()
        if not (alive >> v) & 1:
            continue
        alive &= ~(1 << v)
        for w in bits(rows[v] & alive):
            if (rows[w] & alive).bit_count() < 2:
                queue.append(w)
    return alive


def _component_masks(rows, alive: int) -> list[int]:
    comps = []
    rest = alive
    while rest:
        seed = rest & -rest
        comp = seed
        frontier = seed
        while frontier:
            nxt = 0
            for v in bits(frontier):
                nxt |= rows[v]
            nxt &= alive & ~comp
            comp |= nxt
            frontier = nxt
        comps.append(comp)
        rest &= ~comp
    return comps


def _distance_layers(rows, source: int, allowed: int, depth: int) -> list[int]:
    """``within[d]`` = mask of allowed vertices at distance <= d from source."""
    within = [1 << source]
    reached = 1 << source
    frontier = reached
    for _ in range(depth):
        nxt = 0
        for v in bits(frontier):
            nxt |= rows[v]
        nxt &= allowed & ~reached
        reached |= nxt
        frontier = nxt
        within.append(reached)
    return within


def _dfs_path(rows, start: int, length: int, end_mask: int, within: list[int],
              allowed: int, counter: _Counter, min_last: int = -1) -> list[int] | None:
    """Simple path start -> (vertex in end_mask) with exactly ``length`` edges.

    Interior vertices come from ``allowed``; the final vertex from
    ``end_mask``.  ``within[r]`` restricts the vertex placed with ``r`` edges
    still to go (distance pruning toward the end).
    """
    path = [start]
    used = 1 << start
    depth_cap = len(within)

    def candidates(x: int, remaining: int) -> int:
        if remaining == 0:
            return rows[x] & end_mask & ~used
        c = rows[x] & allowed & ~used
        if remaining < depth_cap:
            c &= within[remaining]
        return c

    stack = [candidates(start, length - 1)]
    while stack:
        cands = stack[-1]
        if not cands:
            stack.pop()
            used &= ~(1 << path.pop())
            continue
        low = cands & -cands
        stack[-1] = cands ^ low
        v = low.bit_length() - 1
        counter.spend()
        depth = len(path)  # edges used once v is appended
        if depth == length:
            if v > min_last:
                return path + [v]
            continue
        path.append(v)
        used |= low
        stack.append(candidates(v, length - depth - 1))
    return None


def find_cycle_of_length(g: Graph, length: int, budget: SearchBudget | int | None = None):
    """Return a ``CycleWitness`` of the given length, ``None`` or ``UNKNOWN``.

    ``None`` is only returned after an exhaustive search; ``UNKNOWN`` means
    the node budget ran out first.
    """
    if length < 3:
        raise InputError("cycle length must be at least 3")
    counter = _Counter(_budget_nodes(budget))
    try:
        found = _find_cycle(g, length, counter)
    except BudgetExhausted:
        return UNKNOWN
    if found is None:
        return None
    witness = CycleWitness(tuple(found))
    assert verify_cycle(g, witness.vertices), "cycle search emitted an invalid witness"
    return witness


def _budget_nodes(budget) -> int | None:
    if budget is None:
        return DEFAULT_NODE_BUDGET
    if isinstance(budget, SearchBudget):
        return budget.nodes
    if budget <= 0:
        raise InputError("node budget must be positive")
    return int(budget)


def _find_cycle(g: Graph, length: int, counter: _Counter, mask: int | None = None):
    rows = g.rows
    core = two_core(g, mask)
    for comp in _component_masks(rows, core):
        if comp.bit_count() < length:
            continue
        for a in bits(comp):
            allowed = comp & ~((1 << a) - 1)  # vertices >= a
            if allowed.bit_count() < length:
                break
            within = _distance_layers(rows, a, allowed, length)
            end_mask = rows[a] & allowed
            if end_mask.bit_count() < 2:
                continue
            # path a -> ... -> x_{l-1} with x_{l-1} adjacent to a; the walk back
            # to a is the distance source, so shift layers by one.
            shifted = [w & ~(1 << a) for w in within[1:]]
            interior = allowed & ~(1 << a)
            for first in bits(end_mask):
                counter.spend()
                sub = _dfs_path(rows, first, length - 2, end_mask, shifted,
                                interior, counter, min_last=first)
                if sub is not None:
                    return [a] + sub
    return None


def find_path_of_length(g: Graph, u: int, v: int, length: int,
                        allowed: int | None = None, budget: int | None = None) -> list[int] | None:
    """Simple ``u``-``v`` path with exactly ``length`` edges inside ``allowed``.

    Raises BudgetExhausted if the budget runs out.
    """
    if u == v or length < 1:
        raise InputError("need distinct endpoints and positive length")
    rows = g.rows
    allowed = g.full_mask if allowed is None else allowed
    interior = allowed & ~((1 << u) | (1 << v))
    counter = _Counter(budget)
    within = _distance_layers(rows, v, interior | (1 << v), length)
    return _dfs_path(rows, u, length, 1 << v, within, interior, counter)


@dataclass
class CycleSpectrum:
    status: dict[int, Presence] = field(default_factory=dict)
    witnesses: dict[int, CycleWitness] = field(default_factory=dict)

    def present(self) -> list[int]:
        return [k for k, s in self.status.items() if s is Presence.PRESENT]


def cycle_spectrum(g: Graph, max_length: int, budget: SearchBudget | int | None = None) -> CycleSpectrum:
    """Presence status of every cycle length ``3..max_length``.

    The budget applies to each length separately.
    """
    if max_length < 3:
        raise InputError("max_length must be at least 3")
    out = CycleSpectrum()
    for length in range(3, max_length + 1):
        res = find_cycle_of_length(g, length, budget)
        if res is UNKNOWN:
            out.status[length] = Presence.UNKNOWN
        elif res is None:
            out.status[length] = Presence.ABSENT
        else:
            out.status[length] = Presence.PRESENT
            out.witnesses[length] = res
    return out


@dataclass(frozen=True)
class ComponentInfo:
    vertices: frozenset[int]
    bipartite: bool
    sides: tuple[frozenset[int], frozenset[int]] | None = None
    odd_cycle: CycleWitness | None = None


def components_bipartiteness(g: Graph, mask: int | None = None) -> list[ComponentInfo]:
    """Connected components (ordered by least vertex) with 2-colourability.

    Non-bipartite components carry an odd cycle found from a BFS tree.
    """
    rows = g.rows
    alive = g.full_mask if mask is None else mask
    seen = 0
    out = []
    for root in bits(alive):
        if (seen >> root) & 1:
            continue
        parent = {root: -1}
        level = {root: 0}
        order = [root]
        queue = deque([root])
        seen |= 1 << root
        conflict = None
        while queue:
            x = queue.popleft()
            for y in bits(rows[x] & alive):
                if y not in level:
                    level[y] = level[x] + 1
                    parent[y] = x
                    seen |= 1 << y
                    order.append(y)
                    queue.append(y)
                elif conflict is None and level[y] == level[x]:
                    conflict = (x, y)
        verts = frozenset(order)
        if conflict is None:
            even = frozenset(v for v in order if level[v] % 2 == 0)
            out.append(ComponentInfo(verts, True, (even, verts - even)))
            continue
        x, y = conflict
        left, right = [x], [y]
        while left[-1] != right[-1]:
            left.append(parent[left[-1]])
            right.append(parent[right[-1]])
        cyc = left + right[-2::-1]
        witness = CycleWitness(tuple(cyc))
        assert verify_cycle(g, witness.vertices) and witness.length % 2 == 1
        out.append(ComponentInfo(verts, False, None, witness))
    return out
