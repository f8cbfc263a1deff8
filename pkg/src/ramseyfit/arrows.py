"""Deciding G -> (C_n, C_k) by pruned search, plus reference formulas and CNF export.

The search colours edges one at a time in a fixed order, red first, and
closes a branch as soon as the newest edge completes a red C_n or a blue
C_k.  Only cycles through the new edge need checking, so each test is a
bounded path search between its endpoints.
"""

from __future__ import annotations

import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

from .coloring import Color, EdgeColoring
from .cycles import SearchBudget, find_cycle_of_length
from .errors import BudgetExhausted, ClassicalException, InputError, UnsupportedRegime
from .graph import Graph, bits

__all__ = [
    "ArrowVerdict",
    "arrows",
    "edge_order",
    "verify_counterexample",
    "cycle_copies",
    "count_cycle_copies",
    "CNF_GUARD",
    "export_cnf",
    "parse_dimacs",
    "solve_cnf",
    "rstar_formula",
    "RSTAR_NOTE",
    "ramsey_cycle_number",
]

SPLIT_DEPTH = 3
CNF_GUARD = 10_000_000
RSTAR_NOTE = "asymptotic theorem: value not asserted for small n"


@dataclass(frozen=True)
class ArrowVerdict:
    status: str  # "arrows" | "not_arrows" | "unknown"
    counterexample: EdgeColoring | None
    nodes_explored: int
    wall_time: float
    reason: str = ""

    def to_json(self, timings: bool = False) -> dict:
        out = {
            "status": self.status,
            "nodes_explored": self.nodes_explored,
            "reason": self.reason,
            "counterexample": None if self.counterexample is None else
            [[u, v, c.value] for (u, v), c in self.counterexample.items()],
        }
        if timings:
            out["wall_time"] = self.wall_time
        return out


def edge_order(g: Graph) -> list[tuple[int, int]]:
    """Edges by descending endpoint degree sum, ties in colex order (by v, then u).

    Colex ties finish every small vertex prefix before touching a new
    vertex, so short cycles close (and prune) early.
    """
    deg = g.degrees()
    return sorted(g.edges(), key=lambda e: (-(deg[e[0]] + deg[e[1]]), e[1], e[0]))


def _has_path(rows: list[int], u: int, v: int, length: int) -> bool:
    """Is there a simple u-v path with exactly ``length`` edges?"""
    target = 1 << v

    def rec(x: int, used: int, left: int) -> bool:
        if left == 1:
            return bool(rows[x] & target)
        cand = rows[x] & ~used & ~target
        while cand:
            low = cand & -cand
            cand ^= low
            y = low.bit_length() - 1
            if rec(y, used | low, left - 1):
                return True
        return False

    return rec(u, (1 << u) | target, length)


class _Stop(Exception):
    pass


class _Shared:
    def __init__(self, budget: SearchBudget):
        self.lock = threading.Lock()
        self.nodes = 0
        self.node_cap = budget.nodes
        self.deadline = None if budget.seconds is None else time.monotonic() + budget.seconds
        self.deterministic = budget.deterministic
        self.found: dict[int, list[bool]] = {}
        self.exhausted = False

    def spend(self, k: int) -> None:
        with self.lock:
            self.nodes += k
            over = self.node_cap is not None and self.nodes > self.node_cap
        if over or (self.deadline is not None and time.monotonic() > self.deadline):
            self.exhausted = True
            raise _Stop

    def should_stop(self, idx: int) -> bool:
        if self.exhausted:
            return True
        if not self.found:
            return False
        return min(self.found) < idx if self.deterministic else True


class _Search:
    """Backtracking over one subtree; ``colors[i]`` is True for red."""

    def __init__(self, n_vertices: int, edges: list[tuple[int, int]], n: int, k: int):
        self.edges = edges
        self.n, self.k = n, k
        self.red = [0] * n_vertices
        self.blue = [0] * n_vertices
        self.colors: list[bool] = []

    def _set(self, i: int, red: bool) -> bool:
        """Colour edge i; False (and undone) if it closes a forbidden cycle."""
        u, v = self.edges[i]
        rows, length = (self.red, self.n) if red else (self.blue, self.k)
        if _has_path(rows, u, v, length - 1):
            return False
        rows[u] |= 1 << v
        rows[v] |= 1 << u
        self.colors.append(red)
        return True

    def _unset(self) -> None:
        i = len(self.colors) - 1
        u, v = self.edges[i]
        rows = self.red if self.colors.pop() else self.blue
        rows[u] &= ~(1 << v)
        rows[v] &= ~(1 << u)

    def apply_prefix(self, prefix: list[bool]) -> None:
        for i, red in enumerate(prefix):
            ok = self._set(i, red)
            assert ok

    def prefixes(self, depth: int) -> Iterator[list[bool]]:
        """All viable colourings of the first ``depth`` edges, in search order."""
        if len(self.colors) == depth:
            yield list(self.colors)
            return
        i = len(self.colors)
        for red in (True, False):
            if self._set(i, red):
                yield from self.prefixes(depth)
                self._unset()

    def run(self, shared: _Shared, idx: int) -> list[bool] | None:
        m = len(self.edges)
        pending = 0

        def rec() -> bool:
            nonlocal pending
            i = len(self.colors)
            if i == m:
                return True
            for red in (True, False):
                pending += 1
                if pending >= 256:
                    batch, pending = pending, 0
                    shared.spend(batch)
                    if shared.should_stop(idx):
                        raise _Stop
                if self._set(i, red):
                    if rec():
                        return True
                    self._unset()
            return False

        try:
            return list(self.colors) if rec() else None
        finally:
            with shared.lock:
                shared.nodes += pending


def verify_counterexample(g: Graph, coloring: EdgeColoring, n: int, k: int) -> bool:
    """Exact check: no red C_n and no blue C_k."""
    return (find_cycle_of_length(coloring.red, n, None) is None
            and find_cycle_of_length(coloring.blue, k, None) is None)


def arrows(g: Graph, n: int, k: int, budget: SearchBudget | None = None) -> ArrowVerdict:
    """Decide whether every red/blue colouring of ``g`` has a red C_n or a blue C_k.

    With one thread (or in deterministic mode) a counterexample is the
    least one in the order red < blue over ``edge_order(g)``.  With several
    threads the first ``SPLIT_DEPTH`` edges are pre-coloured into subtrees
    that workers take from a shared queue.  An exhausted budget yields
    ``unknown`` unless a counterexample was already found.
    """
    if n < 3 or k < 3:
        raise InputError("cycle lengths must be at least 3")
    budget = budget or SearchBudget(nodes=None)
    start = time.monotonic()
    edges = edge_order(g)
    shared = _Shared(budget)
    depth = min(SPLIT_DEPTH, len(edges)) if budget.threads > 1 else 0
    prefixes = list(_Search(g.n, edges, n, k).prefixes(depth))

    def task(idx: int) -> None:
        if shared.should_stop(idx):
            return
        s = _Search(g.n, edges, n, k)
        s.apply_prefix(prefixes[idx])
        try:
            found = s.run(shared, idx)
        except _Stop:
            return
        if found is not None:
            with shared.lock:
                shared.found[idx] = found

    if budget.threads > 1 and len(prefixes) > 1:
        with ThreadPoolExecutor(max_workers=budget.threads) as pool:
            list(pool.map(task, range(len(prefixes))))
    else:
        for idx in range(len(prefixes)):
            task(idx)
    elapsed = time.monotonic() - start
    if shared.found:
        colors = shared.found[min(shared.found)]
        col = EdgeColoring(g, [e for e, red in zip(edges, colors) if red])
        assert verify_counterexample(g, col, n, k)
        return ArrowVerdict("not_arrows", col, shared.nodes, elapsed)
    if shared.exhausted:
        return ArrowVerdict("unknown", None, shared.nodes, elapsed, "search budget exhausted")
    return ArrowVerdict("arrows", None, shared.nodes, elapsed)


# -- CNF -------------------------------------------------------------------


def _cycles(g: Graph, length: int) -> Iterator[tuple[int, ...]]:
    """Each cycle of the given length once: least vertex first, x1 < x_last."""
    rows = g.rows
    for a in range(g.n):
        higher = g.full_mask & ~((1 << (a + 1)) - 1)
        path = [a]

        def rec(x: int, used: int):
            if len(path) == length:
                if (rows[x] >> a) & 1 and path[1] < path[-1]:
                    yield tuple(path)
                return
            cand = rows[x] & higher & ~used
            for y in bits(cand):
                path.append(y)
                yield from rec(y, used | (1 << y))
                path.pop()

        yield from rec(a, 1 << a)


def cycle_copies(g: Graph, length: int) -> list[tuple[int, ...]]:
    return list(_cycles(g, length))


def count_cycle_copies(g: Graph, length: int, limit: int | None = None) -> int:
    """Number of length-``length`` cycles, stopping once ``limit`` is passed."""
    c = 0
    for _ in _cycles(g, length):
        c += 1
        if limit is not None and c > limit:
            break
    return c


def _cnf_clauses(g: Graph, n: int, k: int) -> tuple[list[tuple[int, int]], list[list[int]]]:
    edges = g.edges()
    var = {e: i + 1 for i, e in enumerate(edges)}

    def lits(cyc):
        return [var[(min(x, y), max(x, y))] for x, y in zip(cyc, cyc[1:] + cyc[:1])]

    clauses = [sorted(-x for x in lits(c)) for c in _cycles(g, n)]
    clauses += [sorted(lits(c)) for c in _cycles(g, k)]
    return edges, clauses


def export_cnf(g: Graph, n: int, k: int, guard: int = CNF_GUARD) -> str:
    """DIMACS CNF satisfiable iff ``g`` does not arrow (C_n, C_k).

    Variable i (1-based) is the i-th edge in sorted (u, v) order; true
    means red.  Each C_n copy forbids all-red, each C_k copy all-blue.
    """
    if n < 3 or k < 3:
        raise InputError("cycle lengths must be at least 3")
    total = count_cycle_copies(g, n, guard)
    if total <= guard:
        total += count_cycle_copies(g, k, guard - total)
    if total > guard:
        raise InputError(f"more than {guard} cycle copies ({total} counted before stopping); refusing to export")
    edges, clauses = _cnf_clauses(g, n, k)
    lines = [f"c arrowing G -> (C_{n}, C_{k}); variable i = edge i in sorted order, true = red",
             f"p cnf {len(edges)} {len(clauses)}"]
    lines += [" ".join(map(str, c)) + " 0" for c in clauses]
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> tuple[int, list[list[int]]]:
    nvars, nclauses, clauses, cur = None, None, [], []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InputError(f"bad DIMACS header {line!r}")
            nvars, nclauses = int(parts[2]), int(parts[3])
            continue
        for tok in line.split():
            x = int(tok)
            if x == 0:
                clauses.append(cur)
                cur = []
            else:
                cur.append(x)
    if nvars is None or cur or len(clauses) != nclauses:
        raise InputError("malformed DIMACS body")
    return nvars, clauses


def solve_cnf(nvars: int, clauses: list[list[int]]) -> dict[int, bool] | None:
    """Small DPLL solver (unit propagation + branching); a model or None."""

    def simplify(cls, lit):
        out = []
        for c in cls:
            if lit in c:
                continue
            if -lit in c:
                c = [x for x in c if x != -lit]
                if not c:
                    return None
            out.append(c)
        return out

    def dpll(cls, assign):
        while True:
            unit = next((c[0] for c in cls if len(c) == 1), None)
            if unit is None:
                break
            assign = {**assign, abs(unit): unit > 0}
            cls = simplify(cls, unit)
            if cls is None:
                return None
        if not cls:
            return assign
        lit = cls[0][0]
        for choice in (lit, -lit):
            nxt = simplify(cls, choice)
            if nxt is not None:
                res = dpll(nxt, {**assign, abs(choice): choice > 0})
                if res is not None:
                    return res
        return None

    if any(not c for c in clauses):
        return None
    model = dpll([list(c) for c in clauses], {})
    if model is None:
        return None
    return {v: model.get(v, True) for v in range(1, nvars + 1)}


# -- formulas --------------------------------------------------------------


def rstar_formula(n: int) -> int:
    """ceil((n+1)(2n-1)/2), the restricted size Ramsey value for large n."""
    if not isinstance(n, int) or n < 3:
        raise InputError("n must be an integer >= 3")
    return ((n + 1) * (2 * n - 1) + 1) // 2


def ramsey_cycle_number(n: int, k: int) -> int:
    """r(C_n, C_k) = 2n - 1 for odd k with 3 <= k <= n, except (3, 3)."""
    if not isinstance(n, int) or not isinstance(k, int) or n < 3 or k < 3:
        raise InputError("n and k must be integers >= 3")
    if k % 2 == 0:
        raise UnsupportedRegime("even k is outside the covered regime")
    if k > n:
        raise InputError("need k <= n")
    if (n, k) == (3, 3):
        raise ClassicalException("r(C_3, C_3) = 6, not 2n - 1 = 5")
    return 2 * n - 1
