"""Densities, epsilon-regular pairs, reduced graphs and property M_t.

Everything here is meant for small, explicitly given vertex sets.  Certified
regularity is only available exhaustively (both sides at most
``EXHAUSTIVE_LIMIT``); the sampled mode can refute regularity but never
certify it.

Exhaustive search does not enumerate subsets of both sides.  For a fixed
W1 and a fixed size t of W2 the extreme values of e(W1, W2) come from the t
columns with the largest (smallest) counts, so only subsets of V1 are
enumerated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .coloring import Color, EdgeColoring
from .cycles import components_bipartiteness
from .errors import InputError
from .graph import CycleWitness, Graph, bits, to_mask

__all__ = [
    "EXHAUSTIVE_LIMIT",
    "Partition",
    "RegularityVerdict",
    "ReducedGraph",
    "MatchingCertificate",
    "pair_density",
    "check_regular_pair",
    "strongly_regular_trim",
    "TrimResult",
    "reduced_graph",
    "maximum_matching",
    "property_Mt",
    "dense_even_core",
    "find_induced_bipartite",
]

EXHAUSTIVE_LIMIT = 15


def _as_list(vs, n: int) -> list[int]:
    return list(bits(to_mask(vs, n)))


def _check_pair(g: Graph, V1, V2) -> tuple[list[int], list[int]]:
    a, b = _as_list(V1, g.n), _as_list(V2, g.n)
    if not a or not b:
        raise InputError("both sides of a pair must be nonempty")
    if set(a) & set(b):
        raise InputError("pair sides must be disjoint")
    return a, b


def _cross(g: Graph, a: list[int], b: list[int]) -> np.ndarray:
    mat = np.zeros((len(a), len(b)), dtype=np.int64)
    for i, x in enumerate(a):
        r = g.rows[x]
        for j, y in enumerate(b):
            mat[i, j] = (r >> y) & 1
    return mat


def pair_density(g: Graph, V1, V2) -> Fraction:
    """d(V1, V2) = e(V1, V2) / (|V1||V2|) as an exact rational."""
    a, b = _check_pair(g, V1, V2)
    mask = to_mask(b, g.n)
    e = sum((g.rows[x] & mask).bit_count() for x in a)
    return Fraction(e, len(a) * len(b))


@dataclass(frozen=True)
class Partition:
    parts: tuple[frozenset[int], ...]

    def __init__(self, parts: Iterable[Iterable[int]]):
        object.__setattr__(self, "parts", tuple(frozenset(int(v) for v in p) for p in parts))

    @property
    def s(self) -> int:
        return len(self.parts)

    def validate(self, g: Graph) -> None:
        seen: set[int] = set()
        for p in self.parts:
            if not p:
                raise InputError("partition parts must be nonempty")
            if seen & p:
                raise InputError("partition parts overlap")
            seen |= p
        if seen != set(range(g.n)):
            raise InputError("partition does not cover the vertex set")
        sizes = [len(p) for p in self.parts]
        if max(sizes) - min(sizes) > 1:
            raise InputError("partition part sizes differ by more than one")


@dataclass(frozen=True)
class RegularityVerdict:
    status: str  # "regular" | "irregular" | "heuristic-regular"
    density: Fraction
    witness: tuple[frozenset[int], frozenset[int]] | None = None
    deviation: Fraction | None = None  # |d(V1,V2) - d(W1,W2)| at the witness, or the max seen

    @property
    def is_regular(self) -> bool:
        return self.status != "irregular"


def _min_size(eps: Fraction, size: int) -> int:
    # least w >= 1 with w >= eps * size
    return max(1, math.ceil(eps * size))


def _subset_rows(p: int, min_w: int) -> np.ndarray:
    masks = np.arange(1, 1 << p, dtype=np.int64)
    ind = ((masks[:, None] >> np.arange(p)[None, :]) & 1).astype(np.int64)
    keep = ind.sum(axis=1) >= min_w
    return ind[keep]


def _scan(cross: np.ndarray, W1: np.ndarray, eps: Fraction, e_total: int,
          min_t: int) -> tuple[Fraction, tuple | None, bool]:
    """Worst deviation over the W1 rows in ``W1`` and every admissible |W2|.

    Returns (max deviation, witness (row index, t, top?), exceeded eps?).
    """
    p, q = cross.shape
    counts = W1 @ cross  # (k, q): per-column neighbours inside W1
    w1 = W1.sum(axis=1)
    # column order per row: descending count, ties by column index
    order = np.lexsort((np.broadcast_to(np.arange(q), counts.shape), -counts), axis=1)
    desc = np.take_along_axis(counts, order, axis=1)
    top = np.cumsum(desc, axis=1)
    bottom = np.cumsum(desc[:, ::-1], axis=1)
    ts = np.arange(1, q + 1)
    pq = p * q
    # deviation numerator: |e_total * w1 * t - E * p * q|, denominator p*q*w1*t
    best: Fraction = Fraction(-1)
    wit = None
    for sign, E in ((True, top), (False, bottom)):
        num = np.abs(e_total * w1[:, None] * ts[None, :] - E * pq)
        den = pq * w1[:, None] * ts[None, :]
        valid = ts[None, :] >= min_t
        approx = np.where(valid, num / den, -1.0)
        hi = approx.max()
        if hi < 0:
            continue
        rows_, cols_ = np.nonzero(approx >= hi - 1e-12)
        for r, c in zip(rows_.tolist(), cols_.tolist()):
            val = Fraction(int(num[r, c]), int(den[r, c]))
            t = c + 1
            key = (val, -int(w1[r]) * t, -(int(w1[r]) + t))
            if wit is None or key > (best, -wit[3] * wit[1], -(wit[3] + wit[1])):
                best, wit = val, (r, t, sign, int(w1[r]))
    return best, (None if wit is None else wit[:3] + (order,)), best > eps


def check_regular_pair(g: Graph, V1, V2, eps, mode: str = "exhaustive",
                       samples: int = 2000, seed: int = 0) -> RegularityVerdict:
    """Decide (exhaustive) or probe (sampled) epsilon-regularity of (V1, V2).

    Exhaustive mode reports the witness of maximum deviation, ties broken by
    smaller |W1||W2| then smaller |W1|+|W2|.
    """
    a, b = _check_pair(g, V1, V2)
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise InputError("eps must lie in (0, 1]")
    cross = _cross(g, a, b)
    p, q = cross.shape
    e_total = int(cross.sum())
    density = Fraction(e_total, p * q)
    min_w, min_t = _min_size(eps, p), _min_size(eps, q)
    if mode == "exhaustive":
        if p > EXHAUSTIVE_LIMIT or q > EXHAUSTIVE_LIMIT:
            raise InputError(f"exhaustive regularity limited to sides of size <= {EXHAUSTIVE_LIMIT}")
        W1 = _subset_rows(p, min_w)
        label = "regular"
    elif mode == "sampled":
        rng = np.random.Generator(np.random.PCG64(seed))
        sizes = rng.integers(min_w, p + 1, size=samples)
        ranks = rng.random((samples, p)).argsort(axis=1).argsort(axis=1)
        W1 = (ranks < sizes[:, None]).astype(np.int64)
        W1 = np.vstack([np.ones((1, p), dtype=np.int64), W1])
        label = "heuristic-regular"
    else:
        raise InputError(f"unknown regularity mode {mode!r}")
    dev, wit, bad = _scan(cross, W1, eps, e_total, min_t)
    if not bad:
        return RegularityVerdict(label, density, None, max(dev, Fraction(0)))
    r, t, top, order = wit
    cols = order[r][:t] if top else order[r][::-1][:t]
    w1 = frozenset(a[i] for i in np.flatnonzero(W1[r]))
    w2 = frozenset(b[int(j)] for j in cols)
    return RegularityVerdict("irregular", density, (w1, w2), dev)


@dataclass(frozen=True)
class TrimResult:
    W1: frozenset[int]
    W2: frozenset[int]
    density: Fraction
    guarantee_held: bool  # |W_i| >= (1 - 2 eps)|V_i| for both sides


def strongly_regular_trim(g: Graph, V1, V2, eps) -> TrimResult:
    """Drop low-degree vertices until each keeps >= d(W1,W2)|other side|/10.

    Vertices below the threshold are removed in rounds until nothing
    changes; the density is recomputed for the current pair each round.
    """
    a, b = _check_pair(g, V1, V2)
    eps = Fraction(eps)
    m1, m2 = to_mask(a, g.n), to_mask(b, g.n)
    rows = g.rows
    while True:
        s1, s2 = m1.bit_count(), m2.bit_count()
        if s1 == 0 or s2 == 0:
            raise InputError("degenerate pair: a side emptied during trimming")
        e = sum((rows[x] & m2).bit_count() for x in bits(m1))
        d = Fraction(e, s1 * s2)
        drop1 = [x for x in bits(m1) if (rows[x] & m2).bit_count() < d * s2 / 10]
        drop2 = [y for y in bits(m2) if (rows[y] & m1).bit_count() < d * s1 / 10]
        if not drop1 and not drop2:
            break
        for x in drop1:
            m1 &= ~(1 << x)
        for y in drop2:
            m2 &= ~(1 << y)
    held = (m1.bit_count() >= (1 - 2 * eps) * len(a)) and (m2.bit_count() >= (1 - 2 * eps) * len(b))
    return TrimResult(frozenset(bits(m1)), frozenset(bits(m2)), d, bool(held))


@dataclass
class ReducedGraph:
    s: int
    edges: dict[tuple[int, int], Color | None] = field(default_factory=dict)
    densities: dict[tuple[int, int], tuple[Fraction, Fraction]] = field(default_factory=dict)
    heuristic: bool = False

    def color_graph(self, color: Color) -> Graph:
        return Graph.from_edges(self.s, [e for e, c in self.edges.items() if c is color])

    def to_json(self) -> dict:
        out = []
        for (i, j), c in sorted(self.edges.items()):
            dr, db = self.densities[(i, j)]
            out.append({
                "pair": [i, j],
                "color": None if c is None else c.value,
                "red_density": f"{dr.numerator}/{dr.denominator}",
                "blue_density": f"{db.numerator}/{db.denominator}",
            })
        return {"s": self.s, "heuristic": self.heuristic, "pairs": out}


def reduced_graph(g: Graph, coloring: EdgeColoring, partition: Partition, eps,
                  mode: str = "exhaustive", samples: int = 2000, seed: int = 0) -> ReducedGraph:
    """Edge i~j iff (W_i, W_j) is eps-regular in both colours; colour = majority, ties red."""
    if coloring.host != g:
        raise InputError("colouring belongs to a different host graph")
    partition.validate(g)
    out = ReducedGraph(partition.s, heuristic=(mode == "sampled"))
    parts = partition.parts
    for i in range(partition.s):
        for j in range(i + 1, partition.s):
            A, B = parts[i], parts[j]
            dr = pair_density(coloring.red, A, B)
            db = pair_density(coloring.blue, A, B)
            out.densities[(i, j)] = (dr, db)
            ok = all(
                check_regular_pair(h, A, B, eps, mode, samples, seed).is_regular
                for h in (coloring.red, coloring.blue)
            )
            out.edges[(i, j)] = (Color.RED if dr >= db else Color.BLUE) if ok else None
    return out


# -- matchings -----------------------------------------------------------


def maximum_matching(g: Graph, mask: int | None = None) -> list[tuple[int, int]]:
    """Maximum-cardinality matching (Edmonds' blossom algorithm) inside ``mask``."""
    n = g.n
    alive = g.full_mask if mask is None else mask
    adj = [list(bits(g.rows[v] & alive)) if (alive >> v) & 1 else [] for v in range(n)]
    match = [-1] * n
    for v in bits(alive):
        if match[v] == -1:
            for w in adj[v]:
                if match[w] == -1:
                    match[v], match[w] = w, v
                    break

    def lca(base, p, a, b):
        seen = [False] * n
        while True:
            a = base[a]
            seen[a] = True
            if match[a] == -1:
                break
            a = p[match[a]]
        while True:
            b = base[b]
            if seen[b]:
                return b
            b = p[match[b]]

    def mark(base, p, blossom, v, b, child):
        while base[v] != b:
            blossom[base[v]] = blossom[base[match[v]]] = True
            p[v] = child
            child = match[v]
            v = p[match[v]]

    def augmenting(root) -> int:
        used = [False] * n
        p = [-1] * n
        base = list(range(n))
        used[root] = True
        queue = [root]
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            for to in adj[v]:
                if base[v] == base[to] or match[v] == to:
                    continue
                if to == root or (match[to] != -1 and p[match[to]] != -1):
                    cur = lca(base, p, v, to)
                    blossom = [False] * n
                    mark(base, p, blossom, v, cur, to)
                    mark(base, p, blossom, to, cur, v)
                    for i in range(n):
                        if blossom[base[i]]:
                            base[i] = cur
                            if not used[i]:
                                used[i] = True
                                queue.append(i)
                elif p[to] == -1:
                    p[to] = v
                    if match[to] == -1:
                        return _augment(p, to)
                    used[match[to]] = True
                    queue.append(match[to])
        return 0

    def _augment(p, v) -> int:
        while v != -1:
            pv = p[v]
            nxt = match[pv]
            match[v], match[pv] = pv, v
            v = nxt
        return 1

    for v in bits(alive):
        if match[v] == -1:
            augmenting(v)
    return [(v, match[v]) for v in range(n) if match[v] > v]


@dataclass(frozen=True)
class MatchingCertificate:
    matching: tuple[tuple[int, int], ...]
    component: frozenset[int]
    component_id: int
    saturated: int
    odd_cycle: CycleWitness


def property_Mt(g: Graph, t: float) -> MatchingCertificate | None:
    """A matching saturating >= ceil(t) vertices inside one non-bipartite component.

    Returns the non-bipartite component with the largest maximum matching
    (ties to the component with the least vertex) if it meets the bound.
    """
    if not t > 0:
        raise InputError("t must be positive")
    need = math.ceil(t)
    best = None
    for cid, comp in enumerate(components_bipartiteness(g)):
        if comp.bipartite:
            continue
        m = maximum_matching(g, to_mask(comp.vertices, g.n))
        if best is None or len(m) > len(best[1]):
            best = (cid, m, comp)
    if best is None or 2 * len(best[1]) < need:
        return None
    cid, m, comp = best
    return MatchingCertificate(tuple(m), comp.vertices, cid, 2 * len(m), comp.odd_cycle)


# -- reduced-graph structure ----------------------------------------------


def dense_even_core(h: Graph, W: Iterable[int], eps: float) -> frozenset[int]:
    """Drop vertices of W with degree < (1 - 2 sqrt(eps)) s, then the largest id if odd."""
    s = h.n
    keep = sorted(w for w in set(W) if h.degree(w) >= (1 - 2 * math.sqrt(eps)) * s)
    if len(keep) % 2:
        keep.pop()
    return frozenset(keep)


def _independent_sets(rows: Sequence[int], cand: int, min_size: int):
    """Yield maximal-by-extension independent sets (as masks) of size >= min_size."""
    def rec(chosen: int, cand: int):
        if chosen.bit_count() + cand.bit_count() < min_size:
            return
        if not cand:
            yield chosen
            return
        low = cand & -cand
        v = low.bit_length() - 1
        yield from rec(chosen | low, cand & ~low & ~rows[v])
        yield from rec(chosen, cand & ~low)
    yield from rec(0, cand)


def _max_independent(rows, cand: int, target: int) -> int | None:
    for s in _independent_sets(rows, cand, target):
        return s
    return None


def find_induced_bipartite(h: Graph, bound: int, exact_limit: int = 20):
    """Disjoint independent sets W1, W2 of ``h`` with both sizes >= bound.

    Exact (exhaustive) up to ``exact_limit`` vertices; above that a greedy
    pass that may miss solutions.  Returns ``(W1, W2, exact)`` or ``None``
    (``None`` is only conclusive when the search was exact).
    """
    rows = h.rows
    if h.n <= exact_limit:
        for first in _independent_sets(rows, h.full_mask, bound):
            # restrict W1 to exactly its least `bound` members to leave room
            w1 = 0
            for v in list(bits(first))[:bound]:
                w1 |= 1 << v
            second = _max_independent(rows, h.full_mask & ~w1, bound)
            if second is not None:
                return frozenset(bits(w1)), frozenset(bits(second)), True
        return None
    order = sorted(range(h.n), key=lambda v: (h.degree(v), v))
    sets = []
    taken = 0
    for _ in range(2):
        cur = 0
        for v in order:
            if not (taken >> v) & 1 and not rows[v] & cur:
                cur |= 1 << v
        sets.append(cur)
        taken |= cur
    if sets[0].bit_count() >= bound and sets[1].bit_count() >= bound:
        return frozenset(bits(sets[0])), frozenset(bits(sets[1])), False
    return None
