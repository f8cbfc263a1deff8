"""Constructive monochromatic cycles inside coloured fit graphs.

The builders here are allowed to be heuristic internally, but nothing is
emitted without being re-verified against the colour class it claims.

Cycles are assembled from paths that alternate between the two sides of a
pair (A, B).  ``bipartite_path_builder`` grows such a path greedily, always
stepping to the candidate with the most unused neighbours on the opposite
side, and closes the last few steps with an exact search.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .coloring import Color, EdgeColoring
from .cycles import find_path_of_length
from .errors import BudgetExhausted, ExtensionFailure, InputError, PathBuildError, PreconditionError
from .graph import CycleWitness, Graph, bits, to_mask, verify_cycle
from .regularity import check_regular_pair, pair_density, strongly_regular_trim

__all__ = [
    "SideThresholds",
    "Classification",
    "classify_vertices",
    "DEFAULT_EPS",
    "path_length_cap",
    "bipartite_path_builder",
    "EndgameSeed",
    "find_endgame_seed",
    "SpectrumResult",
    "build_blue_spectrum",
    "rotation_extend",
    "build_red_pancyclic",
    "balanced_split",
]

DEFAULT_EPS = 0.05
TAIL_STEPS = 5
TAIL_BUDGET = 200_000
SPLIT_ATTEMPTS = 20


@dataclass(frozen=True)
class SideThresholds:
    """Degree thresholds for an n-vertex-scale colouring.

    Defaults are 0.22n (red degree into a side), 0.23n (plain degree into
    a side) and n^0.9 (blue degree marking a hub), all times ``multiplier``.
    Any threshold can be overridden explicitly.
    """

    n: int
    multiplier: float = 1.0
    many_red_override: float | None = None
    side_degree_override: float | None = None
    hub_blue_override: float | None = None

    def __post_init__(self):
        if self.n < 1 or not self.multiplier > 0:
            raise InputError("thresholds need n >= 1 and a positive multiplier")
        for v in (self.many_red_override, self.side_degree_override, self.hub_blue_override):
            if v is not None and not v > 0:
                raise InputError("threshold overrides must be positive")

    @property
    def many_red(self) -> float:
        return self.many_red_override or 0.22 * self.n * self.multiplier

    @property
    def side_degree(self) -> float:
        return self.side_degree_override or 0.23 * self.n * self.multiplier

    @property
    def hub_blue(self) -> float:
        return self.hub_blue_override or self.n ** 0.9 * self.multiplier

    @property
    def split_share(self) -> float:
        return max(1.0, 0.1 * self.n * self.multiplier)


def _default_thresholds(g: Graph, thr: SideThresholds | None) -> SideThresholds:
    return thr if thr is not None else SideThresholds((g.n + 1) // 2)


def _disjoint_sides(g: Graph, V1, V2) -> tuple[int, int]:
    m1, m2 = to_mask(V1, g.n), to_mask(V2, g.n)
    if m1 & m2:
        raise InputError("V1 and V2 must be disjoint")
    return m1, m2


@dataclass(frozen=True)
class Classification:
    W1: frozenset[int]
    W2: frozenset[int]
    special: frozenset[int]
    unclassified: frozenset[int]
    dual: frozenset[int] = frozenset()  # met both W conditions; placed by red majority

    @property
    def s(self) -> int | None:
        return min(self.special) if len(self.special) == 1 else None

    def side(self, i: int) -> frozenset[int]:
        return self.W1 if i == 1 else self.W2


def classify_vertices(g: Graph, coloring: EdgeColoring, V1, V2,
                      thr: SideThresholds | None = None) -> Classification:
    """Split V into W1, W2, special vertices and the rest.

    A vertex is special if it has fewer than ``side_degree`` neighbours in
    V1 or in V2.  Every other vertex joins W_i when it has at least
    ``many_red`` red and at most ``hub_blue`` blue neighbours in V_i; a
    vertex qualifying for both goes to the side where it has more red
    neighbours (ties to W1).
    """
    thr = _default_thresholds(g, thr)
    m1, m2 = _disjoint_sides(g, V1, V2)
    red, blue = coloring.red.rows, coloring.blue.rows
    W = ([], [])
    special, rest, dual = [], [], []
    for v in range(g.n):
        row = g.rows[v]
        if (row & m1).bit_count() < thr.side_degree or (row & m2).bit_count() < thr.side_degree:
            special.append(v)
            continue
        reds = [(red[v] & m).bit_count() for m in (m1, m2)]
        ok = [reds[i] >= thr.many_red and (blue[v] & m).bit_count() <= thr.hub_blue
              for i, m in enumerate((m1, m2))]
        if ok[0] and ok[1]:
            dual.append(v)
            W[0 if reds[0] >= reds[1] else 1].append(v)
        elif ok[0] or ok[1]:
            W[0 if ok[0] else 1].append(v)
        else:
            rest.append(v)
    return Classification(frozenset(W[0]), frozenset(W[1]), frozenset(special),
                          frozenset(rest), frozenset(dual))


# -- paths inside a pair ---------------------------------------------------


def path_length_cap(density: float, size_a: int, size_b: int, eps: float = DEFAULT_EPS) -> float:
    """Longest path length the pair construction may be asked for."""
    if density <= 0:
        return 0.0
    return 2 * (1 - 2 * eps / density) * min(size_a, size_b)


def _pair_rows(sub: Graph, a: int, b: int) -> list[int]:
    rows = [0] * sub.n
    for x in bits(a):
        rows[x] = sub.rows[x] & b
    for y in bits(b):
        rows[y] = sub.rows[y] & a
    return rows


def _greedy(rows: list[int], u: int, v: int, length: int, free: int) -> list[int] | None:
    path = [u]
    cur = u
    free &= ~(1 << u) & ~(1 << v)
    while length - (len(path) - 1) > TAIL_STEPS:
        cand = rows[cur] & free
        best, best_score = -1, -1
        for y in bits(cand):
            score = (rows[y] & free & ~(1 << y)).bit_count()
            if score > best_score:
                best, best_score = y, score
        if best < 0:
            return None
        path.append(best)
        free &= ~(1 << best)
        cur = best
    remaining = length - (len(path) - 1)
    pair = Graph._trusted(len(rows), rows)
    try:
        tail = find_path_of_length(pair, cur, v, remaining, allowed=free | (1 << cur) | (1 << v),
                                   budget=TAIL_BUDGET)
    except BudgetExhausted:
        return None
    if tail is None:
        return None
    return path + list(tail[1:])


def bipartite_path_builder(g: Graph, coloring: EdgeColoring, color: Color, A, B, u: int, v: int,
                           length: int, eps: float = DEFAULT_EPS, avoid=(),
                           check_regular: bool = False) -> list[int]:
    """A path with ``length`` edges from u to v alternating between A and B.

    All edges are in ``color``.  Endpoints on opposite sides need an odd
    length, endpoints on the same side an even one.  Vertices in ``avoid``
    are never used.  Raises PathBuildError with code ``parity``,
    ``length_cap``, ``precondition`` or ``dead_end``; a dead end is retried
    once from v towards u before giving up.
    """
    sub = coloring.subgraph(Color(color))
    a, b = to_mask(A, g.n), to_mask(B, g.n)
    if a & b:
        raise InputError("pair sides must be disjoint")
    av = to_mask(avoid, g.n)
    for x in (u, v):
        if not 0 <= x < g.n or not ((a | b) >> x) & 1:
            raise PathBuildError("precondition", f"endpoint {x} is not in A or B")
        if (av >> x) & 1:
            raise PathBuildError("precondition", f"endpoint {x} is in the avoided set")
    if u == v or length < 1:
        raise PathBuildError("precondition", "need distinct endpoints and a positive length")
    same = ((a >> u) & 1) == ((a >> v) & 1)
    if same != (length % 2 == 0):
        raise PathBuildError("parity", f"length {length} has the wrong parity for these endpoints")
    a &= ~av
    b &= ~av
    d = float(pair_density(sub, list(bits(a)), list(bits(b))))
    cap = path_length_cap(d, a.bit_count(), b.bit_count(), eps)
    if length > cap:
        raise PathBuildError("length_cap", f"length {length} exceeds cap {cap:.2f}")
    if check_regular:
        trim = strongly_regular_trim(sub, list(bits(a)), list(bits(b)), eps)
        probe = check_regular_pair(sub, list(bits(a)), list(bits(b)), eps, mode="sampled")
        if len(trim.W1) + len(trim.W2) != (a | b).bit_count() or not probe.is_regular:
            raise PathBuildError("precondition", "pair is not strongly regular in this colour")
    rows = _pair_rows(sub, a, b)
    free = a | b
    path = _greedy(rows, u, v, length, free)
    if path is None:
        back = _greedy(rows, v, u, length, free)
        path = None if back is None else back[::-1]
    if path is None:
        raise PathBuildError("dead_end", f"greedy construction of a {length}-path from {u} to {v} got stuck")
    assert len(path) == length + 1 and path[0] == u and path[-1] == v
    assert len(set(path)) == len(path)
    for x, y in zip(path, path[1:]):
        assert sub.has_edge(x, y) and ((a >> x) & 1) != ((a >> y) & 1)
    return path


# -- emission --------------------------------------------------------------


@dataclass
class SpectrumResult:
    """Coverage map of a builder: verified witnesses plus explicit gaps."""

    color: Color
    witnesses: dict[int, CycleWitness] = field(default_factory=dict)
    gaps: dict[int, str] = field(default_factory=dict)
    rejected: int = 0  # candidates that failed re-verification and were dropped

    @property
    def complete(self) -> bool:
        return not self.gaps

    def to_json(self) -> dict:
        return {
            "color": self.color.value,
            "cycles": {str(k): list(self.witnesses[k].vertices) for k in sorted(self.witnesses)},
            "gaps": {str(k): self.gaps[k] for k in sorted(self.gaps)},
            "rejected": self.rejected,
        }


def _emit(result: SpectrumResult, sub: Graph, length: int, seq, within: int | None = None) -> bool:
    seq = list(seq)
    ok = len(seq) == length and verify_cycle(sub, seq)
    if ok and within is not None:
        ok = all((within >> x) & 1 for x in seq)
    if not ok:
        result.rejected += 1
        return False
    result.witnesses[length] = CycleWitness(seq)
    return True


def _run_lengths(lengths: Iterable[int], build: Callable[[int], list[int] | str], workers: int):
    lengths = list(lengths)
    if workers <= 1:
        return [(l, build(l)) for l in lengths]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(zip(lengths, pool.map(build, lengths)))


# -- blue spectrum -----------------------------------------------------------


@dataclass(frozen=True)
class EndgameSeed:
    s: int
    w: int
    v1: int
    v2: int
    v3: int


def find_endgame_seed(g: Graph, coloring: EdgeColoring, V1, V2, s: int) -> EndgameSeed | None:
    """Least-id (w, v1, v2, v3) around s for the blue short-cycle configuration.

    w in V2 and v1 in V1 are blue neighbours of s with wv1 blue; v2 in V2
    is a blue neighbour of v1 other than w, and v3 a blue neighbour of both
    v2 and s in V1 other than v1.
    """
    m1, m2 = _disjoint_sides(g, V1, V2)
    blue = coloring.blue.rows
    ns1 = blue[s] & m1
    for w in bits(blue[s] & m2):
        for v1 in bits(blue[w] & ns1):
            for v2 in bits(blue[v1] & m2 & ~(1 << w) & ~(1 << s)):
                cand = blue[v2] & ns1 & ~(1 << v1)
                if cand:
                    v3 = (cand & -cand).bit_length() - 1
                    return EndgameSeed(s, w, v1, v2, v3)
    return None


def build_blue_spectrum(g: Graph, coloring: EdgeColoring, V1, V2, hub: int | None = None,
                        seed: EndgameSeed | None = None, thr: SideThresholds | None = None,
                        eps: float = DEFAULT_EPS, max_length: int | None = None,
                        workers: int = 1) -> SpectrumResult:
    """Blue cycles of every length 3..max_length (default (N+1)//2).

    With a hub: even lengths close a blue cross edge xy with a path from y
    back to x; odd lengths join two blue neighbours of the hub (one per
    side) by a path; the triangle is the hub plus a blue edge between its
    two neighbour sets.  With an endgame seed (s, w, v1, v2, v3) the short
    odd cycles are s w v1 and s w v1 v2 v3, longer odd ones extend the
    path v3 s w v1 v2 by a path from v2 to v3.
    """
    thr = _default_thresholds(g, thr)
    m1, m2 = _disjoint_sides(g, V1, V2)
    blue = coloring.blue
    rows = blue.rows
    top = max_length if max_length is not None else (g.n + 1) // 2
    if (hub is None) == (seed is None):
        raise InputError("give exactly one of a hub vertex or an endgame seed")
    if hub is not None:
        n1, n2 = (rows[hub] & m1).bit_count(), (rows[hub] & m2).bit_count()
        short = [name for name, k in (("V1", n1), ("V2", n2)) if k < thr.hub_blue]
        if short:
            raise PreconditionError(
                f"hub {hub} has {n1} blue neighbours in V1 and {n2} in V2; "
                f"{' and '.join(short)} below the threshold {thr.hub_blue:.2f}")
        m1 &= ~(1 << hub)
        m2 &= ~(1 << hub)
    else:
        for x, y in ((seed.s, seed.w), (seed.w, seed.v1), (seed.v1, seed.s), (seed.v1, seed.v2),
                     (seed.v2, seed.v3), (seed.v3, seed.s)):
            if not blue.has_edge(x, y):
                raise PreconditionError(f"endgame seed edge ({x}, {y}) is not blue")
        if not ((m1 >> seed.v1) & (m1 >> seed.v3) & (m2 >> seed.w) & (m2 >> seed.v2) & 1):
            raise PreconditionError("endgame seed vertices are on the wrong sides")

    def cross_edges(a_mask, b_mask):
        for x in bits(a_mask):
            for y in bits(rows[x] & b_mask):
                yield x, y

    def even(l: int):
        avoid = [] if seed is None else [seed.s, seed.w, seed.v1]
        a, b = m1, m2
        if seed is not None:
            a &= ~(1 << seed.v1) & ~(1 << seed.s)
            b &= ~(1 << seed.w) & ~(1 << seed.s)
            pairs = [(seed.v3, seed.v2)]
        else:
            pairs = cross_edges(a, b)
        last = "no blue cross edge"
        for k, (x, y) in enumerate(pairs):
            if k >= 8:
                break
            try:
                return bipartite_path_builder(g, coloring, Color.BLUE, a, b, y, x, l - 1, eps, avoid)
            except PathBuildError as exc:
                last = f"{exc.code}: {exc}"
                if exc.code in ("length_cap", "parity"):
                    break
        return last

    def odd_hub(l: int):
        if l == 3:
            for x, y in cross_edges(rows[hub] & m1, rows[hub] & m2):
                return [hub, x, y]
            return "no blue edge between the hub's neighbour sets"
        last = "hub has no usable neighbour pair"
        tried = 0
        for x in bits(rows[hub] & m1):
            for y in bits(rows[hub] & m2):
                if tried >= 8:
                    return last
                tried += 1
                try:
                    p = bipartite_path_builder(g, coloring, Color.BLUE, m1, m2, x, y, l - 2, eps, [hub])
                    return [hub] + p
                except PathBuildError as exc:
                    last = f"{exc.code}: {exc}"
                    if exc.code in ("length_cap", "parity"):
                        return last
        return last

    def odd_seed(l: int):
        s, w, v1, v2, v3 = seed.s, seed.w, seed.v1, seed.v2, seed.v3
        if l == 3:
            return [s, w, v1]
        if l == 5:
            return [s, w, v1, v2, v3]
        a = m1 & ~(1 << v1) & ~(1 << s)
        b = m2 & ~(1 << w) & ~(1 << s)
        try:
            p = bipartite_path_builder(g, coloring, Color.BLUE, a, b, v2, v3, l - 4, eps, [s, w, v1])
        except PathBuildError as exc:
            return f"{exc.code}: {exc}"
        return [v3, s, w, v1] + p[:-1]

    def build(l: int):
        if l % 2 == 0:
            return even(l)
        return odd_hub(l) if hub is not None else odd_seed(l)

    result = SpectrumResult(Color.BLUE)
    for l, out in _run_lengths(range(3, top + 1), build, workers):
        if isinstance(out, str):
            result.gaps[l] = out
        elif not _emit(result, blue, l, out):
            result.gaps[l] = "candidate failed verification"
    return result


# -- red pancyclicity --------------------------------------------------------


def rotation_extend(g_red: Graph, cycle: CycleWitness, w: int, V_i) -> CycleWitness:
    """Insert ``w`` into ``cycle`` by one rotation step.

    For cycle v_1 ... v_l, pick neighbours v_i, v_j of w (i < j) whose
    predecessors lie in V_i and are adjacent; the result is
    v_1 ... v_{i-1} v_{j-1} ... v_i w v_j ... v_l.  The reversed orientation
    (successors adjacent) is tried second.  Raises ExtensionFailure.
    """
    seq = list(cycle.vertices)
    if w in seq:
        raise InputError(f"vertex {w} already lies on the cycle")
    vi = to_mask(V_i, g_red.n)
    for orient in (seq, seq[::-1]):
        # the second shift moves v_1 to position 2 so it can serve as v_i too
        for shifted in (orient, orient[-1:] + orient[:-1]):
            out = _rotate_once(g_red.rows, shifted, w, vi)
            if out is not None:
                assert len(out) == len(seq) + 1 and set(out) == set(seq) | {w}
                assert verify_cycle(g_red, out)
                return CycleWitness(out)
    raise ExtensionFailure(f"vertex {w} has no pair of good neighbours with adjacent predecessors")


def _rotate_once(rows, seq, w, vi):
    pos = [k for k, x in enumerate(seq) if (rows[w] >> x) & 1 and k > 0 and (vi >> seq[k - 1]) & 1]
    for ii, i in enumerate(pos):
        for j in pos[ii + 1:]:
            if (rows[seq[i - 1]] >> seq[j - 1]) & 1:
                return seq[:i] + seq[i:j][::-1] + [w] + seq[j:]
    return None


def balanced_split(red: Graph, pool: list[int], requirements: list[tuple[int, int]],
                   min_share: float, seed: int = 0) -> tuple[list[int], list[int]]:
    """Split ``pool`` into halves meeting red-neighbour quotas.

    ``requirements`` lists (vertex, side) pairs: ``vertex`` needs at least
    ``min_share`` red neighbours in half ``side`` (0 or 1).  Random balanced
    splits are tried first, then a deterministic alternation.
    """
    rows = red.rows

    def ok(halves):
        masks = [to_mask(h, red.n) for h in halves]
        return all((rows[v] & masks[s]).bit_count() >= min_share for v, s in requirements)

    rng = np.random.Generator(np.random.PCG64(seed))
    half = len(pool) // 2
    for _ in range(SPLIT_ATTEMPTS):
        perm = [pool[i] for i in rng.permutation(len(pool))]
        halves = (sorted(perm[:half]), sorted(perm[half:]))
        if ok(halves):
            return halves
    halves: tuple[list[int], list[int]] = ([], [])
    placed: set[int] = set()
    for v, s in requirements:
        for x in bits(rows[v]):
            if x in pool and x not in placed and len(halves[s]) <= len(halves[1 - s]):
                halves[s].append(x)
                placed.add(x)
    for x in pool:
        if x not in placed:
            (halves[0] if len(halves[0]) <= len(halves[1]) else halves[1]).append(x)
    halves = (sorted(halves[0]), sorted(halves[1]))
    if not ok(halves):
        raise PathBuildError("precondition", "no split meets the red-neighbour quotas")
    return halves


def _extend_to(red: Graph, cycle: list[int], target: int, pool_mask: int, vi: int,
               on_length: Callable[[int, list[int]], None]) -> str | None:
    """Rotate outside vertices of ``pool_mask`` in until the cycle has ``target`` vertices."""
    cur = CycleWitness(cycle)
    while len(cur) < target:
        outside = pool_mask & ~to_mask(cur.vertices, red.n)
        for w in bits(outside):
            try:
                cur = rotation_extend(red, cur, w, list(bits(vi)))
                break
            except ExtensionFailure:
                continue
        else:
            return f"no outside vertex extends the {len(cur)}-cycle"
        on_length(len(cur), list(cur.vertices))
    return None


def build_red_pancyclic(g: Graph, coloring: EdgeColoring, W_i, V_i, external: int | None = None,
                        thr: SideThresholds | None = None, eps: float = DEFAULT_EPS,
                        seed: int = 0, workers: int = 1) -> SpectrumResult:
    """Red cycles of every length 3..|W_i| inside W_i (and |W_i|+1 via ``external``).

    Short and medium lengths: choose w in V_i with most red neighbours in
    V_i, split the rest of V_i into two halves each holding enough red
    neighbours of w, and close a path between two neighbours of w inside
    the pair of halves.  Longer lengths: rotate the remaining vertices of
    W_i into the longest cycle one at a time.  Failures show up as gaps.
    """
    thr = _default_thresholds(g, thr)
    red = coloring.red
    rows = red.rows
    wmask = to_mask(W_i, g.n)
    vi_mask = to_mask(V_i, g.n) & wmask
    top = wmask.bit_count()
    result = SpectrumResult(Color.RED)
    if top < 3:
        return result
    core = list(bits(vi_mask))
    if len(core) < 3:
        for l in range(3, top + 1):
            result.gaps[l] = "fewer than three vertices of V_i lie in W_i"
        return result
    w = max(core, key=lambda x: ((rows[x] & vi_mask).bit_count(), -x))
    pool = [x for x in core if x != w]
    try:
        h1, h2 = balanced_split(red, pool, [(w, 0), (w, 1)], thr.split_share, seed)
    except PathBuildError as exc:
        for l in range(3, top + 1):
            result.gaps[l] = f"split: {exc}"
        return result
    A, B = to_mask(h1, g.n), to_mask(h2, g.n)
    d = float(pair_density(red, h1, h2)) if h1 and h2 else 0.0
    cap = path_length_cap(d, len(h1), len(h2), eps)

    def build(l: int):
        k = l - 2
        if k > cap:
            return f"length_cap: path length {k} exceeds cap {cap:.2f}"
        ends_a = list(bits(rows[w] & A))
        ends_b = list(bits(rows[w] & B)) if k % 2 else ends_a
        last = "no endpoint pair"
        tried = 0
        for x in ends_a:
            for y in ends_b:
                if x == y:
                    continue
                if tried >= 8:
                    return last
                tried += 1
                try:
                    p = bipartite_path_builder(g, coloring, Color.RED, A, B, x, y, k, eps)
                    return [w] + p
                except PathBuildError as exc:
                    last = f"{exc.code}: {exc}"
                    if exc.code in ("length_cap", "parity"):
                        return last
        return last

    for l, out in _run_lengths(range(3, top + 1), build, workers):
        if isinstance(out, str):
            result.gaps[l] = out
        elif not _emit(result, red, l, out, wmask):
            result.gaps[l] = "candidate failed verification"

    def record(length: int, seq: list[int]):
        if length not in result.witnesses and _emit(result, red, length, seq, wmask | ext_bit):
            result.gaps.pop(length, None)

    ext_bit = 0
    if result.witnesses:
        longest = max(result.witnesses)
        if longest < top:
            why = _extend_to(red, list(result.witnesses[longest].vertices), top, wmask, vi_mask, record)
            if why:
                for l in range(longest + 1, top + 1):
                    if l not in result.witnesses:
                        result.gaps[l] = why
    if external is not None:
        _external_cycle(g, coloring, external, wmask, vi_mask, thr, eps, seed, result)
    return result


def _external_cycle(g, coloring, x, wmask, vi_mask, thr, eps, seed, result) -> None:
    red = coloring.red
    rows = red.rows
    target = wmask.bit_count() + 1
    if (wmask >> x) & 1:
        raise InputError("the external vertex must lie outside W_i")
    nbrs = list(bits(rows[x] & vi_mask))
    if len(nbrs) < 2:
        result.gaps[target] = "external vertex has fewer than two red neighbours in V_i"
        return
    a, b = nbrs[0], nbrs[1]
    pool = [v for v in bits(vi_mask) if v not in (a, b)]
    try:
        h1, h2 = balanced_split(red, pool, [(a, 1), (b, 0)], thr.split_share, seed)
    except PathBuildError as exc:
        result.gaps[target] = f"split: {exc}"
        return
    A, B = to_mask(h1 + [a], g.n), to_mask(h2 + [b], g.n)
    d = float(pair_density(red, h1 + [a], h2 + [b]))
    k = int(path_length_cap(d, len(h1) + 1, len(h2) + 1, eps))
    k -= 1 - k % 2  # odd, since a and b sit on opposite sides
    path = None
    while k >= 1 and path is None:
        try:
            path = bipartite_path_builder(g, coloring, Color.RED, A, B, a, b, k, eps)
        except PathBuildError:
            k -= 2
    if path is None:
        result.gaps[target] = "no red path between the external vertex's neighbours"
        return
    done: list[list[int]] = [[x] + path]
    why = _extend_to(red, [x] + path, target, wmask, vi_mask, lambda L, s: done.append(s) if L == target else None)
    if why:
        result.gaps[target] = why
    elif not _emit(result, red, target, done[-1], wmask | (1 << x)):
        result.gaps[target] = "candidate failed verification"
