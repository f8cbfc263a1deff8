"""Text formats: graph6, edge lists, colouring files and partition files.

Edge list::

    <vertex_count> <edge_count>
    u v
    ...

Colouring file: a ``colors 2`` header, then one ``u v R|B`` line per edge
with u < v, sorted.  Partition file: one ``part i: v v ...`` line per part.
Lines starting with ``#`` are comments in the last three formats.
"""

from __future__ import annotations

from pathlib import Path

from .coloring import Color, EdgeColoring
from .errors import FormatError
from .graph import Graph
from .regularity import Partition

__all__ = [
    "to_graph6",
    "from_graph6",
    "to_edge_list",
    "from_edge_list",
    "to_coloring_text",
    "from_coloring_text",
    "to_partition_text",
    "from_partition_text",
    "load_graph",
    "save_graph",
    "load_coloring",
    "save_coloring",
    "load_partition",
]

G6_HEADER = ">>graph6<<"


def _encode_n(n: int) -> str:
    if n <= 62:
        return chr(n + 63)
    if n <= 258047:
        return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    return "~~" + "".join(chr(((n >> s) & 63) + 63) for s in (30, 24, 18, 12, 6, 0))


def to_graph6(g: Graph) -> str:
    """graph6 text without header or trailing newline."""
    n = g.n
    out = []
    acc, k = 0, 0
    for j in range(1, n):
        row = g.rows[j]
        for i in range(j):
            acc = (acc << 1) | ((row >> i) & 1)
            k += 1
            if k == 6:
                out.append(chr(acc + 63))
                acc, k = 0, 0
    if k:
        out.append(chr((acc << (6 - k)) + 63))
    return _encode_n(n) + "".join(out)


def from_graph6(text: str) -> Graph:
    s = text.strip()
    if s.startswith(G6_HEADER):
        s = s[len(G6_HEADER):]
    if not s:
        raise FormatError("empty graph6 string")
    if any(not 63 <= ord(c) <= 126 for c in s):
        raise FormatError("graph6 characters must lie in the range '?'..'~'")
    vals = [ord(c) - 63 for c in s]
    if vals[0] != 63:
        n, pos = vals[0], 1
    elif len(vals) >= 2 and vals[1] != 63:
        if len(vals) < 4:
            raise FormatError("truncated graph6 size field")
        n, pos = (vals[1] << 12) | (vals[2] << 6) | vals[3], 4
    else:
        if len(vals) < 8:
            raise FormatError("truncated graph6 size field")
        n = 0
        for v in vals[2:8]:
            n = (n << 6) | v
        pos = 8
    nbits = n * (n - 1) // 2
    need = (nbits + 5) // 6
    body = vals[pos:]
    if len(body) != need:
        raise FormatError(f"graph6 body has {len(body)} characters, expected {need} for {n} vertices")
    rows = [0] * n
    idx = 0
    for j in range(1, n):
        for i in range(j):
            if (body[idx // 6] >> (5 - idx % 6)) & 1:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            idx += 1
    if need and body[-1] & ((1 << (need * 6 - nbits)) - 1):
        raise FormatError("graph6 padding bits must be zero")
    return Graph(n, rows)


def _content_lines(text: str) -> list[tuple[int, str]]:
    return [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())
            if ln.strip() and not ln.strip().startswith("#")]


def to_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.edge_count}"] + [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def _ints(line: str, lineno: int, count: int) -> list[int]:
    parts = line.split()
    if len(parts) != count:
        raise FormatError(f"line {lineno}: expected {count} integers")
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise FormatError(f"line {lineno}: expected integers, got {line!r}") from None


def from_edge_list(text: str) -> Graph:
    lines = _content_lines(text)
    if not lines:
        raise FormatError("empty edge list")
    n, m = _ints(lines[0][1], lines[0][0], 2)
    if n < 0 or m < 0:
        raise FormatError("vertex and edge counts must be non-negative")
    edges = set()
    for lineno, line in lines[1:]:
        u, v = _ints(line, lineno, 2)
        if u == v:
            raise FormatError(f"line {lineno}: self-loop at {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise FormatError(f"line {lineno}: vertex out of range 0..{n - 1}")
        e = (min(u, v), max(u, v))
        if e in edges:
            raise FormatError(f"line {lineno}: duplicate edge {e}")
        edges.add(e)
    if len(edges) != m:
        raise FormatError(f"header promises {m} edges, found {len(edges)}")
    return Graph.from_edges(n, sorted(edges))


def to_coloring_text(coloring: EdgeColoring) -> str:
    lines = ["colors 2"] + [f"{u} {v} {c.value}" for (u, v), c in coloring.items()]
    return "\n".join(lines) + "\n"


def from_coloring_text(text: str, host: Graph) -> EdgeColoring:
    lines = _content_lines(text)
    if not lines or lines[0][1].split() != ["colors", "2"]:
        raise FormatError("colouring file must start with 'colors 2'")
    colors = {}
    for lineno, line in lines[1:]:
        parts = line.split()
        if len(parts) != 3 or parts[2] not in ("R", "B"):
            raise FormatError(f"line {lineno}: expected 'u v R|B'")
        u, v = _ints(" ".join(parts[:2]), lineno, 2)
        e = (min(u, v), max(u, v))
        if e in colors:
            raise FormatError(f"line {lineno}: edge {e} coloured twice")
        colors[e] = Color(parts[2])
    try:
        return EdgeColoring.from_map(host, colors)
    except FormatError:
        raise
    except Exception as exc:
        raise FormatError(str(exc)) from None


def to_partition_text(partition: Partition) -> str:
    return "".join(f"part {i}: {' '.join(map(str, sorted(p)))}\n" for i, p in enumerate(partition.parts))


def from_partition_text(text: str) -> Partition:
    parts = []
    for lineno, line in _content_lines(text):
        head, sep, body = line.partition(":")
        if not sep or head.split()[:1] != ["part"] or len(head.split()) != 2:
            raise FormatError(f"line {lineno}: expected 'part i: v v ...'")
        if head.split()[1] != str(len(parts)):
            raise FormatError(f"line {lineno}: parts must be numbered 0, 1, ... in order")
        try:
            parts.append([int(x) for x in body.split()])
        except ValueError:
            raise FormatError(f"line {lineno}: vertex ids must be integers") from None
    if not parts:
        raise FormatError("partition file has no parts")
    return Partition(parts)


def _fmt(path: Path, fmt: str | None) -> str:
    if fmt:
        return fmt
    return "graph6" if path.suffix in (".g6", ".graph6") else "edgelist"


def load_graph(path, fmt: str | None = None) -> Graph:
    path = Path(path)
    text = path.read_text()
    kind = _fmt(path, fmt)
    if kind == "graph6":
        return from_graph6(text)
    if kind == "edgelist":
        return from_edge_list(text)
    raise FormatError(f"unknown graph format {kind!r}")


def save_graph(g: Graph, path, fmt: str | None = None) -> None:
    path = Path(path)
    kind = _fmt(path, fmt)
    if kind == "graph6":
        path.write_text(to_graph6(g) + "\n")
    elif kind == "edgelist":
        path.write_text(to_edge_list(g))
    else:
        raise FormatError(f"unknown graph format {kind!r}")


def load_coloring(path, host: Graph) -> EdgeColoring:
    return from_coloring_text(Path(path).read_text(), host)


def save_coloring(coloring: EdgeColoring, path) -> None:
    Path(path).write_text(to_coloring_text(coloring))


def load_partition(path) -> Partition:
    return from_partition_text(Path(path).read_text())
