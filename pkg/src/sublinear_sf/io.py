"""Plain-text instance and graph files.

Instance file::

    metric <n> <k> <matrix|line|euclid <dim>>
    <n matrix rows, or n coordinate lines>
    <k lines "s t">

Graph file::

    graph <n> <m>
    <m lines "u v">

Blank lines and ``#`` comments are ignored. Errors carry 1-based line numbers.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import EdgeSetOracle, InputError, MetricInstance, from_line, from_matrix, from_points


class ParseError(InputError):
    def __init__(self, msg, line=None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield no, body.split()


def _int(tok, no, what):
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {tok!r}", no) from None
    if v < 0:
        raise ParseError(f"{what} must be nonnegative, got {v}", no)
    return v


def _floats(toks, no, want, what):
    if len(toks) != want:
        raise ParseError(f"{what} has {len(toks)} values, expected {want}", no)
    try:
        return [float(t) for t in toks]
    except ValueError:
        raise ParseError(f"{what} holds a non-numeric value", no) from None


def _next(it, what, last):
    try:
        return next(it)
    except StopIteration:
        raise ParseError(f"file ended before {what}", last) from None


def _read_pairs(it, k, n, last):
    pairs = []
    for j in range(k):
        no, toks = _next(it, f"pair {j}", last)
        if len(toks) != 2:
            raise ParseError(f"pair {j} needs two vertex ids", no)
        s, t = (_int(x, no, "vertex id") for x in toks)
        if s >= n or t >= n:
            raise ParseError(f"pair {j} names a vertex outside 0..{n - 1}", no)
        pairs.append((s, t))
    return pairs


def parse_instance(text: str) -> MetricInstance:
    lines = list(_lines(text))
    it = iter(lines)
    last = lines[-1][0] if lines else 1
    no, head = _next(it, "header", last)
    if head[0] != "metric" or len(head) < 4:
        raise ParseError("header must read 'metric <n> <k> <format>'", no)
    n, k = _int(head[1], no, "n"), _int(head[2], no, "k")
    fmt = head[3]
    if fmt == "matrix":
        if len(head) != 4:
            raise ParseError("unexpected tokens after 'matrix'", no)
        rows = []
        for r in range(n):
            rno, toks = _next(it, f"matrix row {r}", last)
            rows.append(_floats(toks, rno, n, f"matrix row {r}"))
        pairs = _read_pairs(it, k, n, last)
        build = lambda: from_matrix(np.array(rows, dtype=float).reshape(n, n), pairs)
    elif fmt in ("line", "euclid"):
        if fmt == "euclid":
            if len(head) != 5:
                raise ParseError("euclid format needs a dimension", no)
            dim = _int(head[4], no, "dim")
            if dim < 1:
                raise ParseError("dim must be >= 1", no)
        else:
            if len(head) != 4:
                raise ParseError("unexpected tokens after 'line'", no)
            dim = 1
        pts = []
        for r in range(n):
            rno, toks = _next(it, f"coordinate row {r}", last)
            pts.append(_floats(toks, rno, dim, f"coordinate row {r}"))
        pairs = _read_pairs(it, k, n, last)
        arr = np.array(pts, dtype=float).reshape(n, dim)
        build = (lambda: from_line(arr[:, 0], pairs)) if fmt == "line" else (lambda: from_points(arr, pairs))
    else:
        raise ParseError(f"unknown format {fmt!r}; expected matrix, line or euclid", no)
    extra = next(it, None)
    if extra is not None:
        raise ParseError("unexpected content after the pair list", extra[0])
    try:
        return build()
    except InputError as exc:
        raise ParseError(str(exc)) from None


def _num(x: float) -> str:
    return repr(float(x))


def format_instance(instance: MetricInstance) -> str:
    """Text form of the instance as loaded (duplicated terminals included)."""
    n, k = instance.n, instance.k
    out = []
    if instance.kind == "line":
        out.append(f"metric {n} {k} line")
        out += [_num(x) for x in instance.coords[:, 0]]
    elif instance.kind == "euclid":
        dim = instance.coords.shape[1]
        out.append(f"metric {n} {k} euclid {dim}")
        out += [" ".join(_num(x) for x in row) for row in instance.coords]
    else:
        out.append(f"metric {n} {k} matrix")
        out += [" ".join(_num(x) for x in row) for row in instance.dist]
    out += [f"{s} {t}" for s, t in instance.pairs]
    return "\n".join(out) + "\n"


def read_instance(path) -> MetricInstance:
    return parse_instance(Path(path).read_text())


def write_instance(instance: MetricInstance, path) -> None:
    Path(path).write_text(format_instance(instance))


def parse_graph(text: str) -> EdgeSetOracle:
    lines = list(_lines(text))
    it = iter(lines)
    last = lines[-1][0] if lines else 1
    no, head = _next(it, "header", last)
    if head[0] != "graph" or len(head) != 3:
        raise ParseError("header must read 'graph <n> <m>'", no)
    n, m = _int(head[1], no, "n"), _int(head[2], no, "m")
    edges = []
    for j in range(m):
        eno, toks = _next(it, f"edge {j}", last)
        if len(toks) != 2:
            raise ParseError(f"edge {j} needs two vertex ids", eno)
        u, v = (_int(x, eno, "vertex id") for x in toks)
        if u >= n or v >= n:
            raise ParseError(f"edge {j} names a vertex outside 0..{n - 1}", eno)
        if u == v:
            raise ParseError(f"edge {j} is a self-loop", eno)
        edges.append((u, v))
    extra = next(it, None)
    if extra is not None:
        raise ParseError("unexpected content after the edge list", extra[0])
    return EdgeSetOracle(n, edges=edges)


def format_graph(graph: EdgeSetOracle) -> str:
    edges = graph.edges()
    return "\n".join([f"graph {graph.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]) + "\n"


def read_graph(path) -> EdgeSetOracle:
    return parse_graph(Path(path).read_text())


def write_graph(graph: EdgeSetOracle, path) -> None:
    Path(path).write_text(format_graph(graph))


def read_any(path):
    """Instance or graph, chosen by the header keyword."""
    text = Path(path).read_text()
    for _, toks in _lines(text):
        return parse_graph(text) if toks[0] == "graph" else parse_instance(text)
    raise ParseError("empty file")
