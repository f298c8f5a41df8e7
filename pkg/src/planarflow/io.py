"""Text formats for instances, flows and separators.

Instance files hold one record per line; ``#`` starts a comment::

    p planar <n> <m> <|S|> <|T|>
    v <id> <x> <y>            # optional coordinates
    r <v> <e1> <e2> ...       # incident edge ids in cyclic embedding order
    e <u> <v> <c_uv> <c_vu>   # edges are numbered 0, 1, ... in file order
    s <v>
    t <v>

Flow files start with ``value <X>`` followed by ``f <edge> <value>`` lines,
where the value is the flow on the edge in its ``u -> v`` direction.
"""

from __future__ import annotations

import io as _io
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

import numpy as np

from .engines import FlowNetwork, FlowProblem
from .flows import Pseudoflow
from .planar import EmbeddingError, PlanarGraph, build_from_rotation

MAX_TOTAL_CAPACITY = 2 ** 40


class FormatError(ValueError):
    """Malformed input; ``line`` is 1-based, or None for whole-file problems."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class Instance:
    graph: PlanarGraph
    capacity: np.ndarray  # per dart
    sources: tuple[int, ...]
    sinks: tuple[int, ...]
    coords: np.ndarray | None = None  # (n, 2)

    def __post_init__(self):
        self.capacity = np.asarray(self.capacity, dtype=np.int64)
        self.sources = tuple(int(s) for s in self.sources)
        self.sinks = tuple(int(t) for t in self.sinks)
        if self.coords is not None:
            self.coords = np.asarray(self.coords, dtype=float)

    @property
    def network(self) -> FlowNetwork:
        return FlowNetwork(self.graph, self.capacity, self.sources, self.sinks)

    @property
    def problem(self) -> FlowProblem:
        return FlowProblem(self.network)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        g, h = self.graph, other.graph
        same_coords = (self.coords is None and other.coords is None) or (
            self.coords is not None and other.coords is not None
            and np.array_equal(self.coords, other.coords))
        return (g.n == h.n and list(g.tail) == list(h.tail)
                and [list(r) for r in g.rotation] == [list(r) for r in h.rotation]
                and np.array_equal(self.capacity, other.capacity)
                and self.sources == other.sources and self.sinks == other.sinks
                and same_coords)


def _fmt_coord(x: float) -> str:
    return repr(float(x))


def write_instance(inst: Instance, out: TextIO | str | Path) -> None:
    if isinstance(out, (str, Path)):
        with open(out, "w") as fh:
            write_instance(inst, fh)
        return
    g = inst.graph
    cap = inst.capacity
    out.write(f"p planar {g.n} {g.num_edges} {len(inst.sources)} {len(inst.sinks)}\n")
    if inst.coords is not None:
        for v, (x, y) in enumerate(inst.coords):
            out.write(f"v {v} {_fmt_coord(x)} {_fmt_coord(y)}\n")
    for v, rot in enumerate(g.rotation):
        out.write(" ".join(["r", str(v)] + [str(d // 2) for d in rot]) + "\n")
    t = g.tail
    for e in range(g.num_edges):
        out.write(f"e {t[2 * e]} {t[2 * e + 1]} {cap[2 * e]} {cap[2 * e + 1]}\n")
    for s in inst.sources:
        out.write(f"s {s}\n")
    for v in inst.sinks:
        out.write(f"t {v}\n")


def dumps_instance(inst: Instance) -> str:
    buf = _io.StringIO()
    write_instance(inst, buf)
    return buf.getvalue()


def _records(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _ints(fields, lineno, count=None):
    if count is not None and len(fields) != count:
        raise FormatError(f"expected {count} fields, got {len(fields)}", lineno)
    try:
        return [int(x) for x in fields]
    except ValueError:
        raise FormatError(f"expected integers: {' '.join(fields)}", lineno) from None


def parse_instance(text: str) -> Instance:
    header = None
    coords = {}
    rot_lines: dict[int, tuple[int, list[int]]] = {}
    edges: list[tuple[int, int]] = []
    caps: list[int] = []
    edge_line: list[int] = []
    sources: list[int] = []
    sinks: list[int] = []
    for lineno, f in _records(text):
        kind, rest = f[0], f[1:]
        if kind == "p":
            if header is not None:
                raise FormatError("duplicate header", lineno)
            if len(rest) != 5 or rest[0] != "planar":
                raise FormatError("header must be 'p planar n m |S| |T|'", lineno)
            header = _ints(rest[1:], lineno)
            if min(header) < 0:
                raise FormatError("negative count in header", lineno)
            continue
        if header is None:
            raise FormatError("record before header", lineno)
        n = header[0]
        if kind == "v":
            if len(rest) not in (1, 3):
                raise FormatError("vertex line must be 'v id [x y]'", lineno)
            (v,) = _ints(rest[:1], lineno)
            if not 0 <= v < n:
                raise FormatError(f"vertex {v} out of range", lineno)
            if len(rest) == 3:
                try:
                    coords[v] = (float(rest[1]), float(rest[2]))
                except ValueError:
                    raise FormatError("bad coordinates", lineno) from None
        elif kind == "r":
            vals = _ints(rest, lineno)
            if not vals:
                raise FormatError("rotation line needs a vertex", lineno)
            v = vals[0]
            if not 0 <= v < n:
                raise FormatError(f"vertex {v} out of range", lineno)
            if v in rot_lines:
                raise FormatError(f"duplicate rotation for vertex {v}", lineno)
            rot_lines[v] = (lineno, vals[1:])
        elif kind == "e":
            u, v, cuv, cvu = _ints(rest, lineno, 4)
            if not (0 <= u < n and 0 <= v < n):
                raise FormatError("edge endpoint out of range", lineno)
            if u == v:
                raise FormatError(f"self-loop at vertex {u}", lineno)
            if cuv < 0 or cvu < 0:
                raise FormatError("capacities must be nonnegative", lineno)
            edges.append((u, v))
            caps.extend((cuv, cvu))
            edge_line.append(lineno)
        elif kind in ("s", "t"):
            (v,) = _ints(rest, lineno, 1)
            if not 0 <= v < n:
                raise FormatError(f"terminal {v} out of range", lineno)
            (sources if kind == "s" else sinks).append(v)
        else:
            raise FormatError(f"unknown record type '{kind}'", lineno)
    if header is None:
        raise FormatError("missing header")
    n, m, ns, nt = header
    if len(edges) != m:
        raise FormatError(f"header says {m} edges, found {len(edges)}")
    if len(sources) != ns or len(sinks) != nt:
        raise FormatError("terminal counts disagree with header")
    if len(set(sources)) != ns or len(set(sinks)) != nt:
        raise FormatError("duplicate terminal")
    if set(sources) & set(sinks):
        raise FormatError("a vertex is both source and sink")
    seen = {}
    for k, (u, v) in enumerate(edges):
        key = (min(u, v), max(u, v))
        if key in seen:
            raise FormatError(f"parallel edge {u}-{v}", edge_line[k])
        seen[key] = k
    if sum(caps) > MAX_TOTAL_CAPACITY:
        raise FormatError("total capacity exceeds 2^40")
    rotation = []
    for v in range(n):
        if v not in rot_lines:
            rotation.append([])
        else:
            rotation.append(rot_lines[v][1])
    try:
        g = build_from_rotation(rotation, edges)
    except EmbeddingError as exc:
        raise FormatError(f"bad embedding: {exc}") from None
    xy = None
    if coords:
        if len(coords) != n:
            raise FormatError("coordinates given for only some vertices")
        xy = np.array([coords[v] for v in range(n)])
    return Instance(g, np.asarray(caps, dtype=np.int64), tuple(sources), tuple(sinks), xy)


def read_instance(path: str | Path) -> Instance:
    return parse_instance(Path(path).read_text())


def write_flow(f: Pseudoflow, value: int, out: TextIO | str | Path) -> None:
    if isinstance(out, (str, Path)):
        with open(out, "w") as fh:
            write_flow(f, value, fh)
        return
    out.write(f"value {int(value)}\n")
    for e, x in enumerate(f.values.tolist()):
        out.write(f"f {e} {x}\n")


def parse_flow(text: str, graph: PlanarGraph) -> tuple[Pseudoflow, int | None]:
    vals = np.zeros(graph.num_edges, dtype=np.int64)
    value = None
    for lineno, f in _records(text):
        if f[0] == "value":
            (value,) = _ints(f[1:], lineno, 1)
        elif f[0] == "f":
            e, x = _ints(f[1:], lineno, 2)
            if not 0 <= e < graph.num_edges:
                raise FormatError(f"edge {e} out of range", lineno)
            vals[e] = x
        else:
            raise FormatError(f"unknown record type '{f[0]}'", lineno)
    return Pseudoflow(graph, vals), value


def read_flow(path: str | Path, graph: PlanarGraph) -> tuple[Pseudoflow, int | None]:
    return parse_flow(Path(path).read_text(), graph)


def parse_cycle_file(text: str) -> tuple[list[int], list[int]]:
    """``cycle v1 v2 ...`` plus ``side v ...`` lines listing the sources' piece."""
    cycle, side = None, []
    for lineno, f in _records(text):
        vals = _ints(f[1:], lineno)
        if f[0] == "cycle":
            cycle = vals
        elif f[0] == "side":
            side.extend(vals)
        else:
            raise FormatError(f"unknown record type '{f[0]}'", lineno)
    if cycle is None:
        raise FormatError("missing cycle line")
    return cycle, side
