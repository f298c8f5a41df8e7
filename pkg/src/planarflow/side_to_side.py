"""Maximum flow from one piece of a cycle separator to the other.

All sources lie in one piece and all sinks in the other.  Terminals sitting
on the separator are first moved off it onto pendant vertices.  The flow is
assembled from a maximum flow from the sources to the separator inside the
sources' piece and a maximum flow from the separator to the sinks inside the
sinks' piece.  Their sum is a pseudoflow whose only unbalanced non-terminals
are separator vertices; these are then balanced one at a time, in cycle
order, so that after each step no residual path leads from the sources to
the sinks or to an unprocessed separator vertex, nor from an unprocessed
separator vertex to the sinks.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import flows
from .engines import ArcNetwork, EngineLog, _apex_solve, bounded_flow
from .flows import Pseudoflow, cancel_cycles, return_excess, total_capacity
from .planar import Embedding, PlanarGraph
from .separator import Separator


class InvariantError(AssertionError):
    """A balancing step broke the no-residual-path invariant (a bug)."""


@dataclass(frozen=True)
class SideToSideInstance:
    graph: PlanarGraph
    capacity: np.ndarray  # per dart
    sources: tuple[int, ...]
    sinks: tuple[int, ...]
    cycle: tuple[int, ...]
    source_piece: np.ndarray  # per edge: True if the edge lies in the sources' piece
    source_side: frozenset[int]  # sources' piece vertices, cycle included
    sink_side: frozenset[int]
    witness: tuple[int | None, ...]  # dart p_j -> p_{j+1}, or None
    source_faces: frozenset[int] = frozenset()
    base_edges: int = -1

    @classmethod
    def from_separator(cls, g: PlanarGraph, capacity, sources, sinks, sep: Separator,
                       sources_inside: bool) -> "SideToSideInstance":
        inside_piece = sep.edge_in_inside_piece(g)
        if sources_inside:
            piece, src_side, snk_side = inside_piece, sep.inside, sep.outside
            faces = sep.inside_faces
        else:
            piece, src_side, snk_side = ~inside_piece, sep.outside, sep.inside
            faces = frozenset(range(g.num_faces)) - sep.inside_faces
        witness = tuple(sep.witness_darts[:-1])
        return cls(g, np.asarray(capacity, dtype=np.int64), tuple(sources), tuple(sinks),
                   tuple(sep.cycle), piece, frozenset(src_side), frozenset(snk_side),
                   witness, frozenset(faces), g.num_edges)

    @classmethod
    def from_cycle(cls, g: PlanarGraph, capacity, sources, sinks, cycle: Sequence[int],
                   source_side: Sequence[int]) -> "SideToSideInstance":
        """Build from an explicit cycle and the vertex set of the sources' piece."""
        P = set(cycle)
        src = frozenset(source_side) | P
        snk = frozenset(set(range(g.n)) - src) | P
        t = g.tail
        strict_snk = snk - P
        piece = np.array([not (t[2 * e] in strict_snk or t[2 * e + 1] in strict_snk)
                          for e in range(g.num_edges)], dtype=bool)
        witness = []
        for j in range(len(cycle) - 1):
            d = next((d for d in g.rotation[cycle[j]] if t[d ^ 1] == cycle[j + 1]), None)
            witness.append(d)
        faces = frozenset(f for f in range(g.num_faces)
                          if all(t[d] in src for d in g.faces[f]))
        return cls(g, np.asarray(capacity, dtype=np.int64), tuple(sources), tuple(sinks),
                   tuple(cycle), piece, src, snk, tuple(witness), faces, g.num_edges)

    def check(self) -> list[str]:
        """Separator precondition: sources in one piece, sinks in the other."""
        problems = []
        bad_s = [s for s in self.sources if s not in self.source_side]
        bad_t = [t for t in self.sinks if t not in self.sink_side]
        if bad_s:
            problems.append(f"sources outside their piece: {bad_s}")
        if bad_t:
            problems.append(f"sinks outside their piece: {bad_t}")
        P = set(self.cycle)
        strict_src = self.source_side - P
        strict_snk = self.sink_side - P
        t = self.graph.tail
        for e in range(self.graph.num_edges):
            u, v = t[2 * e], t[2 * e + 1]
            if (u in strict_src and v in strict_snk) or (u in strict_snk and v in strict_src):
                problems.append(f"edge {e} crosses the separator")
                break
        return problems


@dataclass
class StepRecord:
    index: int
    vertex: int
    initial_excess: int
    bounded_value: int = 0
    returned: int = 0
    invariant_ok: bool | None = None


@dataclass
class BalanceTrace:
    """What happened at every separator vertex; snapshots allow an independent replay."""

    graph: PlanarGraph
    capacity: np.ndarray
    sources: tuple[int, ...]
    sinks: tuple[int, ...]
    cycle: tuple[int, ...]
    initial: np.ndarray | None = None
    steps: list[StepRecord] = field(default_factory=list)
    snapshots: list[np.ndarray] = field(default_factory=list)
    log: EngineLog = field(default_factory=EngineLog)


def displace_terminals_off_P(inst: SideToSideInstance) -> SideToSideInstance:
    """Move every terminal on the cycle to a new pendant vertex on its own side.

    A source ``s`` on the cycle gets a neighbour ``s'`` placed in a face at
    ``s`` on the sources' side, joined by an arc s' -> s of capacity M (the
    total capacity); ``s'`` replaces ``s`` as a source.  Sinks are handled
    the same way on the other side with an arc t -> t'.
    """
    P = set(inst.cycle)
    on_P_src = [s for s in inst.sources if s in P]
    on_P_snk = [t for t in inst.sinks if t in P]
    if not on_P_src and not on_P_snk:
        return inst
    g = inst.graph
    M = total_capacity(inst.capacity)
    emb = Embedding(g)
    caps = inst.capacity.tolist()
    piece = inst.source_piece.tolist()
    sources = list(inst.sources)
    sinks = list(inst.sinks)
    src_side = set(inst.source_side)
    snk_side = set(inst.sink_side)

    def corner(v, want_source_face):
        darts = g.rotation[v]
        for d in darts:
            if (g.face_of[d] in inst.source_faces) == want_source_face:
                return d
        return darts[0] if darts else None

    for s in on_P_src:
        x = emb.add_vertex()
        emb.insert_edge(x, None, s, corner(s, True))  # dart x -> s
        caps.extend((M, 0))
        piece.append(True)
        sources[sources.index(s)] = x
        src_side.add(x)
    for t in on_P_snk:
        x = emb.add_vertex()
        emb.insert_edge(x, None, t, corner(t, False))  # dart x -> t, twin t -> x
        caps.extend((0, M))
        piece.append(False)
        sinks[sinks.index(t)] = x
        snk_side.add(x)
    g2 = emb.freeze(check=False)
    return replace(inst, graph=g2, capacity=np.asarray(caps, dtype=np.int64),
                   sources=tuple(sources), sinks=tuple(sinks),
                   source_piece=np.asarray(piece, dtype=bool),
                   source_side=frozenset(src_side), sink_side=frozenset(snk_side))


def _piece_flow(inst: SideToSideInstance, in_source_piece: bool) -> Pseudoflow:
    g = inst.graph
    cap = inst.capacity
    M = total_capacity(cap)
    net = ArcNetwork(g.n)
    t = g.tail
    arc_of = {}
    for e in np.nonzero(inst.source_piece == in_source_piece)[0].tolist():
        arc_of[e] = net.add_arc(t[2 * e], t[2 * e + 1], int(cap[2 * e]), int(cap[2 * e + 1]))
    apex = net.add_vertex()
    for p in inst.cycle:
        if in_source_piece:
            net.add_arc(p, apex, M)
        else:
            net.add_arc(apex, p, M)
    if in_source_piece:
        _apex_solve(net, list(inst.sources), [apex], M + 1)
    else:
        _apex_solve(net, [apex], list(inst.sinks), M + 1)
    vals = np.zeros(g.num_edges, dtype=np.int64)
    for e, a in arc_of.items():
        vals[e] = int(cap[2 * e]) - net.cap[a]
    return Pseudoflow(g, vals)


def compute_fX(inst: SideToSideInstance) -> Pseudoflow:
    """Maximum flow from the sources into the cycle, inside the sources' piece."""
    return _piece_flow(inst, True)


def compute_fY(inst: SideToSideInstance) -> Pseudoflow:
    """Maximum flow from the cycle to the sinks, inside the sinks' piece."""
    return _piece_flow(inst, False)


# -- invariant checks (debug mode) -------------------------------------------


def _reach(g: PlanarGraph, rc: list[int], start: Sequence[int]) -> list[bool]:
    seen = [False] * g.n
    q = deque()
    for v in start:
        if not seen[v]:
            seen[v] = True
            q.append(v)
    t = g.tail
    while q:
        v = q.popleft()
        for d in g.rotation[v]:
            if rc[d] > 0:
                w = t[d ^ 1]
                if not seen[w]:
                    seen[w] = True
                    q.append(w)
    return seen


def invariant_violations(g: PlanarGraph, cap, f: Pseudoflow, sources, sinks, pending) -> list[str]:
    rc = (np.asarray(cap, dtype=np.int64) - f.darts()).tolist()
    out = []
    from_s = _reach(g, rc, sources)
    if any(from_s[t] for t in sinks):
        out.append("residual path S -> T")
    if any(from_s[p] for p in pending):
        out.append("residual path S -> P'")
    if pending:
        from_p = _reach(g, rc, pending)
        if any(from_p[t] for t in sinks):
            out.append("residual path P' -> T")
    return out


def balance(inst: SideToSideInstance, f: Pseudoflow, debug: bool = False,
            trace: BalanceTrace | None = None, log: EngineLog | None = None) -> Pseudoflow:
    """Drive the excess of every cycle vertex to zero, in cycle order."""
    g = inst.graph
    cap = inst.capacity
    P = list(inst.cycle)
    r = len(P)
    M = total_capacity(cap)
    sources, sinks = inst.sources, inst.sinks
    if log is None:
        log = trace.log if trace is not None else EngineLog()
    for i, p in enumerate(P):
        e = flows.excess(f, p)
        rec = StepRecord(i, p, e)
        if e != 0 and i < r - 1:
            # chain arcs of capacity M toward p_{i+1} (or away from it)
            if e > 0:
                chain = [(P[j + 1], P[j], inst.witness[j]) for j in range(i + 1, r - 1)]
                v, target = p, P[i + 1]
            else:
                chain = [(P[j], P[j + 1], inst.witness[j]) for j in range(i + 1, r - 1)]
                v, target = P[i + 1], p
            rc = cap - f.darts()
            fi = bounded_flow(g, rc, v, target, abs(e), chain=chain, chain_cap=M,
                              face_dart=inst.witness[i], log=log)
            f = f + Pseudoflow.from_darts(g, fi)
            e2 = flows.excess(f, p)
            rec.bounded_value = abs(e) - abs(e2)
            if debug and e2 > 0:
                rc = (cap - f.darts()).tolist()
                seen = _reach(g, rc, [p])
                if any(seen[q] for q in P[i + 1:]):
                    raise InvariantError(f"residual path from p_{i + 1} to an unprocessed vertex")
            e = e2
        if e > 0:
            f = return_excess(cancel_cycles(f), p, e)
            rec.returned = e
        elif e < 0:
            f = -return_excess(-cancel_cycles(f), p, -e)
            rec.returned = e
        if debug:
            bad = invariant_violations(g, cap, f, sources, sinks, P[i + 1:])
            rec.invariant_ok = not bad
            if bad:
                raise InvariantError(f"after p_{i + 1}: " + "; ".join(bad))
        if trace is not None:
            trace.steps.append(rec)
            trace.snapshots.append(f.values.copy())
    return f


@dataclass
class SideToSideResult:
    flow: Pseudoflow  # on the original (undisplaced) graph
    value: int
    trace: BalanceTrace | None = None
    log: EngineLog = field(default_factory=EngineLog)


def side_to_side(inst: SideToSideInstance, debug: bool = False, keep_trace: bool = False) -> SideToSideResult:
    """Maximum flow from ``inst.sources`` to ``inst.sinks`` across the cycle."""
    problems = inst.check()
    if problems:
        raise ValueError("; ".join(problems))
    base_edges = inst.graph.num_edges if inst.base_edges < 0 else inst.base_edges
    disp = displace_terminals_off_P(inst)
    f = compute_fX(disp) + compute_fY(disp)
    trace = None
    if keep_trace:
        trace = BalanceTrace(disp.graph, disp.capacity, disp.sources, disp.sinks,
                             disp.cycle, initial=f.values.copy())
    log = trace.log if trace is not None else EngineLog()
    if debug:
        bad = invariant_violations(disp.graph, disp.capacity, f, disp.sources, disp.sinks, disp.cycle)
        if bad:
            raise InvariantError("initial pseudoflow: " + "; ".join(bad))
    f = balance(disp, f, debug=debug, trace=trace, log=log)
    if debug:
        exc = flows.excesses(f)
        terminals = set(disp.sources) | set(disp.sinks)
        loose = [v for v in range(disp.graph.n) if exc[v] and v not in terminals]
        if loose:
            raise InvariantError(f"unbalanced vertices remain: {loose[:5]}")
    value = int(sum(int(flows.excesses(f)[t]) for t in disp.sinks))
    out = Pseudoflow(inst.graph, f.values[:base_edges].copy())
    return SideToSideResult(out, value, trace, log)
