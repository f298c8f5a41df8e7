"""Divide-and-conquer maximum flow with many sources and sinks.

One level of the recursion:

1. Small cases go to the base solvers: one apex solve per terminal of the
   smaller side when that side is tiny, or one single-pair solve per
   (source, sink) pair when ``|S| * |T|`` is at most ``K_pair * sqrt(n)``.
2. Triangulate with zero-capacity edges and find a cycle separator P that
   balances the terminals.  Terminals strictly inside form ``L_s``/``L_t``
   together with the sinks on P; the rest form ``R_s``/``R_t``.
3. Maximum flow from ``L_s`` to ``R_t`` across P, then the cut C made of the
   saturated darts leaving the vertices residually reachable from ``L_s``.
4. In every component K of G minus C, a maximum flow from ``K_s`` to ``K_t``
   is built in three stages.  The first two cross P; the third is a
   recursive call on K with at most two thirds of the terminals.
5. With C restored, a final maximum flow from ``R_s`` to ``L_t`` across P.

Flows of all steps are summed edgewise; every step works in the residual
network of what came before.
"""

from __future__ import annotations

import math
import threading
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .engines import (ArcNetwork, EngineLog, FlowNetwork, FlowProblem, MaxFlowResult,
                      _apex_solve, flow_value)
from .flows import Pseudoflow, total_capacity
from .planar import PlanarGraph, subgraph_piece, triangulate
from .separator import Separator, separator_for_terminals
from .side_to_side import BalanceTrace, SideToSideInstance, side_to_side


class RecursionBoundError(AssertionError):
    """A recursive call did not shrink the terminal set enough (a bug)."""


class CutError(ValueError):
    """The flow handed to :func:`extract_cut` is not maximum."""


@dataclass
class SolverConfig:
    k_single: int = 2
    k_pair: float = 1.0
    debug: bool = False
    parallel: bool = False
    keep_traces: bool = False
    workers: int | None = None


@dataclass
class SolveTrace:
    """Statistics gathered during one :func:`solve`."""

    levels: list[dict] = field(default_factory=list)
    balance_traces: list[BalanceTrace] = field(default_factory=list)
    log: EngineLog = field(default_factory=EngineLog)
    precondition_fallbacks: int = 0
    max_depth: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def add_level(self, **rec) -> None:
        with self._lock:
            self.levels.append(rec)
            self.max_depth = max(self.max_depth, rec["depth"])


@dataclass(frozen=True)
class LRPartition:
    """Terminals split by a separator; sinks on P join L, sources on P join R."""

    separator: Separator
    L_s: tuple[int, ...]
    L_t: tuple[int, ...]
    R_s: tuple[int, ...]
    R_t: tuple[int, ...]

    @classmethod
    def from_separator(cls, sep: Separator, sources, sinks) -> "LRPartition":
        strict_in = sep.strict_inside
        L_s = tuple(s for s in sources if s in strict_in)
        L_t = tuple(t for t in sinks if t in sep.inside)
        R_s = tuple(s for s in sources if s not in strict_in)
        R_t = tuple(t for t in sinks if t not in sep.inside)
        return cls(sep, L_s, L_t, R_s, R_t)

    @property
    def L(self) -> frozenset[int]:
        return frozenset(self.L_s) | frozenset(self.L_t)

    @property
    def R(self) -> frozenset[int]:
        return frozenset(self.R_s) | frozenset(self.R_t)


@dataclass(frozen=True)
class CutSet:
    darts: tuple[int, ...]
    reachable: frozenset[int]

    def capacity(self, capacity) -> int:
        cap = np.asarray(capacity, dtype=np.int64)
        return int(cap[list(self.darts)].sum()) if self.darts else 0


# -- helpers ----------------------------------------------------------------


def _darts(vals: np.ndarray) -> np.ndarray:
    out = np.empty(2 * len(vals), dtype=np.int64)
    out[0::2] = vals
    out[1::2] = -vals
    return out


def _reach(g: PlanarGraph, rc: Sequence[int], start: Sequence[int]) -> list[bool]:
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


def _oracle_values(g: PlanarGraph, rc: np.ndarray, sources, sinks) -> np.ndarray:
    net = ArcNetwork.from_graph(g, rc)
    _apex_solve(net, list(sources), list(sinks), total_capacity(rc) + 1)
    moved = rc - np.asarray(net.cap[:g.num_darts], dtype=np.int64)
    return moved[0::2].copy()


def _pair_values(g: PlanarGraph, rc: np.ndarray, s: int, t: int) -> np.ndarray:
    return _oracle_values(g, rc, [s], [t])


# -- base cases -------------------------------------------------------------


def _staged_values(g, cap, sources, sinks) -> np.ndarray:
    """Iterate apex solves over the smaller terminal side."""
    f = np.zeros(g.num_edges, dtype=np.int64)
    rc = np.asarray(cap, dtype=np.int64).copy()
    if len(sinks) <= len(sources):
        parts = [(list(sources), [t]) for t in sinks]
    else:
        parts = [([s], list(sinks)) for s in sources]
    for S_, T_ in parts:
        x = _oracle_values(g, rc, S_, T_)
        f += x
        rc -= _darts(x)
    return f


def _pairwise_values(g, cap, sources, sinks, order=None) -> np.ndarray:
    f = np.zeros(g.num_edges, dtype=np.int64)
    rc = np.asarray(cap, dtype=np.int64).copy()
    pairs = order if order is not None else [(s, t) for s in sources for t in sinks]
    for s, t in pairs:
        x = _pair_values(g, rc, s, t)
        f += x
        rc -= _darts(x)
    return f


def _base_kind(n: int, ns: int, nt: int, config: SolverConfig) -> str | None:
    if min(ns, nt) <= config.k_single:
        return "single"
    if ns * nt <= config.k_pair * math.sqrt(n):
        return "pairs"
    return None


def _result(p: FlowProblem, vals: np.ndarray, **stats) -> MaxFlowResult:
    f = Pseudoflow(p.graph, vals)
    return MaxFlowResult(f, flow_value(f, p.sinks), stats=stats)


def base_case(p: FlowProblem, config: SolverConfig | None = None) -> MaxFlowResult | None:
    """Solve directly when the terminal counts are small, else return None."""
    config = config or SolverConfig()
    kind = _base_kind(p.graph.n, len(p.sources), len(p.sinks), config)
    if kind is None:
        return None
    rc = p.residual_capacity()
    if kind == "single":
        vals = _staged_values(p.graph, rc, p.sources, p.sinks)
    else:
        vals = _pairwise_values(p.graph, rc, p.sources, p.sinks)
    return _result(p, vals, base_case=kind)


def algorithm1_iterate(p: FlowProblem, order: Sequence[tuple[int, int]] | None = None) -> MaxFlowResult:
    """One single-pair maximum flow per (source, sink) pair, summed in turn."""
    vals = _pairwise_values(p.graph, p.residual_capacity(), p.sources, p.sinks, order)
    return _result(p, vals, pairs=len(p.sources) * len(p.sinks))


@dataclass
class StagedFlow:
    first: Pseudoflow
    second: Pseudoflow
    flow: Pseudoflow
    value: int


def lemma1_stage(p: FlowProblem, subset: Sequence[int], side: str = "sources") -> StagedFlow:
    """Maximum flow from a subset of the terminals, then from the rest in the residual network.

    ``side`` says whether ``subset`` is drawn from the sources or the sinks.
    """
    g = p.graph
    rc = p.residual_capacity()
    sub = [v for v in subset]
    if side == "sources":
        if not set(sub) <= set(p.sources):
            raise ValueError("subset must be drawn from the sources")
        rest = [s for s in p.sources if s not in set(sub)]
        a, b = (sub, p.sinks), (rest, p.sinks)
    elif side == "sinks":
        if not set(sub) <= set(p.sinks):
            raise ValueError("subset must be drawn from the sinks")
        rest = [t for t in p.sinks if t not in set(sub)]
        a, b = (p.sources, sub), (p.sources, rest)
    else:
        raise ValueError("side must be 'sources' or 'sinks'")
    x = _oracle_values(g, rc, *a)
    y = _oracle_values(g, rc - _darts(x), *b)
    f1, f2 = Pseudoflow(g, x), Pseudoflow(g, y)
    total = f1 + f2
    return StagedFlow(f1, f2, total, flow_value(total, p.sinks))


def extract_cut(network: FlowNetwork, f: Pseudoflow, sources: Sequence[int] | None = None) -> CutSet:
    """Saturated darts leaving the set residually reachable from ``sources``."""
    g = network.graph
    sources = network.sources if sources is None else tuple(sources)
    rc = (network.capacity - f.darts()).tolist()
    seen = _reach(g, rc, sources)
    if any(seen[t] for t in network.sinks):
        raise CutError("residual path from the sources to a sink")
    t = g.tail
    darts = tuple(d for d in range(g.num_darts) if seen[t[d]] and not seen[t[d ^ 1]])
    return CutSet(darts, frozenset(v for v in range(g.n) if seen[v]))


# -- recursion --------------------------------------------------------------


class _Run:
    def __init__(self, config: SolverConfig, trace: SolveTrace):
        self.config = config
        self.trace = trace

    def cross(self, tg, cap, sources, sinks, sep, sources_inside) -> np.ndarray:
        if not sources or not sinks:
            return np.zeros(tg.num_edges, dtype=np.int64)
        inst = SideToSideInstance.from_separator(tg, cap, sources, sinks, sep, sources_inside)
        if inst.check():
            with self.trace._lock:
                self.trace.precondition_fallbacks += 1
            return _oracle_values(tg, cap, sources, sinks)
        res = side_to_side(inst, debug=self.config.debug, keep_trace=self.config.keep_traces)
        with self.trace._lock:
            self.trace.log.hassin += res.log.hassin
            self.trace.log.fallback += res.log.fallback
            self.trace.log.events.extend(res.log.events)
            if res.trace is not None:
                self.trace.balance_traces.append(res.trace)
        return res.flow.values

    def solve(self, g: PlanarGraph, cap: np.ndarray, S, T, depth: int, parent_terms: int | None) -> np.ndarray:
        terms = len(S) + len(T)
        if parent_terms is not None and 3 * terms > 2 * parent_terms:
            raise RecursionBoundError(
                f"call at depth {depth} has {terms} terminals, parent had {parent_terms}")
        if not S or not T:
            self.trace.add_level(depth=depth, n=g.n, sources=len(S), sinks=len(T), parent=parent_terms, kind="empty")
            return np.zeros(g.num_edges, dtype=np.int64)
        kind = _base_kind(g.n, len(S), len(T), self.config)
        if kind == "single":
            self.trace.add_level(depth=depth, n=g.n, sources=len(S), sinks=len(T), parent=parent_terms, kind=kind)
            return _staged_values(g, cap, S, T)
        if kind == "pairs":
            self.trace.add_level(depth=depth, n=g.n, sources=len(S), sinks=len(T), parent=parent_terms, kind=kind)
            return _pairwise_values(g, cap, S, T)

        tg, new = triangulate(g)
        tcap = np.concatenate([cap, np.zeros(2 * len(new), dtype=np.int64)])
        sep = separator_for_terminals(tg, S, T)
        lr = LRPartition.from_separator(sep, S, T)
        P = set(sep.cycle)

        f = self.cross(tg, tcap, lr.L_s, lr.R_t, sep, True)
        rc = tcap - _darts(f)
        reach = _reach(tg, rc.tolist(), lr.L_s)
        if any(reach[t] for t in lr.R_t):
            raise AssertionError("flow from L_s to R_t is not maximum")

        comps = _components(tg, reach)
        terminals = set(S) | set(T)
        jobs = [K for K in comps if terminals.intersection(K)]
        for K in jobs:
            inZ = reach[K[0]]
            Ks = set(K)
            if inZ and Ks.intersection(lr.R_t) or not inZ and Ks.intersection(lr.L_s):
                raise AssertionError("component touches both L_s and R_t")
        self.trace.add_level(depth=depth, n=g.n, sources=len(S), sinks=len(T), parent=parent_terms, kind="split",
                             separator=sep.size, L=len(lr.L), R=len(lr.R),
                             components=len(jobs), component_sizes=[len(K) for K in jobs])

        def run(K):
            return self.component(tg, rc, K, reach[K[0]], lr, P, sep, depth, terms)

        if self.config.parallel and len(jobs) > 1:
            with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                deltas = list(pool.map(run, jobs))
        else:
            deltas = [run(K) for K in jobs]
        for delta in deltas:
            f += delta

        rc = tcap - _darts(f)
        f += self.cross(tg, rc, lr.R_s, lr.L_t, sep, False)
        return f[:g.num_edges]

    def component(self, tg, rc, K, inZ, lr: LRPartition, P, sep, depth, terms) -> np.ndarray:
        Ks = set(K)
        t = tg.tail
        inside = np.array([t[d] in Ks for d in range(tg.num_darts)], dtype=bool)
        emask = inside[0::2] & inside[1::2]
        dmask = np.repeat(emask, 2)
        cap = np.where(dmask, rc, 0)
        delta = np.zeros(tg.num_edges, dtype=np.int64)

        def stage(sources, sinks, sources_inside):
            nonlocal cap
            x = self.cross(tg, cap, sources, sinks, sep, sources_inside)
            delta[:] += x
            cap = cap - _darts(x)

        K_Rs = [s for s in lr.R_s if s in Ks]
        K_Ls = [s for s in lr.L_s if s in Ks]
        K_Lt = [v for v in lr.L_t if v in Ks]
        K_Rt = [v for v in lr.R_t if v in Ks]
        if inZ:
            stage(K_Rs, K_Lt, False)
            stage(K_Ls, [v for v in K_Lt if v in P], True)
            S3, T3 = K_Ls, [v for v in K_Lt if v not in P]
        else:
            stage(K_Rs, K_Lt, False)
            stage([s for s in K_Rs if s in P], K_Rt, True)
            S3, T3 = [s for s in K_Rs if s not in P], K_Rt
        if S3 and T3:
            piece = subgraph_piece(tg, K)
            idx = piece.vertex_index()
            sub_cap = cap[list(piece.dart_map)]
            vals = self.solve(piece.graph, sub_cap, [idx[s] for s in S3], [idx[v] for v in T3],
                              depth + 1, terms)
            np.add.at(delta, piece.edge_map, vals)
        return delta


def _components(g: PlanarGraph, reach: list[bool]) -> list[list[int]]:
    """Components of g after dropping every edge between reachable and unreachable vertices."""
    comp = [-1] * g.n
    out = []
    t = g.tail
    for r in range(g.n):
        if comp[r] != -1:
            continue
        comp[r] = len(out)
        members = [r]
        q = deque([r])
        while q:
            v = q.popleft()
            for d in g.rotation[v]:
                w = t[d ^ 1]
                if comp[w] == -1 and reach[w] == reach[v]:
                    comp[w] = len(out)
                    members.append(w)
                    q.append(w)
        out.append(sorted(members))
    return out


def solve(p: FlowProblem, config: SolverConfig | None = None,
          trace: SolveTrace | None = None) -> MaxFlowResult:
    """Maximum flow from ``p.sources`` to ``p.sinks`` in the residual network of ``p.base``."""
    config = config or SolverConfig()
    trace = trace if trace is not None else SolveTrace()
    g = p.graph
    rc = p.residual_capacity()
    vals = _Run(config, trace).solve(g, rc, list(p.sources), list(p.sinks), 0, None)
    f = Pseudoflow(g, vals)
    net = FlowNetwork(g, rc, p.sources, p.sinks)
    cut = extract_cut(net, f)
    stats = {"max_depth": trace.max_depth, "calls": len(trace.levels),
             "precondition_fallbacks": trace.precondition_fallbacks,
             "hassin": trace.log.hassin, "hassin_fallbacks": trace.log.fallback,
             "trace": trace}
    return MaxFlowResult(f, flow_value(f, p.sinks), cut.darts, stats)
