"""Maximum-flow engines.

* :func:`oracle_maxflow` -- blocking-flow augmentation (Dinic) on an arbitrary
  digraph, with a super-source/super-sink when there are several terminals.
  It is the reference answer for everything else.
* :func:`hassin_same_face_maxflow` -- single source and sink on a common
  face: cut the face with an s-t slit and read the flow off shortest-path
  potentials in the dual.
* :func:`multi_source_single_sink` -- apex reduction solved by the oracle.
* :func:`bounded_maxflow_from` -- flow between two vertices of a common face
  with its value capped, via a new source vertex placed in that face.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, dijkstra

from .flows import Pseudoflow, excesses, total_capacity
from .planar import Embedding, EmbeddingError, PlanarGraph


class EngineError(ValueError):
    pass


@dataclass(frozen=True)
class FlowNetwork:
    graph: PlanarGraph
    capacity: np.ndarray  # per dart, nonnegative integers
    sources: tuple[int, ...]
    sinks: tuple[int, ...]

    def __post_init__(self):
        cap = np.asarray(self.capacity, dtype=np.int64)
        object.__setattr__(self, "capacity", cap)
        object.__setattr__(self, "sources", tuple(int(s) for s in self.sources))
        object.__setattr__(self, "sinks", tuple(int(t) for t in self.sinks))
        if cap.shape != (self.graph.num_darts,):
            raise ValueError("need one capacity per dart")
        if np.any(cap < 0):
            raise ValueError("capacities must be nonnegative")
        if set(self.sources) & set(self.sinks):
            raise ValueError("a vertex cannot be both source and sink")
        for v in self.sources + self.sinks:
            if not 0 <= v < self.graph.n:
                raise ValueError(f"terminal {v} out of range")


@dataclass(frozen=True)
class FlowProblem:
    """A network, optionally solved in the residual network of ``base``."""

    network: FlowNetwork
    base: Pseudoflow | None = None

    @property
    def graph(self) -> PlanarGraph:
        return self.network.graph

    @property
    def sources(self) -> tuple[int, ...]:
        return self.network.sources

    @property
    def sinks(self) -> tuple[int, ...]:
        return self.network.sinks

    def residual_capacity(self) -> np.ndarray:
        cap = self.network.capacity
        if self.base is None:
            return cap.copy()
        rc = cap - self.base.darts()
        if np.any(rc < 0):
            raise ValueError("base flow violates the capacities")
        return rc


@dataclass
class MaxFlowResult:
    flow: Pseudoflow
    value: int
    cut: tuple[int, ...] | None = None
    stats: dict = field(default_factory=dict)


def flow_value(f: Pseudoflow, sinks: Iterable[int]) -> int:
    exc = excesses(f)
    return int(sum(int(exc[t]) for t in sinks))


# ---------------------------------------------------------------------------
# generic digraph + Dinic
# ---------------------------------------------------------------------------


class ArcNetwork:
    """Residual digraph with paired arcs ``2k``/``2k + 1``."""

    def __init__(self, n: int):
        self.n = n
        self.head: list[int] = []
        self.cap: list[int] = []
        self.adj: list[list[int]] = [[] for _ in range(n)]

    @classmethod
    def from_graph(cls, g: PlanarGraph, capacity: Sequence[int], extra_vertices: int = 0) -> "ArcNetwork":
        net = cls(g.n + extra_vertices)
        t = g.tail
        net.head = [t[d ^ 1] for d in range(len(t))]
        net.cap = [int(c) for c in capacity]
        for v, rot in enumerate(g.rotation):
            net.adj[v] = list(rot)
        return net

    def add_vertex(self) -> int:
        self.adj.append([])
        self.n += 1
        return self.n - 1

    def add_arc(self, u: int, v: int, cap: int, rev_cap: int = 0) -> int:
        a = len(self.head)
        self.head.extend((v, u))
        self.cap.extend((int(cap), int(rev_cap)))
        self.adj[u].append(a)
        self.adj[v].append(a + 1)
        return a

    def max_flow(self, s: int, t: int) -> int:
        """Dinic's algorithm; residual capacities are updated in place."""
        if s == t:
            raise EngineError("source equals sink")
        head, cap, adj = self.head, self.cap, self.adj
        n = self.n
        total = 0
        while True:
            level = [-1] * n
            level[s] = 0
            q = deque([s])
            while q:
                v = q.popleft()
                for a in adj[v]:
                    if cap[a] > 0 and level[head[a]] < 0:
                        level[head[a]] = level[v] + 1
                        q.append(head[a])
            if level[t] < 0:
                return total
            it = [0] * n
            # iterative blocking-flow search
            while True:
                path: list[int] = []
                v = s
                while v != t:
                    lst = adj[v]
                    i = it[v]
                    while i < len(lst):
                        a = lst[i]
                        if cap[a] > 0 and level[head[a]] == level[v] + 1:
                            break
                        i += 1
                    it[v] = i
                    if i == len(lst):
                        if v == s:
                            break
                        # dead end: retreat
                        level[v] = -1
                        a = path.pop()
                        v = head[a ^ 1]
                        it[v] += 1
                        continue
                    path.append(lst[i])
                    v = head[lst[i]]
                if v != t:
                    break
                push = min(cap[a] for a in path)
                for a in path:
                    cap[a] -= push
                    cap[a ^ 1] += push
                total += push

    def reachable(self, sources: Iterable[int]) -> list[bool]:
        seen = [False] * self.n
        q = deque()
        for s in sources:
            if not seen[s]:
                seen[s] = True
                q.append(s)
        while q:
            v = q.popleft()
            for a in self.adj[v]:
                if self.cap[a] > 0 and not seen[self.head[a]]:
                    seen[self.head[a]] = True
                    q.append(self.head[a])
        return seen


def _apex_solve(net: ArcNetwork, sources: Sequence[int], sinks: Sequence[int], big: int) -> int:
    """Max flow from all sources to all sinks, adding apexes as needed."""
    if not sources or not sinks:
        return 0
    if len(sources) == 1:
        s = sources[0]
    else:
        s = net.add_vertex()
        for v in sources:
            net.add_arc(s, v, big)
    if len(sinks) == 1:
        t = sinks[0]
    else:
        t = net.add_vertex()
        for v in sinks:
            net.add_arc(v, t, big)
    return net.max_flow(s, t)


def _solve_on_graph(g: PlanarGraph, rcap: np.ndarray, sources, sinks) -> tuple[Pseudoflow, ArcNetwork]:
    net = ArcNetwork.from_graph(g, rcap)
    big = total_capacity(rcap) + 1
    _apex_solve(net, list(sources), list(sinks), big)
    m = g.num_darts
    moved = np.asarray(rcap, dtype=np.int64) - np.asarray(net.cap[:m], dtype=np.int64)
    return Pseudoflow(g, moved[0::2].copy()), net


def oracle_maxflow(p: FlowProblem) -> MaxFlowResult:
    """Reference maximum flow (super-source/super-sink + Dinic)."""
    rcap = p.residual_capacity()
    f, net = _solve_on_graph(p.graph, rcap, p.sources, p.sinks)
    return MaxFlowResult(f, flow_value(f, p.sinks), stats={"engine": "oracle"})


def multi_source_single_sink(p: FlowProblem) -> MaxFlowResult:
    """Maximum flow when one side has a single terminal (apex on the other)."""
    if len(p.sinks) != 1 and len(p.sources) != 1:
        raise EngineError("need a single source or a single sink")
    rcap = p.residual_capacity()
    f, _ = _solve_on_graph(p.graph, rcap, p.sources, p.sinks)
    return MaxFlowResult(f, flow_value(f, p.sinks), stats={"engine": "apex"})


# ---------------------------------------------------------------------------
# Hassin: same-face s-t flow from dual shortest paths
# ---------------------------------------------------------------------------


def _face_labels(succ: np.ndarray) -> tuple[np.ndarray, int]:
    """Face id of every dart: the cycles of the permutation d -> succ[twin d]."""
    m = len(succ)
    darts = np.arange(m)
    nxt = succ[darts ^ 1]
    adj = sp.csr_matrix((np.ones(m, dtype=np.int8), (darts, nxt)), shape=(m, m))
    nf, labels = connected_components(adj, directed=True, connection="weak")
    return labels, nf


def _dual_potentials(emb: Embedding, caps: Sequence[int], skip_edge: int, root_dart: int):
    """Shortest distances in the dual from the face of ``root_dart``.

    Every dart d contributes a dual arc face(d) -> face(twin d) of length
    cap(d); the two darts of ``skip_edge`` contribute nothing.
    """
    succ = np.asarray(emb.succ, dtype=np.int64)
    face_of, nf = _face_labels(succ)
    m = len(succ)
    w = np.asarray(caps[:m], dtype=np.int64) if len(caps) >= m else np.concatenate(
        [np.asarray(caps, dtype=np.int64), np.zeros(m - len(caps), dtype=np.int64)])
    keep = (np.arange(m) >> 1) != skip_edge
    u = face_of[keep]
    v = face_of[np.nonzero(keep)[0] ^ 1]
    w = w[keep]
    src = int(face_of[root_dart])
    if int(w.sum()) < 2 ** 52:
        # parallel dual arcs: keep the shortest of each pair
        order = np.lexsort((w, v, u))
        u, v, w = u[order], v[order], w[order]
        first = np.ones(len(u), dtype=bool)
        first[1:] = (u[1:] != u[:-1]) | (v[1:] != v[:-1])
        graph = sp.csr_matrix((w[first].astype(float), (u[first], v[first])), shape=(nf, nf))
        dist = dijkstra(graph, directed=True, indices=src)
        return face_of, np.rint(dist).astype(np.int64)
    # distances could lose precision as floats: exact heap-based search
    arcs: list[list[tuple[int, int]]] = [[] for _ in range(nf)]
    for a, b, c in zip(u.tolist(), v.tolist(), w.tolist()):
        arcs[a].append((b, c))
    INF = float("inf")
    dist = [INF] * nf
    dist[src] = 0
    heap = [(0, src)]
    while heap:
        du, x = heapq.heappop(heap)
        if du > dist[x]:
            continue
        for y, c in arcs[x]:
            nd = du + c
            if nd < dist[y]:
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return face_of, np.array(dist, dtype=object)


def _hassin_embedding(emb: Embedding, caps: list[int], s: int, t: int, face_dart: int) -> tuple[list[int], int]:
    """Same-face max flow on a builder.  Returns per-dart flow (for the darts
    that existed before the slit) and the value.  ``face_dart`` is any dart
    of the face shared by s and t.  ``caps`` is indexed by dart.
    """
    m = emb.num_darts
    ct = emb.corner_in_face(face_dart, t)
    cs = emb.corner_in_face(face_dart, s)
    slit = emb.insert_edge(t, ct, s, cs)
    slit_dart = 2 * slit  # t -> s
    face_of, dist = _dual_potentials(emb, caps, slit, slit_dart)
    value = dist[face_of[slit_dart ^ 1]]
    darts = np.arange(m)
    flow = dist[face_of[darts ^ 1]] - dist[face_of[darts]]
    return flow.tolist(), int(value)


def _find_common_face(g: PlanarGraph, s: int, t: int) -> int:
    faces = g.common_faces(s, t)
    if not faces:
        raise EngineError(f"vertices {s} and {t} share no face")
    return g.faces[faces[0]][0]


def hassin_same_face_maxflow(p: FlowProblem) -> MaxFlowResult:
    """Maximum s-t flow when s and t lie on a common face."""
    if len(p.sources) != 1 or len(p.sinks) != 1:
        raise EngineError("Hassin's method needs exactly one source and one sink")
    g = p.graph
    s, t = p.sources[0], p.sinks[0]
    rcap = p.residual_capacity().tolist()
    face_dart = _find_common_face(g, s, t)
    flow, value = _hassin_embedding(Embedding(g), rcap, s, t, face_dart)
    f = Pseudoflow.from_darts(g, flow)
    return MaxFlowResult(f, value, stats={"engine": "hassin"})


@dataclass
class EngineLog:
    """Counts how bounded flows were computed (Hassin or oracle fallback)."""

    hassin: int = 0
    fallback: int = 0
    events: list[str] = field(default_factory=list)


def bounded_flow(g: PlanarGraph, rcap: Sequence[int], v: int, target: int, bound: int,
                 chain: Sequence[tuple[int, int, int]] = (), chain_cap: int = 0,
                 face_dart: int | None = None, log: EngineLog | None = None) -> list[int]:
    """Maximum flow from ``v`` to ``target`` of value at most ``bound``.

    A new source joined to ``v`` by an arc of capacity ``bound`` is placed in
    the face of ``face_dart`` (a face containing both ``v`` and ``target``).
    ``chain`` lists extra arcs ``(x, y, dart)`` of capacity ``chain_cap``
    directed x -> y, each embedded in the face of ``dart``, which must be a
    dart between x and y.  When every piece embeds, the flow comes from
    Hassin's method; otherwise from the oracle.  Returns per-dart flow on the
    darts of ``g`` only.
    """
    m = g.num_darts
    if bound <= 0:
        return [0] * m
    caps = np.asarray(rcap, dtype=np.int64).tolist()
    if face_dart is not None:
        try:
            emb = Embedding(g)
            for x, y, d in chain:
                # dart d runs between x and y; put the new arc next to it
                if d is None or {g.tail[d], g.tail[d ^ 1]} != {x, y}:
                    raise EmbeddingError("chain witness is not an x-y dart")
                cx = emb.corner_in_face(d, x)
                cy = emb.corner_in_face(d, y)
                emb.insert_edge(x, cx, y, cy)
                caps.extend((chain_cap, 0))
            cv = emb.corner_in_face(face_dart, v)
            s = emb.add_vertex()
            emb.insert_edge(s, None, v, cv)
            caps.extend((bound, 0))
            flow, _ = _hassin_embedding(emb, caps, s, target, face_dart)
            if log is not None:
                log.hassin += 1
            return flow[:m]
        except EmbeddingError as exc:
            if log is not None:
                log.events.append(f"fallback {v}->{target}: {exc}")
            caps = caps[:m]
    if log is not None:
        log.fallback += 1
    net = ArcNetwork.from_graph(g, caps)
    for x, y, _ in chain:
        net.add_arc(x, y, chain_cap)
    s = net.add_vertex()
    net.add_arc(s, v, bound)
    net.max_flow(s, target)
    return [caps[d] - net.cap[d] for d in range(m)]


def bounded_maxflow_from(p: FlowProblem, v: int, bound: int, target: int) -> MaxFlowResult:
    """Flow from ``v`` to ``target`` of maximum value not exceeding ``bound``."""
    if bound < 0:
        raise EngineError("bound must be nonnegative")
    g = p.graph
    face_dart = _find_common_face(g, v, target)
    flow = bounded_flow(g, p.residual_capacity(), v, target, bound, face_dart=face_dart)
    f = Pseudoflow.from_darts(g, flow)
    return MaxFlowResult(f, flow_value(f, [target]), stats={"engine": "hassin"})


# strategy table used by the solver and the command line
MultiSourceEngine = Callable[[FlowProblem], MaxFlowResult]
ENGINES: dict[str, MultiSourceEngine] = {
    "oracle": oracle_maxflow,
    "apex": multi_source_single_sink,
    "hassin": hassin_same_face_maxflow,
}
