"""Pseudoflow algebra on dart-paired graphs.

A pseudoflow stores one signed integer per edge: the flow on dart ``2k``.
The twin dart carries the negation, so antisymmetry holds by construction.
Capacities are per dart.  Excess is net *inflow*: a vertex that only sends
flow has negative excess.

None of the functions here care about planarity; they only need ``tail``
(one entry per dart) and the vertex count, so they also run on graphs with
extra apex vertices or chain arcs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .planar import PlanarGraph


class FlowError(ValueError):
    pass


class Pseudoflow:
    """Antisymmetric integer flow on the edges of ``graph``."""

    __slots__ = ("graph", "values")

    def __init__(self, graph: PlanarGraph, values=None):
        self.graph = graph
        if values is None:
            values = np.zeros(graph.num_edges, dtype=np.int64)
        values = np.asarray(values, dtype=np.int64)
        if values.shape != (graph.num_edges,):
            raise FlowError(f"expected {graph.num_edges} edge values, got {values.shape}")
        self.values = values

    @classmethod
    def from_darts(cls, graph: PlanarGraph, dart_values) -> "Pseudoflow":
        arr = np.asarray(dart_values, dtype=np.int64)
        if np.any(arr[0::2] != -arr[1::2]):
            raise FlowError("dart values are not antisymmetric")
        return cls(graph, arr[0::2].copy())

    def darts(self) -> np.ndarray:
        out = np.empty(2 * len(self.values), dtype=np.int64)
        out[0::2] = self.values
        out[1::2] = -self.values
        return out

    def __getitem__(self, d: int) -> int:
        v = int(self.values[d >> 1])
        return -v if d & 1 else v

    def __add__(self, other: "Pseudoflow") -> "Pseudoflow":
        return Pseudoflow(self.graph, self.values + other.values)

    def __neg__(self) -> "Pseudoflow":
        return Pseudoflow(self.graph, -self.values)

    def __eq__(self, other) -> bool:
        return isinstance(other, Pseudoflow) and np.array_equal(self.values, other.values)

    def copy(self) -> "Pseudoflow":
        return Pseudoflow(self.graph, self.values.copy())

    def __repr__(self) -> str:
        nz = int(np.count_nonzero(self.values))
        return f"Pseudoflow({nz} nonzero edges of {len(self.values)})"


@dataclass
class FlowDecomposition:
    """Paths (from a vertex with net outflow to one with net inflow) and cycles."""

    paths: list[tuple[tuple[int, ...], int]] = field(default_factory=list)
    cycles: list[tuple[tuple[int, ...], int]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.paths) + len(self.cycles)


# ---------------------------------------------------------------------------
# basic quantities
# ---------------------------------------------------------------------------


def residual(capacity, f: Pseudoflow, d: int) -> int:
    return int(capacity[d]) - f[d]


def residual_capacities(capacity, f: Pseudoflow) -> np.ndarray:
    return np.asarray(capacity, dtype=np.int64) - f.darts()


def excesses(f: Pseudoflow) -> np.ndarray:
    """Net inflow at every vertex."""
    g = f.graph
    t = np.asarray(g.tail, dtype=np.int64)
    exc = np.zeros(g.n, dtype=np.int64)
    # dart 2k enters tail[2k + 1]
    np.add.at(exc, t[1::2], f.values)
    np.add.at(exc, t[0::2], -f.values)
    return exc


def excess(f: Pseudoflow, v: int) -> int:
    g = f.graph
    total = 0
    for d in g.rotation[v]:
        total -= f[d]
    return total


def respects(capacity, f: Pseudoflow) -> bool:
    return bool(np.all(f.darts() <= np.asarray(capacity, dtype=np.int64)))


def total_capacity(capacity) -> int:
    """Sum of all dart capacities (used as an effectively infinite capacity)."""
    total = sum(int(c) for c in capacity)
    if total >= 1 << 62:
        raise OverflowError("total capacity does not fit in 62 bits")
    return total


def sum_flows(capacity, f: Pseudoflow, g: Pseudoflow) -> Pseudoflow:
    """``f + g`` where ``g`` must respect the residual capacities of ``f``."""
    fd = f.darts()
    gd = g.darts()
    bad = np.nonzero(gd > np.asarray(capacity, dtype=np.int64) - fd)[0]
    if len(bad):
        raise FlowError(f"second flow exceeds the residual capacity on dart {int(bad[0])}")
    return Pseudoflow(f.graph, f.values + g.values)


# ---------------------------------------------------------------------------
# decomposition and cycle canceling
# ---------------------------------------------------------------------------


def _positive_out(g: PlanarGraph, fd: list[int]) -> list[list[int]]:
    out = [[] for _ in range(g.n)]
    for d, x in enumerate(fd):
        if x > 0:
            out[g.tail[d]].append(d)
    return out


def decompose(f: Pseudoflow) -> FlowDecomposition:
    """Split ``f`` into flow paths and cycles whose sum is exactly ``f``.

    Walks start at vertices with net outflow and follow positive darts until
    they hit a vertex with remaining net inflow (a path) or revisit a vertex
    on the current walk (a cycle, peeled immediately).  What remains after
    all excess is used up is a circulation, peeled into cycles.
    """
    g = f.graph
    t = g.tail
    fd = f.darts().tolist()
    exc = excesses(f).tolist()
    out = _positive_out(g, fd)
    ptr = [0] * g.n
    result = FlowDecomposition()

    def next_dart(v):
        lst = out[v]
        i = ptr[v]
        while i < len(lst) and fd[lst[i]] <= 0:
            i += 1
        ptr[v] = i
        return lst[i] if i < len(lst) else -1

    def peel(darts, amount):
        for d in darts:
            fd[d] -= amount
            fd[d ^ 1] += amount

    for start in range(g.n):
        while exc[start] < 0:
            walk = [start]
            darts: list[int] = []
            onwalk = {start: 0}
            while True:
                v = walk[-1]
                if v != start and exc[v] > 0:
                    amount = min(-exc[start], exc[v], min(fd[d] for d in darts))
                    peel(darts, amount)
                    exc[start] += amount
                    exc[v] -= amount
                    result.paths.append((tuple(darts), amount))
                    break
                d = next_dart(v)
                if d == -1:
                    raise FlowError(f"walk from {start} is stuck at {v}")
                w = t[d ^ 1]
                if w in onwalk:
                    k = onwalk[w]
                    cyc = darts[k:] + [d]
                    amount = min(fd[x] for x in cyc)
                    peel(cyc, amount)
                    result.cycles.append((tuple(cyc), amount))
                    for x in walk[k + 1:]:
                        del onwalk[x]
                    del walk[k + 1:]
                    del darts[k:]
                    continue
                onwalk[w] = len(walk)
                walk.append(w)
                darts.append(d)

    # leftover circulation
    for start in range(g.n):
        while next_dart(start) != -1:
            walk = [start]
            darts = []
            onwalk = {start: 0}
            while True:
                v = walk[-1]
                d = next_dart(v)
                w = t[d ^ 1]
                if w in onwalk:
                    k = onwalk[w]
                    cyc = darts[k:] + [d]
                    amount = min(fd[x] for x in cyc)
                    peel(cyc, amount)
                    result.cycles.append((tuple(cyc), amount))
                    break
                onwalk[w] = len(walk)
                walk.append(w)
                darts.append(d)
    return result


def recompose(graph: PlanarGraph, dec: FlowDecomposition) -> Pseudoflow:
    vals = np.zeros(graph.num_edges, dtype=np.int64)
    for darts, amount in dec.paths + dec.cycles:
        for d in darts:
            vals[d >> 1] += -amount if d & 1 else amount
    return Pseudoflow(graph, vals)


def is_acyclic(f: Pseudoflow) -> bool:
    """True if the darts carrying positive flow form a DAG."""
    g = f.graph
    fd = f.darts().tolist()
    indeg = [0] * g.n
    out = _positive_out(g, fd)
    for lst in out:
        for d in lst:
            indeg[g.tail[d ^ 1]] += 1
    q = [v for v in range(g.n) if indeg[v] == 0]
    seen = 0
    while q:
        v = q.pop()
        seen += 1
        for d in out[v]:
            w = g.tail[d ^ 1]
            indeg[w] -= 1
            if indeg[w] == 0:
                q.append(w)
    return seen == g.n


def cancel_cycles(f: Pseudoflow) -> Pseudoflow:
    """Remove every cycle of positive flow without changing any excess.

    Depth-first search over positive darts; a dart back into the current
    stack closes a cycle, which is canceled by its bottleneck.  The search
    then resumes from the tail of the first dart the cancellation zeroed.
    Flow values only move toward zero.
    """
    g = f.graph
    t = g.tail
    fd = f.darts().tolist()
    out = _positive_out(g, fd)
    ptr = [0] * g.n
    state = [0] * g.n  # 0 new, 1 on stack, 2 finished
    for root in range(g.n):
        if state[root]:
            continue
        stack = [root]
        darts: list[int] = []
        where = {root: 0}
        state[root] = 1
        while stack:
            v = stack[-1]
            lst = out[v]
            i = ptr[v]
            while i < len(lst) and (fd[lst[i]] <= 0 or state[t[lst[i] ^ 1]] == 2):
                i += 1
            ptr[v] = i
            if i == len(lst):
                state[v] = 2
                stack.pop()
                del where[v]
                if darts:
                    darts.pop()
                continue
            d = lst[i]
            w = t[d ^ 1]
            if state[w] == 0:
                state[w] = 1
                where[w] = len(stack)
                stack.append(w)
                darts.append(d)
                continue
            # w is on the stack: cycle stack[k..] + d
            k = where[w]
            cyc = darts[k:] + [d]
            amount = min(fd[x] for x in cyc)
            for x in cyc:
                fd[x] -= amount
                fd[x ^ 1] += amount
            # unwind to the tail of the first saturated dart
            for j, x in enumerate(cyc):
                if fd[x] == 0:
                    cut = k + j
                    break
            for u in stack[cut + 1:]:
                state[u] = 0
                del where[u]
            del stack[cut + 1:]
            del darts[cut:]
    return Pseudoflow(g, np.asarray(fd[0::2], dtype=np.int64))


def return_excess(f: Pseudoflow, v: int, amount: int) -> Pseudoflow:
    """Push ``amount`` units of ``v``'s surplus back along incoming flow.

    Vertices upstream of ``v`` are visited in reverse topological order of
    the (acyclic) positive flow.  A vertex with negative excess absorbs as
    much as it can; the rest is pushed back through its own positive
    in-darts, lowest dart id first.  Only darts carrying positive flow are
    reduced, so the change is positive only where ``f`` is negative.
    """
    if amount < 0:
        raise FlowError("amount must be nonnegative")
    exc_v = excess(f, v)
    if amount > exc_v:
        raise FlowError(f"amount {amount} exceeds the excess {exc_v} of vertex {v}")
    if amount == 0:
        return f.copy()
    g = f.graph
    t = g.tail
    fd = f.darts().tolist()
    exc = excesses(f).tolist()
    pos_in = [[] for _ in range(g.n)]
    for d, x in enumerate(fd):
        if x > 0:
            pos_in[t[d ^ 1]].append(d)
    # vertices reaching v along positive darts
    up = {v}
    q = deque([v])
    while q:
        u = q.popleft()
        for d in pos_in[u]:
            w = t[d]
            if w not in up:
                up.add(w)
                q.append(w)
    # topological order of the upstream sub-DAG (Kahn on out-degree toward v)
    outdeg = {u: 0 for u in up}
    for u in up:
        for d in pos_in[u]:
            outdeg[t[d]] += 1
    ready = [u for u in up if outdeg[u] == 0]
    order = []
    while ready:
        u = ready.pop()
        order.append(u)
        for d in pos_in[u]:
            w = t[d]
            outdeg[w] -= 1
            if outdeg[w] == 0:
                ready.append(w)
    if len(order) != len(up):
        raise FlowError("flow is not acyclic; cancel cycles first")
    pending = dict.fromkeys(up, 0)
    pending[v] = amount
    for u in order:  # v first, then vertices whose successors are all done
        need = pending[u]
        if need == 0:
            continue
        if u != v and exc[u] < 0:
            need -= min(need, -exc[u])
        for d in sorted(pos_in[u]):
            if need == 0:
                break
            x = min(need, fd[d])
            if x <= 0:
                continue
            fd[d] -= x
            fd[d ^ 1] += x
            pending[t[d]] += x
            need -= x
        if need:
            raise FlowError(f"could not push back {need} units at vertex {u}")
    return Pseudoflow(g, np.asarray(fd[0::2], dtype=np.int64))
