"""Independent certification of flows.

Nothing here calls the engines or the flow algebra it is meant to check:
excesses, residual capacities and reachability are recomputed from the raw
arrays with plain loops.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .engines import FlowNetwork, FlowProblem, oracle_maxflow
from .flows import Pseudoflow
from .planar import PlanarGraph


@dataclass
class Report:
    ok: bool = True
    failures: list[str] = field(default_factory=list)

    def fail(self, msg: str) -> None:
        self.ok = False
        self.failures.append(msg)

    @property
    def first(self) -> str | None:
        return self.failures[0] if self.failures else None

    def __bool__(self) -> bool:
        return self.ok


def _dart_flow(g: PlanarGraph, values) -> list[int]:
    out = [0] * g.num_darts
    for e, x in enumerate(np.asarray(values).tolist()):
        out[2 * e] = x
        out[2 * e + 1] = -x
    return out


def _net_inflow(g: PlanarGraph, fd: list[int]) -> list[int]:
    exc = [0] * g.n
    t = g.tail
    for d, x in enumerate(fd):
        exc[t[d ^ 1]] += x
    return exc


def _residual_reach(g: PlanarGraph, cap: list[int], fd: list[int], start) -> set[int]:
    seen = set(start)
    stack = list(seen)
    t = g.tail
    while stack:
        v = stack.pop()
        for d in g.rotation[v]:
            if cap[d] - fd[d] > 0:
                w = t[d ^ 1]
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
    return seen


def check_flow(network: FlowNetwork, f: Pseudoflow, S=None, T=None) -> Report:
    """Capacity at every dart and conservation away from the terminals."""
    g = network.graph
    S = network.sources if S is None else S
    T = network.sinks if T is None else T
    rep = Report()
    if len(f.values) != g.num_edges:
        rep.fail(f"flow has {len(f.values)} edges, graph has {g.num_edges}")
        return rep
    cap = np.asarray(network.capacity).tolist()
    fd = _dart_flow(g, f.values)
    for d in range(g.num_darts):
        if fd[d] > cap[d]:
            rep.fail(f"capacity: dart {d} carries {fd[d]} > {cap[d]}")
            break
    exc = _net_inflow(g, fd)
    terminals = set(S) | set(T)
    for v in range(g.n):
        if v not in terminals and exc[v] != 0:
            rep.fail(f"conservation: vertex {v} has excess {exc[v]}")
            break
    return rep


def check_max(network: FlowNetwork, f: Pseudoflow, S=None, T=None) -> Report:
    """No residual path from a source to a sink."""
    g = network.graph
    S = network.sources if S is None else S
    T = network.sinks if T is None else T
    rep = Report()
    cap = np.asarray(network.capacity).tolist()
    seen = _residual_reach(g, cap, _dart_flow(g, f.values), S)
    hit = sorted(set(T) & seen)
    if hit:
        rep.fail(f"residual path from the sources to sink {hit[0]}")
    return rep


def flow_value(network: FlowNetwork, f: Pseudoflow) -> int:
    exc = _net_inflow(network.graph, _dart_flow(network.graph, f.values))
    return sum(exc[t] for t in network.sinks)


def cut_capacity(network: FlowNetwork, darts: Sequence[int]) -> int:
    cap = np.asarray(network.capacity)
    return int(sum(int(cap[d]) for d in darts))


def check_cut(network: FlowNetwork, f: Pseudoflow, darts: Sequence[int]) -> Report:
    """The darts form a saturated cut whose capacity equals the flow value."""
    rep = Report()
    g = network.graph
    cap = np.asarray(network.capacity).tolist()
    fd = _dart_flow(g, f.values)
    for d in darts:
        if cap[d] - fd[d] != 0:
            rep.fail(f"cut dart {d} is not saturated")
            break
    c, v = cut_capacity(network, darts), flow_value(network, f)
    if c != v:
        rep.fail(f"cut capacity {c} differs from flow value {v}")
    return rep


@dataclass
class Comparison:
    equal: bool
    solver_value: int
    oracle_value: int
    details: str = ""


def oracle_compare(instance, solver=None) -> Comparison:
    """Run the solver and the oracle on the same instance and compare values."""
    from .solver import solve

    problem = instance if isinstance(instance, FlowProblem) else instance.problem
    res = (solver or solve)(problem)
    ora = oracle_maxflow(problem)
    eq = res.value == ora.value
    return Comparison(eq, res.value, ora.value,
                      "" if eq else f"solver {res.value} != oracle {ora.value}")


def invariant_probe(trace) -> Report:
    """Replay a balancing trace: after each cycle vertex there must be no
    residual path from the sources to the sinks or to an unprocessed cycle
    vertex, nor from an unprocessed cycle vertex to the sinks."""
    rep = Report()
    g = trace.graph
    cap = np.asarray(trace.capacity).tolist()
    S, T, P = list(trace.sources), set(trace.sinks), list(trace.cycle)
    for i, snap in enumerate(trace.snapshots):
        fd = _dart_flow(g, snap)
        pending = P[i + 1:]
        from_s = _residual_reach(g, cap, fd, S)
        if from_s & T:
            rep.fail(f"after p_{i + 1}: residual path S -> T")
        if from_s & set(pending):
            rep.fail(f"after p_{i + 1}: residual path S -> P'")
        if pending and _residual_reach(g, cap, fd, pending) & T:
            rep.fail(f"after p_{i + 1}: residual path P' -> T")
    return rep
