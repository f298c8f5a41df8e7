"""Solve a small grid with many sources and sinks, then check the answer.

    python3 demos/01_first_solve.py
"""

from planarflow import gen_grid, oracle_maxflow, solve
from planarflow.solver import SolveTrace, extract_cut
from planarflow.verify import check_cut, check_flow, check_max

# A 12 x 12 grid with random capacities in [0, 20] and eight sources and
# eight sinks scattered over the interior.
inst = gen_grid(12, (0, 20), seed=1, layout="random", num_sources=8, num_sinks=8)
print(f"{inst.graph.n} vertices, {inst.graph.num_edges} edges, "
      f"sources {list(inst.sources)}, sinks {list(inst.sinks)}")

trace = SolveTrace()
res = solve(inst.problem, trace=trace)
print(f"\nmaximum flow value: {res.value}")

# Every recursive call leaves a record.  A "split" call cut the graph with a
# cycle separator; the other kinds are base cases solved directly.
for lev in trace.levels:
    extra = f", separator of {lev['separator']} vertices" if lev["kind"] == "split" else ""
    print(f"  depth {lev['depth']}: {lev['kind']:<6} n={lev['n']:<4} "
          f"|S|={lev['sources']} |T|={lev['sinks']}{extra}")

# The flow certifies itself: it is feasible, leaves no residual path from a
# source to a sink, and the saturated cut it induces has the same capacity.
net = inst.network
cut = extract_cut(net, res.flow)
print(f"\ncheck_flow: {bool(check_flow(net, res.flow))}")
print(f"check_max:  {bool(check_max(net, res.flow))}")
print(f"cut of {len(cut.darts)} darts, capacity {cut.capacity(inst.capacity)}: "
      f"{bool(check_cut(net, res.flow, cut.darts))}")
print(f"oracle value: {oracle_maxflow(inst.problem).value}")
