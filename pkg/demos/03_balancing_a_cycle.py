"""Flow from one side of a separator to the other, one cycle vertex at a time.

    python3 demos/03_balancing_a_cycle.py
"""

import numpy as np

from planarflow import Pseudoflow, excesses, oracle_maxflow
from planarflow.engines import FlowNetwork, FlowProblem
from planarflow.generators import grid_graph
from planarflow.side_to_side import SideToSideInstance, side_to_side
from planarflow.verify import invariant_probe

K = 7
g = grid_graph(K)
cap = np.random.default_rng(4).integers(1, 10, g.num_darts)

# The middle column is the separator.  Sources live in the left three
# columns, sinks in the right three.
cycle = [i * K + 3 for i in range(K)]
left = [i * K + j for i in range(K) for j in range(3)]
S = [0, 2 * K, 4 * K + 1, 6 * K]
T = [K - 1, 3 * K + 6, 5 * K + 5]
inst = SideToSideInstance.from_cycle(g, cap, S, T, cycle, left)

res = side_to_side(inst, debug=True, keep_trace=True)
tr = res.trace

# The starting pseudoflow pushes as much as possible from S into the column
# and from the column into T, which leaves the column vertices unbalanced.
# Each one in turn pushes its excess along the column as far as it can and
# sends the remainder back where it came from.
start = excesses(Pseudoflow(tr.graph, tr.initial))
print("cycle vertex  at start  when reached  pushed on  returned")
for step in tr.steps:
    print(f"{step.vertex:>12}  {start[step.vertex]:>8}  {step.initial_excess:>12}  "
          f"{step.bounded_value:>9}  {step.returned:>8}")

# After every step no residual path leads from S to T or to a later cycle
# vertex, and none leads from a later cycle vertex to T.
print(f"\ninvariant replay: {'ok' if invariant_probe(tr).ok else 'violated'}")
oracle = oracle_maxflow(FlowProblem(FlowNetwork(g, cap, S, T))).value
print(f"value {res.value}, oracle {oracle}")
