"""Cycle separators, and how one splits the terminals.

    python3 demos/02_separators.py
"""

import math
from fractions import Fraction

import numpy as np

from planarflow import find_cycle_separator, separator_for_terminals, triangulate
from planarflow.generators import grid_graph, random_triangulation
from planarflow.solver import LRPartition

# Uniform weights: the cycle should cut the graph into two parts, neither
# holding more than two thirds of the vertices, using O(sqrt n) vertices.
for k in (10, 20, 40, 80):
    tg, _ = triangulate(grid_graph(k))
    sep = find_cycle_separator(tg, [Fraction(1, tg.n)] * tg.n)
    print(f"grid {k:>2}x{k:<2} n={tg.n:<5} |P|={sep.size:<3} |P|/sqrt(n)={sep.size / math.sqrt(tg.n):.2f} "
          f"inside={float(sep.inside_weight):.3f} outside={float(sep.outside_weight):.3f}")

rng = np.random.default_rng(0)
for n in (100, 1000, 5000):
    g = random_triangulation(n, rng)
    sep = find_cycle_separator(g, [Fraction(1, n)] * n)
    print(f"stacked triangulation n={n:<5} |P|={sep.size}")

# The solver weights only the terminals.  Sources strictly inside the cycle
# form L_s; sinks inside or on it form L_t; the rest go to R.
tg, _ = triangulate(grid_graph(20))
pick = rng.choice(tg.n, 24, replace=False).tolist()
S, T = pick[:12], pick[12:]
sep = separator_for_terminals(tg, S, T)
lr = LRPartition.from_separator(sep, S, T)
print(f"\n24 terminals on a 20x20 grid, separator of {sep.size} vertices")
print(f"L: {len(lr.L_s)} sources, {len(lr.L_t)} sinks")
print(f"R: {len(lr.R_s)} sources, {len(lr.R_t)} sinks")
