"""Balanced cycle separators for triangulated plane graphs.

The separator is a fundamental cycle of a BFS tree: for a non-tree edge
(a, b) the cycle is the tree path a..b closed by the edge.  The non-tree
edges form a spanning tree of the dual (the cotree); cutting the cotree at
the dual of (a, b) splits the faces into the two sides of the cycle, so the
weight strictly inside every fundamental cycle follows from one pass over
the cotree.  Among the cycles with both strict sides at most 2/3 of the total
weight, the shortest is returned.  Its length is at most ``2 * radius + 1``
where ``radius`` is the depth of the BFS tree, which is rooted at an
approximate centre of the graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .planar import PlanarGraph, bfs_order


class SeparatorError(ValueError):
    pass


@dataclass(frozen=True)
class Separator:
    """Cycle ``p_1 .. p_r`` splitting the graph into two pieces sharing it.

    ``inside`` and ``outside`` both contain the cycle vertices.
    ``witness_darts[j]`` is the dart p_j -> p_{j+1} (the last one closes the
    cycle); its face is shared by the two vertices.
    """

    cycle: tuple[int, ...]
    inside: frozenset[int]
    outside: frozenset[int]
    witness_darts: tuple[int, ...]
    inside_faces: frozenset[int]
    inside_weight: float = 0.0
    outside_weight: float = 0.0
    cycle_weight: float = 0.0
    root: int = -1
    depth: int = 0

    @property
    def size(self) -> int:
        return len(self.cycle)

    @property
    def strict_inside(self) -> frozenset[int]:
        return self.inside - set(self.cycle)

    @property
    def strict_outside(self) -> frozenset[int]:
        return self.outside - set(self.cycle)

    def edge_in_inside_piece(self, g: PlanarGraph) -> np.ndarray:
        """Piece assignment of every edge; edges between cycle vertices go inside."""
        outside = self.strict_outside
        t = g.tail
        return np.array([not (t[2 * e] in outside or t[2 * e + 1] in outside)
                         for e in range(g.num_edges)], dtype=bool)


def _approximate_centre(g: PlanarGraph) -> int:
    order, depth, parent = bfs_order(g, 0)
    a = order[-1]
    order, depth, parent = bfs_order(g, a)
    b = order[-1]
    # walk half way back along the a..b path
    v = b
    for _ in range(depth[b] // 2):
        v = g.tail[parent[v]]
    return v


def _lca_table(parent_vertex: np.ndarray, depth: np.ndarray) -> list[np.ndarray]:
    up = [parent_vertex]
    span = int(depth.max()) if len(depth) else 0
    k = 1
    while (1 << k) <= span:
        up.append(up[-1][up[-1]])
        k += 1
    return up


def _lca(up: list[np.ndarray], depth: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    u = u.copy()
    v = v.copy()
    swap = depth[u] < depth[v]
    u[swap], v[swap] = v[swap], u[swap].copy()
    diff = depth[u] - depth[v]
    for k, table in enumerate(up):
        m = ((diff >> k) & 1).astype(bool)
        u[m] = table[u[m]]
    for table in reversed(up):
        m = table[u] != table[v]
        u[m] = table[u[m]]
        v[m] = table[v[m]]
    return np.where(u == v, u, up[0][u])


def _candidates(g: PlanarGraph, w: Sequence, root: int):
    """All fundamental cycles of the BFS tree at ``root`` with their side weights.

    Yields arrays indexed by non-root cotree faces: the non-tree edge (a, b),
    the inside weight, the cycle weight, the cycle vertex count, plus the
    cotree itself for extracting the inside faces later.
    """
    n = g.n
    t = g.tail
    order, depth_l, parent = bfs_order(g, root)
    tree_edge = np.zeros(g.num_edges, dtype=bool)
    pv = np.empty(n, dtype=np.int64)
    for v in range(n):
        if parent[v] == -1:
            pv[v] = v
        else:
            tree_edge[parent[v] >> 1] = True
            pv[v] = t[parent[v]]
    depth = np.asarray(depth_l, dtype=np.int64)

    wt = list(w)
    integral = all(isinstance(x, int) for x in wt)
    prefix = [0] * n  # weight of the tree path root..v, inclusive
    for v in order:
        prefix[v] = wt[v] + (prefix[pv[v]] if v != root else 0)

    # cotree BFS over faces, rooted at face 0
    nf = g.num_faces
    fparent_dart = [-1] * nf
    seen = [False] * nf
    seen[0] = True
    forder = [0]
    q = deque([0])
    face_of = g.face_of
    while q:
        f = q.popleft()
        for d in g.faces[f]:
            if tree_edge[d >> 1]:
                continue
            h = face_of[d ^ 1]
            if not seen[h]:
                seen[h] = True
                # d runs along f; its twin runs along h, i.e. the edge h shares with its parent
                fparent_dart[h] = d ^ 1
                forder.append(h)
                q.append(h)
    if len(forder) != nf:
        raise SeparatorError("cotree does not span the dual; embedding is broken")

    faces = np.asarray(forder[1:], dtype=np.int64)
    pd = np.asarray([fparent_dart[f] for f in forder[1:]], dtype=np.int64)
    tails = np.asarray(t, dtype=np.int64)
    a = tails[pd]
    b = tails[pd ^ 1]
    # third corner of each triangle
    c = np.asarray([t[g.face_next(g.face_next(int(d)))] for d in pd], dtype=np.int64)

    up = _lca_table(pv, depth)
    l_ab = _lca(up, depth, a, b)
    l_bc = _lca(up, depth, b, c)
    l_ac = _lca(up, depth, a, c)

    def path_weight(x, y, l):
        return [prefix[i] + prefix[j] - 2 * prefix[k] + wt[k] for i, j, k in zip(x.tolist(), y.tolist(), l.tolist())]

    w_ab = path_weight(a, b, l_ab)
    w_bc = path_weight(b, c, l_bc)
    w_ac = path_weight(a, c, l_ac)
    # the deepest pairwise lca is the median of the three corners
    stack = np.stack([l_ab, l_bc, l_ac])
    med = stack[np.argmax(depth[stack], axis=0), np.arange(len(pd))].tolist()
    steiner = []
    for x, y, z, m in zip(w_ab, w_bc, w_ac, med):
        s = x + y + z - wt[m]
        steiner.append(s // 2 if integral else s / 2)

    idx = {f: i for i, f in enumerate(forder[1:])}
    inside = [0] * len(pd)
    for i in range(len(pd) - 1, -1, -1):
        inside[i] += steiner[i] - w_ab[i]
        p = face_of[int(pd[i]) ^ 1]
        if p != 0:
            inside[idx[p]] += inside[i]
    length = (depth[a] + depth[b] - 2 * depth[l_ab] + 1)
    return dict(order=order, parent=parent, pv=pv, depth=depth, faces=faces, pd=pd,
                a=a, b=b, lca=l_ab, inside=inside, cycle_w=w_ab, length=length,
                forder=forder, fparent_dart=fparent_dart)


def _balanced(x, total, exact: bool) -> bool:
    if exact:
        return 3 * x <= 2 * total
    return x <= (2.0 / 3.0) * total + 1e-12


def _build(g: PlanarGraph, cand: dict, i: int, total, root: int) -> Separator:
    t = g.tail
    pv = cand["pv"]
    depth = cand["depth"]
    a, b, l = int(cand["a"][i]), int(cand["b"][i]), int(cand["lca"][i])
    left = [a]
    while left[-1] != l:
        left.append(int(pv[left[-1]]))
    right = [b]
    while right[-1] != l:
        right.append(int(pv[right[-1]]))
    cycle = left + right[-2::-1]
    cyc = set(cycle)

    # darts between consecutive cycle vertices: tree darts plus the closing edge
    parent = cand["parent"]
    witness = []
    for j in range(len(cycle) - 1):
        x, y = cycle[j], cycle[j + 1]
        if parent[x] != -1 and t[parent[x]] == y:
            witness.append(parent[x] ^ 1)  # parent dart runs y -> x
        else:
            witness.append(parent[y])
    closing = int(cand["pd"][i])
    # pd runs a -> b along the inside face; the cycle is closed by b -> a
    witness.append(closing ^ 1)

    # inside faces: cotree subtree of the candidate face
    forder = cand["forder"]
    fparent_dart = cand["fparent_dart"]
    face_of = g.face_of
    children: dict[int, list[int]] = {}
    for f in forder[1:]:
        children.setdefault(face_of[fparent_dart[f] ^ 1], []).append(f)
    start = int(cand["faces"][i])
    inside_faces = set()
    stack = [start]
    while stack:
        f = stack.pop()
        inside_faces.add(f)
        stack.extend(children.get(f, ()))
    inside_v = {t[d] for f in inside_faces for d in g.faces[f]} | cyc
    outside_v = (set(range(g.n)) - inside_v) | cyc
    inside_w = cand["inside"][i]
    cycle_w = cand["cycle_w"][i]
    return Separator(
        cycle=tuple(cycle),
        inside=frozenset(inside_v),
        outside=frozenset(outside_v),
        witness_darts=tuple(witness),
        inside_faces=frozenset(inside_faces),
        inside_weight=inside_w,
        outside_weight=total - inside_w - cycle_w,
        cycle_weight=cycle_w,
        root=root,
        depth=int(depth.max()),
    )


def _cycle_separator(g: PlanarGraph, w: Sequence, roots: Sequence[int] | None = None) -> Separator:
    if g.n < 3 or not g.is_triangulated():
        raise SeparatorError("graph must be triangulated")
    exact = not any(isinstance(x, float) for x in w)
    total = sum(w)
    if roots is None:
        roots = [_approximate_centre(g)]
        heavy = max(range(g.n), key=lambda v: (w[v], -v))
        roots += [r for r in (heavy, 0) if r not in roots]
    for root in roots:
        cand = _candidates(g, w, root)
        inside = cand["inside"]
        cw = cand["cycle_w"]
        best = None
        for i in range(len(inside)):
            ins = inside[i]
            out = total - ins - cw[i]
            if _balanced(ins, total, exact) and _balanced(out, total, exact):
                key = (int(cand["length"][i]), max(ins, out), i)
                if best is None or key < best:
                    best = key
        if best is not None:
            return _build(g, cand, best[2], total, root)
    raise SeparatorError("no balanced fundamental cycle found")


def find_cycle_separator(g: PlanarGraph, weights: Sequence[float]) -> Separator:
    """Balanced cycle separator for nonnegative vertex weights summing to 1."""
    if len(weights) != g.n:
        raise ValueError("need one weight per vertex")
    if any(x < 0 for x in weights):
        raise ValueError("weights must be nonnegative")
    if abs(float(sum(weights)) - 1.0) > 1e-9:
        raise ValueError("weights must sum to 1")
    if all(isinstance(x, (int, Fraction)) for x in weights):
        w = [Fraction(x) for x in weights]
    else:
        w = [float(x) for x in weights]
    return _cycle_separator(g, w)


def separator_for_terminals(g: PlanarGraph, sources: Sequence[int], sinks: Sequence[int]) -> Separator:
    """Separator balancing the terminals: each gets weight 1/(|S|+|T|).

    Weights are kept as integer counts internally so the 2/3 test is exact.
    """
    if not sources or not sinks:
        raise ValueError("sources and sinks must be nonempty")
    w = [0] * g.n
    for v in list(sources) + list(sinks):
        w[v] = 1
    return _cycle_separator(g, w)


def check_separator(g: PlanarGraph, sep: Separator) -> list[str]:
    """Independent certificate check; returns a list of problems (empty if valid)."""
    problems = []
    P = set(sep.cycle)
    if len(P) != len(sep.cycle):
        problems.append("cycle repeats a vertex")
    if sep.inside | sep.outside != set(range(g.n)):
        problems.append("pieces do not cover V")
    if sep.inside & sep.outside != P:
        problems.append("pieces do not meet exactly in P")
    xs = sep.inside - P
    ys = sep.outside - P
    seen = set(xs)
    stack = list(xs)
    t = g.tail
    while stack:
        v = stack.pop()
        for d in g.rotation[v]:
            w = t[d ^ 1]
            if w in P or w in seen:
                continue
            if w in ys:
                problems.append(f"path from inside to outside avoids P at {v}-{w}")
                return problems
            seen.add(w)
            stack.append(w)
    r = len(sep.cycle)
    for j, d in enumerate(sep.witness_darts):
        x, y = sep.cycle[j], sep.cycle[(j + 1) % r]
        f = g.face_of[d]
        verts = set(g.face_vertices(f))
        if x not in verts or y not in verts:
            problems.append(f"witness face {f} misses p_{j + 1} or p_{j + 2}")
    return problems
