"""Seeded instance generators: grids and random plane graphs."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .io import Instance
from .planar import Embedding, PlanarGraph, build_from_rotation


def _capacities(rng: np.random.Generator, num_darts: int, capacities) -> np.ndarray:
    if capacities == "unit":
        return np.ones(num_darts, dtype=np.int64)
    if isinstance(capacities, tuple) and len(capacities) == 2:
        lo, hi = capacities
        return rng.integers(lo, hi + 1, size=num_darts, dtype=np.int64)
    raise ValueError(f"unknown capacity distribution {capacities!r}")


def grid_graph(k: int) -> PlanarGraph:
    """k x k grid; vertex ``i*k + j`` sits at column j, row i (row 0 on top)."""
    rot = []
    for i in range(k):
        for j in range(k):
            nb = []
            if j + 1 < k:
                nb.append(i * k + j + 1)
            if i > 0:
                nb.append((i - 1) * k + j)
            if j > 0:
                nb.append(i * k + j - 1)
            if i + 1 < k:
                nb.append((i + 1) * k + j)
            rot.append(nb)
    return build_from_rotation(rot)


def grid_boundary(k: int) -> list[int]:
    """Outer face vertices of the k x k grid in cyclic order."""
    if k == 1:
        return [0]
    top = [j for j in range(k)]
    right = [i * k + k - 1 for i in range(1, k)]
    bottom = [(k - 1) * k + j for j in range(k - 2, -1, -1)]
    left = [i * k for i in range(k - 2, 0, -1)]
    return top + right + bottom + left


def gen_grid(k: int, capacities="unit", seed: int = 0, layout: str = "sides",
             num_sources: int | None = None, num_sinks: int | None = None) -> Instance:
    """Grid instance.

    ``layout`` places the terminals: ``"sides"`` puts sources in the left
    column and sinks in the right one, ``"random"`` samples them anywhere and
    ``"face"`` samples them all from the outer face.  ``capacities`` is
    ``"unit"`` or an inclusive ``(lo, hi)`` range drawn per dart.
    """
    if k < 2:
        raise ValueError("grid needs k >= 2")
    rng = np.random.default_rng(seed)
    g = grid_graph(k)
    cap = _capacities(rng, g.num_darts, capacities)
    if layout == "sides":
        left = [i * k for i in range(k)]
        right = [i * k + k - 1 for i in range(k)]
        ns = k if num_sources is None else num_sources
        nt = k if num_sinks is None else num_sinks
        S = sorted(rng.choice(left, size=ns, replace=False).tolist()) if ns < k else left
        T = sorted(rng.choice(right, size=nt, replace=False).tolist()) if nt < k else right
    elif layout in ("random", "face"):
        pool = list(range(k * k)) if layout == "random" else grid_boundary(k)
        ns = 2 if num_sources is None else num_sources
        nt = 2 if num_sinks is None else num_sinks
        if ns + nt > len(pool):
            raise ValueError("too many terminals for the layout")
        pick = rng.choice(pool, size=ns + nt, replace=False).tolist()
        S, T = sorted(pick[:ns]), sorted(pick[ns:])
    else:
        raise ValueError(f"unknown layout {layout!r}")
    coords = np.array([(j, -i) for i in range(k) for j in range(k)], dtype=float)
    return Instance(g, cap, tuple(S), tuple(T), coords)


def random_triangulation(n: int, rng: np.random.Generator) -> PlanarGraph:
    """Stacked triangulation: each new vertex goes into a uniformly chosen face
    and is joined to its three corners."""
    if n < 1:
        raise ValueError("need at least one vertex")
    if n == 1:
        return build_from_rotation([[]])
    if n == 2:
        return build_from_rotation([[1], [0]])
    base = build_from_rotation([[1, 2], [2, 0], [0, 1]])
    emb = Embedding(base)
    faces = [base.faces[f][0] for f in range(base.num_faces)]
    for _ in range(n - 3):
        i = int(rng.integers(len(faces)))
        face = emb.face_darts(faces[i])
        x = emb.add_vertex()
        out = []
        for d in face:
            before_x = out[-1] if out else None
            e = emb.insert_edge(x, before_x, emb.tail[d], d)
            out.append(2 * e)
        faces[i] = out[0]
        faces.extend(out[1:])
    return emb.freeze()


def _delete_edges(g: PlanarGraph, rng: np.random.Generator, fraction: float) -> PlanarGraph:
    """Drop a random ``fraction`` of the non-tree edges of a random spanning tree."""
    m = g.num_edges
    order = rng.permutation(m).tolist()
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    t = g.tail
    tree = set()
    for e in order:
        a, b = find(t[2 * e]), find(t[2 * e + 1])
        if a != b:
            parent[a] = b
            tree.add(e)
    extra = [e for e in range(m) if e not in tree]
    drop = set(rng.choice(extra, size=int(fraction * len(extra)), replace=False).tolist()) if extra else set()
    keep = [e for e in range(m) if e not in drop]
    new_id = {e: k for k, e in enumerate(keep)}
    edges = [(t[2 * e], t[2 * e + 1]) for e in keep]
    rotation = [[new_id[d // 2] for d in rot if d // 2 in new_id] for rot in g.rotation]
    return build_from_rotation(rotation, edges)


def gen_random_planar(n: int, seed: int = 0, num_sources: int = 2, num_sinks: int = 2,
                      capacities=(0, 20), delete_fraction: float = 0.0) -> Instance:
    """Random connected plane graph on ``n`` vertices with random terminals.

    Starts from a stacked triangulation and optionally deletes a fraction of
    the edges outside a random spanning tree.
    """
    rng = np.random.default_rng(seed)
    g = random_triangulation(n, rng)
    if delete_fraction > 0:
        g = _delete_edges(g, rng, delete_fraction)
    cap = _capacities(rng, g.num_darts, capacities)
    if num_sources + num_sinks > n:
        raise ValueError("more terminals than vertices")
    pick = rng.choice(n, size=num_sources + num_sinks, replace=False).tolist()
    return Instance(g, cap, tuple(sorted(pick[:num_sources])), tuple(sorted(pick[num_sources:])))


def same_face_pair(g: PlanarGraph, rng: np.random.Generator) -> tuple[int, int]:
    """Two distinct vertices of a random face."""
    while True:
        f = int(rng.integers(g.num_faces))
        vs = sorted(set(g.face_vertices(f)))
        if len(vs) >= 2:
            s, t = rng.choice(vs, size=2, replace=False).tolist()
            return int(s), int(t)
