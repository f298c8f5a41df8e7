"""Plane graphs stored as rotation systems.

Every undirected edge ``k`` is a pair of darts ``2k`` (u -> v) and ``2k + 1``
(v -> u), so ``twin(d) == d ^ 1``.  The embedding is the cyclic order of the
darts leaving each vertex.  Faces are traced with
``face_next(d) = rot_next(twin(d))``.

Graphs are treated as immutable.  Surgery (inserting vertices or edges inside
a face, triangulating) goes through :class:`Embedding`, a small mutable
builder with linked rotations, and returns a fresh :class:`PlanarGraph`.
Existing vertex, dart and edge ids are never renumbered by surgery: new
objects get the next free ids.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class EmbeddingError(ValueError):
    """Raised for rotation systems that do not describe a connected plane graph."""


def twin(d: int) -> int:
    return d ^ 1


class PlanarGraph:
    """A connected graph with a fixed combinatorial planar embedding.

    Parameters
    ----------
    n : int
        Number of vertices.
    tail : sequence of int
        Origin vertex of every dart; length is twice the edge count.
    rotation : sequence of sequences
        ``rotation[v]`` lists the darts leaving ``v`` in cyclic order.
    check : bool
        Verify the twin pairing, the face partition, Euler's formula and
        connectivity.  Internal callers that just built the graph from a
        valid one may skip it.
    """

    __slots__ = ("n", "tail", "rotation", "_pos", "face_of", "faces", "_links")

    def __init__(self, n: int, tail: Sequence[int], rotation: Sequence[Sequence[int]],
                 check: bool = True):
        self.n = int(n)
        self.tail = list(tail)
        self.rotation = [list(r) for r in rotation]
        if len(self.tail) % 2:
            raise EmbeddingError("odd number of darts")
        if len(self.rotation) != self.n:
            raise EmbeddingError("rotation must list every vertex")
        pos = [-1] * len(self.tail)
        for v, rot in enumerate(self.rotation):
            for i, d in enumerate(rot):
                if not 0 <= d < len(self.tail) or pos[d] != -1 or self.tail[d] != v:
                    raise EmbeddingError(f"dart {d} misplaced in rotation of vertex {v}")
                pos[d] = i
        if -1 in pos:
            raise EmbeddingError(f"dart {pos.index(-1)} missing from the rotation system")
        self._pos = pos
        self._trace_faces()
        if check:
            self.validate()

    def rotation_links(self) -> tuple[np.ndarray, np.ndarray]:
        """Next and previous dart around the tail of every dart (cached)."""
        links = getattr(self, "_links", None)
        if links is not None:
            return links
        m = len(self.tail)
        succ = np.zeros(m, dtype=np.int64)
        pred = np.zeros(m, dtype=np.int64)
        if m:
            flat = np.fromiter((d for rot in self.rotation for d in rot), dtype=np.int64, count=m)
            lens = np.fromiter((len(r) for r in self.rotation), dtype=np.int64, count=self.n)
            start = np.repeat(np.cumsum(lens) - lens, lens)
            size = np.repeat(lens, lens)
            i = np.arange(m) - start
            succ[flat] = flat[start + (i + 1) % size]
            pred[flat] = flat[start + (i - 1) % size]
        self._links = (succ, pred)
        return succ, pred

    # -- basic structure -------------------------------------------------

    @property
    def num_darts(self) -> int:
        return len(self.tail)

    @property
    def num_edges(self) -> int:
        return len(self.tail) // 2

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    def head(self, d: int) -> int:
        return self.tail[d ^ 1]

    @property
    def heads(self) -> list[int]:
        t = self.tail
        return [t[d ^ 1] for d in range(len(t))]

    def endpoints(self, e: int) -> tuple[int, int]:
        return self.tail[2 * e], self.tail[2 * e + 1]

    def edges(self) -> list[tuple[int, int]]:
        t = self.tail
        return [(t[2 * e], t[2 * e + 1]) for e in range(len(t) // 2)]

    def rot_next(self, d: int) -> int:
        rot = self.rotation[self.tail[d]]
        return rot[(self._pos[d] + 1) % len(rot)]

    def rot_prev(self, d: int) -> int:
        rot = self.rotation[self.tail[d]]
        return rot[self._pos[d] - 1]

    def face_next(self, d: int) -> int:
        return self.rot_next(d ^ 1)

    def degree(self, v: int) -> int:
        return len(self.rotation[v])

    def neighbors(self, v: int) -> list[int]:
        t = self.tail
        return [t[d ^ 1] for d in self.rotation[v]]

    def face_vertices(self, f: int) -> list[int]:
        """Vertices met along the boundary walk of face ``f`` (with repeats)."""
        return [self.tail[d] for d in self.faces[f]]

    def faces_at(self, v: int) -> list[int]:
        """Faces incident to ``v``, one per corner, in rotation order."""
        return [self.face_of[d] for d in self.rotation[v]]

    def common_faces(self, u: int, v: int) -> list[int]:
        fu = set(self.faces_at(u))
        return [f for f in dict.fromkeys(self.faces_at(v)) if f in fu]

    def corner(self, f: int, v: int) -> int:
        """The first dart of face ``f`` leaving ``v``."""
        for d in self.faces[f]:
            if self.tail[d] == v:
                return d
        raise EmbeddingError(f"vertex {v} is not on face {f}")

    def _trace_faces(self) -> None:
        face_of = [-1] * len(self.tail)
        faces: list[list[int]] = []
        for start in range(len(self.tail)):
            if face_of[start] != -1:
                continue
            fid = len(faces)
            cycle = []
            d = start
            while face_of[d] == -1:
                face_of[d] = fid
                cycle.append(d)
                d = self.face_next(d)
            if d != start:
                raise EmbeddingError("face tracing did not close up")
            faces.append(cycle)
        if not faces:
            # the single-vertex graph has one (dartless) face
            faces.append([])
        self.face_of = face_of
        self.faces = faces

    # -- checks ----------------------------------------------------------

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        seen = [False] * self.n
        seen[0] = True
        stack = [0]
        t = self.tail
        while stack:
            v = stack.pop()
            for d in self.rotation[v]:
                w = t[d ^ 1]
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        return all(seen)

    def validate(self) -> None:
        for d in range(0, len(self.tail), 2):
            if self.tail[d] == self.tail[d + 1]:
                raise EmbeddingError(f"edge {d // 2} is a self-loop")
        if not self.is_connected():
            raise EmbeddingError("graph is disconnected")
        chi = self.n - self.num_edges + self.num_faces
        if chi != 2:
            raise EmbeddingError(
                f"non-planar embedding: V - E + F = {chi} (genus {(2 - chi) // 2})")

    def is_triangulated(self) -> bool:
        t = self.tail
        for face in self.faces:
            if len(face) != 3 or len({t[d] for d in face}) != 3:
                return False
        return True

    def has_parallel_edges(self) -> bool:
        seen = set()
        for u, v in self.edges():
            key = (u, v) if u < v else (v, u)
            if key in seen:
                return True
            seen.add(key)
        return False

    def __repr__(self) -> str:
        return f"PlanarGraph(n={self.n}, edges={self.num_edges}, faces={self.num_faces})"


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def build_from_rotation(rotation: Sequence[Sequence[int]],
                        edges: Sequence[tuple[int, int]] | None = None) -> PlanarGraph:
    """Build a plane graph from per-vertex cyclic adjacency lists.

    Without ``edges``, ``rotation[v]`` lists the *neighbours* of ``v`` in
    cyclic order and the graph must be simple; edges are numbered in order of
    first appearance.  With ``edges``, ``rotation[v]`` lists incident *edge
    ids* and ``edges[k] = (u, v)`` fixes the orientation of dart ``2k``.
    """
    n = len(rotation)
    if edges is None:
        edge_id: dict[tuple[int, int], int] = {}
        edge_list: list[tuple[int, int]] = []
        for u, nbrs in enumerate(rotation):
            for v in nbrs:
                if not 0 <= v < n:
                    raise EmbeddingError(f"vertex {u} lists unknown neighbour {v}")
                if v == u:
                    raise EmbeddingError(f"self-loop at vertex {u}")
                key = (min(u, v), max(u, v))
                if key not in edge_id:
                    edge_id[key] = len(edge_list)
                    edge_list.append(key)
        rot_edges = []
        for u, nbrs in enumerate(rotation):
            ids = [edge_id[(min(u, v), max(u, v))] for v in nbrs]
            if len(set(ids)) != len(ids):
                raise EmbeddingError(f"vertex {u} lists a neighbour twice")
            rot_edges.append(ids)
        edges = edge_list
        rotation = rot_edges

    m = len(edges)
    tail = [0] * (2 * m)
    for k, (u, v) in enumerate(edges):
        if not (0 <= u < n and 0 <= v < n):
            raise EmbeddingError(f"edge {k} has an endpoint out of range")
        if u == v:
            raise EmbeddingError(f"edge {k} is a self-loop")
        tail[2 * k] = u
        tail[2 * k + 1] = v
    seen = [0] * (2 * m)
    rot_darts = []
    for v, ids in enumerate(rotation):
        darts = []
        for k in ids:
            if not 0 <= k < m:
                raise EmbeddingError(f"vertex {v} lists unknown edge {k}")
            u0, v0 = edges[k]
            if v == u0:
                d = 2 * k
            elif v == v0:
                d = 2 * k + 1
            else:
                raise EmbeddingError(f"edge {k} is not incident to vertex {v}")
            if seen[d]:
                raise EmbeddingError(f"edge {k} listed twice at vertex {v}")
            seen[d] = 1
            darts.append(d)
        rot_darts.append(darts)
    if not all(seen):
        missing = seen.index(0)
        raise EmbeddingError(
            f"inconsistent twins: edge {missing // 2} missing at vertex {tail[missing]}")
    return PlanarGraph(n, tail, rot_darts)


class Embedding:
    """Mutable rotation system used to perform several insertions at once.

    New darts are inserted *before* a given dart in the rotation of their
    tail.  Inserting an edge between the corners ``cu`` (a dart leaving ``u``
    along face F) and ``cv`` (a dart leaving ``v`` along F) splits F in two.
    """

    def __init__(self, g: PlanarGraph):
        self.n = g.n
        self.tail = list(g.tail)
        succ, pred = g.rotation_links()
        self.succ = succ.tolist()
        self.pred = pred.tolist()
        # one dart per vertex to start the rotation walk from; keeps the order
        # of original darts stable in the frozen graph
        self.first = [rot[0] if rot else -1 for rot in g.rotation]

    @property
    def num_darts(self) -> int:
        return len(self.tail)

    def add_vertex(self) -> int:
        self.first.append(-1)
        self.n += 1
        return self.n - 1

    def face_next(self, d: int) -> int:
        return self.succ[d ^ 1]

    def face_darts(self, d: int) -> list[int]:
        out = [d]
        x = self.succ[d ^ 1]
        while x != d:
            out.append(x)
            x = self.succ[x ^ 1]
        return out

    def corner_in_face(self, d: int, v: int) -> int:
        """A dart leaving ``v`` on the face containing ``d``."""
        x = d
        while True:
            if self.tail[x] == v:
                return x
            x = self.succ[x ^ 1]
            if x == d:
                raise EmbeddingError(f"vertex {v} is not on the face of dart {d}")

    def _place(self, new: int, v: int, before: int | None) -> None:
        if before is None:
            if self.first[v] != -1:
                raise EmbeddingError(f"vertex {v} has darts; a corner is required")
            self.succ[new] = self.pred[new] = new
            self.first[v] = new
            return
        if self.tail[before] != v:
            raise EmbeddingError(f"dart {before} does not leave vertex {v}")
        p = self.pred[before]
        self.succ[p] = new
        self.pred[new] = p
        self.succ[new] = before
        self.pred[before] = new

    def insert_edge(self, u: int, before_u: int | None, v: int, before_v: int | None) -> int:
        """Add edge u-v; dart u->v goes before ``before_u`` around ``u``."""
        if u == v:
            raise EmbeddingError("cannot add a self-loop")
        a = len(self.tail)
        self.tail.extend((u, v))
        self.succ.extend((0, 0))
        self.pred.extend((0, 0))
        self._place(a, u, before_u)
        self._place(a + 1, v, before_v)
        return a // 2

    def rotation(self) -> list[list[int]]:
        rot = []
        for v in range(self.n):
            d0 = self.first[v]
            if d0 == -1:
                rot.append([])
                continue
            lst = [d0]
            d = self.succ[d0]
            while d != d0:
                lst.append(d)
                d = self.succ[d]
            rot.append(lst)
        return rot

    def face_labels(self) -> tuple[list[int], int]:
        """Face id of every dart and the number of faces, without a full freeze."""
        face_of = [-1] * len(self.tail)
        nf = 0
        succ = self.succ
        for start in range(len(self.tail)):
            if face_of[start] != -1:
                continue
            d = start
            while face_of[d] == -1:
                face_of[d] = nf
                d = succ[d ^ 1]
            nf += 1
        return face_of, nf

    def freeze(self, check: bool = True) -> PlanarGraph:
        return PlanarGraph(self.n, self.tail, self.rotation(), check=check)


# ---------------------------------------------------------------------------
# surgery
# ---------------------------------------------------------------------------


def add_edge_in_face(g: PlanarGraph, f: int, u: int, v: int) -> tuple[PlanarGraph, int]:
    """Embed a new edge u-v through face ``f``.  Parallel edges are allowed."""
    if u == v:
        raise EmbeddingError("u and v must differ")
    cu = g.corner(f, u)
    cv = g.corner(f, v)
    emb = Embedding(g)
    e = emb.insert_edge(u, cu, v, cv)
    return emb.freeze(), e


def add_vertex_in_face(g: PlanarGraph, f: int, neighbors: Sequence[int]) -> tuple[PlanarGraph, int]:
    """Place a new vertex inside face ``f`` joined to each listed boundary vertex."""
    boundary = set(g.face_vertices(f))
    if g.num_darts == 0:
        boundary = {0}
    for w in neighbors:
        if w not in boundary:
            raise EmbeddingError(f"vertex {w} is not on face {f}")
    if len(set(neighbors)) != len(neighbors):
        raise EmbeddingError("neighbours must be distinct")
    emb = Embedding(g)
    x = emb.add_vertex()
    for i, w in enumerate(neighbors):
        if i == 0:
            cw = g.corner(f, w) if g.num_darts else None
            emb.insert_edge(x, None, w, cw)
            continue
        # look for a face around x that still reaches w
        d0 = emb.first[x]
        d = d0
        while True:
            try:
                cw = emb.corner_in_face(d, w)
                break
            except EmbeddingError:
                d = emb.succ[d]
                if d == d0:
                    raise
        emb.insert_edge(x, d, w, cw)
    return emb.freeze(), x


def triangulate(g: PlanarGraph) -> tuple[PlanarGraph, list[int]]:
    """Add edges (and, for faces with repeated vertices, apex vertices) until
    every face is a triangle on three distinct vertices.

    Original vertices, darts and their cyclic order are kept; new edges get
    ids ``g.num_edges, g.num_edges + 1, ...`` and are returned so callers can
    give them zero capacity.  The result has no parallel edges provided ``g``
    had none.  Graphs with fewer than 2 vertices are returned unchanged.
    """
    if g.n < 2:
        return g, []
    emb = Embedding(g)
    adj = set()
    for u, v in g.edges():
        adj.add((u, v) if u < v else (v, u))

    def connect(u, cu, v, cv):
        emb.insert_edge(u, cu, v, cv)
        adj.add((u, v) if u < v else (v, u))

    tail = emb.tail
    work = [list(face) for face in g.faces]
    while work:
        face = work.pop()
        k = len(face)
        verts = [tail[d] for d in face]
        if k == 3 and len(set(verts)) == 3:
            continue
        if k >= 4 and len(set(verts)) == k:
            # face walk d0..d_{k-1}; corner i leaves verts[i]
            i = 0
            a, b = verts[0], verts[2]
            if (min(a, b), max(a, b)) in adj:
                i = 1
                a, b = verts[1], verts[3]
            j = i + 2
            connect(a, face[i], b, face[j])
            new_a = len(tail) - 2
            # triangle keeps corners i, i+1 and the new dart b->a
            work.append([face[i], face[i + 1], new_a + 1])
            work.append(face[:i] + [new_a] + face[j:])
            continue
        # repeated boundary vertices (or a 2-cycle): apex joined to the first
        # corner of every distinct vertex
        x = emb.add_vertex()
        firsts = []
        seen = set()
        for idx, v in enumerate(verts):
            if v not in seen:
                seen.add(v)
                firsts.append(idx)
        new_darts = []  # (dart x->v_i, dart v_i->x) per first corner
        for idx in firsts:
            e = len(tail) // 2
            new_darts.append((2 * e, 2 * e + 1))
            # rotation at x runs against the boundary order
            before_x = new_darts[-2][0] if len(new_darts) > 1 else None
            connect(x, before_x, verts[idx], face[idx])
        for q, idx in enumerate(firsts):
            nxt = firsts[(q + 1) % len(firsts)]
            seg = face[idx:nxt] if nxt > idx else face[idx:] + face[:nxt]
            work.append([new_darts[q][0]] + seg + [new_darts[(q + 1) % len(firsts)][1]])
    out = emb.freeze()
    return out, list(range(g.num_edges, out.num_edges))


@dataclass(frozen=True)
class Piece:
    """An induced subgraph with maps back to its parent."""

    graph: PlanarGraph
    vertex_map: tuple[int, ...]  # piece vertex -> parent vertex
    dart_map: tuple[int, ...]  # piece dart -> parent dart

    @property
    def edge_map(self) -> np.ndarray:
        return np.asarray(self.dart_map[0::2], dtype=np.int64) // 2

    def vertex_index(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.vertex_map)}


def subgraph_piece(g: PlanarGraph, vertices: Iterable[int],
                   exclude_edges: Iterable[int] = ()) -> Piece:
    """Induced subgraph on ``vertices`` with the inherited embedding.

    Edges in ``exclude_edges`` are dropped.  The piece must be connected.
    Dart ``2k`` of the piece has the same orientation as its parent dart.
    """
    vs = sorted(set(vertices))
    if not vs:
        raise ValueError("empty vertex set")
    index = {v: i for i, v in enumerate(vs)}
    skip = set(exclude_edges)
    t = g.tail
    keep = [e for e in range(g.num_edges)
            if e not in skip and t[2 * e] in index and t[2 * e + 1] in index]
    new_dart = {}
    dart_map = []
    tail = []
    for k, e in enumerate(keep):
        new_dart[2 * e] = 2 * k
        new_dart[2 * e + 1] = 2 * k + 1
        dart_map.extend((2 * e, 2 * e + 1))
        tail.extend((index[t[2 * e]], index[t[2 * e + 1]]))
    rotation = [[new_dart[d] for d in g.rotation[v] if d in new_dart] for v in vs]
    return Piece(PlanarGraph(len(vs), tail, rotation), tuple(vs), tuple(dart_map))


def bfs_order(g: PlanarGraph, root: int) -> tuple[list[int], list[int], list[int]]:
    """BFS from ``root``: (order, depth, parent dart into each vertex; -1 at root)."""
    depth = [-1] * g.n
    parent = [-1] * g.n
    depth[root] = 0
    order = [root]
    q = deque([root])
    t = g.tail
    while q:
        v = q.popleft()
        for d in g.rotation[v]:
            w = t[d ^ 1]
            if depth[w] == -1:
                depth[w] = depth[v] + 1
                parent[w] = d
                order.append(w)
                q.append(w)
    return order, depth, parent
