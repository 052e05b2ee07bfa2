"""Meshed metric surfaces, quadrilateral frames and curve-family specs.

A :class:`MetricMesh` is a polygonal disk whose edges carry a length (the
one-dimensional measure) and whose faces carry an area (the two-dimensional
measure). Reference-plane coordinates are kept for construction and
reporting only; every metric quantity is read from ``lengths`` and
``face_areas``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy import integrate
from scipy.sparse.csgraph import connected_components, dijkstra, maximum_flow


class MeshError(ValueError):
    """Raised when a mesh or frame violates its structural invariants."""


class NoSeparatingCut(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MetricMesh:
    """Vertices, edges with lengths and faces with areas.

    Parameters
    ----------
    points : (V, 2) array
        Reference coordinates.
    edges : (E, 2) int array
        Endpoint pairs, stored with ``i < j``.
    lengths : (E,) array
        Nonnegative edge lengths.
    faces : tuple of vertex cycles
        Counterclockwise vertex cycles.
    face_areas : (F,) array
        Nonnegative face areas.

    Notes
    -----
    ``edge_area[e]`` is half the area of every face bordering ``e``. This is
    the diamond (Hodge) weight of the edge; with it, a density living only on
    edges of one orientation integrates to the full area, which is what makes
    the discrete extremal length of a grid rectangle equal its side ratio.
    Consequently ``edge_area.sum() == 0.5 * sum(len(f) * area(f))``.
    """

    points: np.ndarray
    edges: np.ndarray
    lengths: np.ndarray
    faces: tuple
    face_areas: np.ndarray
    edge_faces: np.ndarray = field(init=False, repr=False)
    edge_area: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        edges = np.sort(edges, axis=1)
        lengths = np.asarray(self.lengths, dtype=float).reshape(-1)
        faces = tuple(tuple(int(v) for v in f) for f in self.faces)
        areas = np.asarray(self.face_areas, dtype=float).reshape(-1)
        nv = len(pts)

        if len(lengths) != len(edges):
            raise MeshError("lengths and edges differ in size")
        if len(areas) != len(faces):
            raise MeshError("face_areas and faces differ in size")
        if len(edges) and (edges.min() < 0 or edges.max() >= nv):
            raise MeshError("edge endpoint out of range")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise MeshError("loop edge")
        if not np.all(np.isfinite(lengths)) or np.any(lengths < 0):
            raise MeshError("edge lengths must be finite and nonnegative")
        if not np.all(np.isfinite(areas)) or np.any(areas < 0):
            raise MeshError("face areas must be finite and nonnegative")

        index = {}
        for e, (i, j) in enumerate(edges.tolist()):
            if (i, j) in index:
                raise MeshError(f"duplicate edge {(i, j)}")
            index[(i, j)] = e

        edge_faces = np.full((len(edges), 2), -1, dtype=np.int64)
        edge_area = np.zeros(len(edges))
        face_edges = []
        for f, cyc in enumerate(faces):
            if len(cyc) < 3:
                raise MeshError(f"face {f} has fewer than 3 vertices")
            ids = []
            for k in range(len(cyc)):
                a, b = cyc[k], cyc[(k + 1) % len(cyc)]
                key = (a, b) if a < b else (b, a)
                e = index.get(key)
                if e is None:
                    raise MeshError(f"face {f} uses missing edge {key}")
                slot = 0 if edge_faces[e, 0] < 0 else 1
                if edge_faces[e, slot] >= 0:
                    raise MeshError(f"edge {key} borders more than two faces")
                edge_faces[e, slot] = f
                edge_area[e] += 0.5 * areas[f]
                ids.append(e)
            face_edges.append(tuple(ids))

        for name, val in (("points", pts), ("edges", edges), ("lengths", lengths),
                          ("faces", faces), ("face_areas", areas),
                          ("edge_faces", edge_faces), ("edge_area", edge_area)):
            if isinstance(val, np.ndarray):
                val.setflags(write=False)
            object.__setattr__(self, name, val)
        object.__setattr__(self, "_edge_index", index)
        object.__setattr__(self, "_face_edges", tuple(face_edges))

        if nv and connected_components(self.graph(np.ones(len(edges))), directed=False)[0] != 1:
            raise MeshError("1-skeleton is not connected")

    # -- sizes -----------------------------------------------------------
    @property
    def n_vertices(self) -> int:
        return len(self.points)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def total_area(self) -> float:
        return float(self.face_areas.sum())

    @property
    def face_edges(self) -> tuple:
        """Edge ids of each face, in cycle order."""
        return self._face_edges

    def edge_id(self, a: int, b: int) -> int:
        return self._edge_index[(a, b) if a < b else (b, a)]

    def has_edge(self, a: int, b: int) -> bool:
        return ((a, b) if a < b else (b, a)) in self._edge_index

    # -- derived geometry ------------------------------------------------
    @cached_property
    def dual_lengths(self) -> np.ndarray:
        """Dual-edge length ``(A_left + A_right) / (2 * length)``; 0 on zero-length edges."""
        out = np.zeros(self.n_edges)
        pos = self.lengths > 0
        out[pos] = self.edge_area[pos] / self.lengths[pos]
        return out

    @cached_property
    def is_boundary_edge(self) -> np.ndarray:
        return (self.edge_faces[:, 1] < 0) & (self.edge_faces[:, 0] >= 0)

    @cached_property
    def boundary_cycle(self) -> tuple:
        """Boundary vertices in counterclockwise order, starting at the smallest id."""
        bedges = self.edges[self.is_boundary_edge]
        if len(bedges) == 0:
            raise MeshError("mesh has no boundary")
        # orientation: a face lists its boundary edge counterclockwise
        succ = {}
        for e in np.flatnonzero(self.is_boundary_edge):
            f = self.edge_faces[e, 0]
            cyc = self.faces[f]
            i, j = self.edges[e]
            for k in range(len(cyc)):
                a, b = cyc[k], cyc[(k + 1) % len(cyc)]
                if {a, b} == {i, j}:
                    if a in succ:
                        raise MeshError("boundary is not a simple cycle")
                    succ[a] = b
                    break
        start = min(succ)
        cycle = [start]
        while True:
            nxt = succ[cycle[-1]]
            if nxt == start:
                break
            if len(cycle) > len(succ):
                raise MeshError("boundary is not a simple cycle")
            cycle.append(nxt)
        if len(cycle) != len(succ):
            raise MeshError("boundary has more than one component")
        return tuple(cycle)

    @cached_property
    def boundary_vertices(self) -> frozenset:
        return frozenset(self.boundary_cycle)

    @cached_property
    def neighbors(self) -> tuple:
        nb = [[] for _ in range(self.n_vertices)]
        for e, (i, j) in enumerate(self.edges.tolist()):
            nb[i].append((j, e))
            nb[j].append((i, e))
        return tuple(tuple(sorted(x)) for x in nb)

    def graph(self, weights, edge_mask=None) -> sp.csr_matrix:
        """Symmetric sparse adjacency with the given edge weights.

        Zero weights stay explicit entries, so scipy's graph routines still
        treat those edges as present.
        """
        w = np.broadcast_to(np.asarray(weights, dtype=float), (self.n_edges,))
        i, j = self.edges[:, 0], self.edges[:, 1]
        if edge_mask is not None:
            i, j, w = i[edge_mask], j[edge_mask], w[edge_mask]
        n = self.n_vertices
        return sp.csr_matrix((np.r_[w, w], (np.r_[i, j], np.r_[j, i])), shape=(n, n))

    def distances(self, sources, weights=None, limit=np.inf) -> np.ndarray:
        """Multi-source shortest-path distances (edge lengths by default)."""
        w = self.lengths if weights is None else weights
        src = np.asarray(sorted(set(int(s) for s in sources)), dtype=np.int64)
        return dijkstra(self.graph(w), directed=False, indices=src, min_only=True, limit=limit)

    def components(self, edge_mask, vertex_mask=None) -> np.ndarray:
        """Component labels of the subgraph of edges in ``edge_mask``.

        Vertices outside ``vertex_mask`` get label -1.
        """
        mask = np.asarray(edge_mask, dtype=bool)
        if vertex_mask is not None:
            vm = np.asarray(vertex_mask, dtype=bool)
            mask = mask & vm[self.edges[:, 0]] & vm[self.edges[:, 1]]
        _, labels = connected_components(self.graph(np.ones(self.n_edges), mask), directed=False)
        if vertex_mask is not None:
            labels = np.where(vm, labels, -1)
        return labels

    def with_metric(self, lengths=None, face_areas=None) -> "MetricMesh":
        """Copy with replaced lengths and/or areas (combinatorics unchanged)."""
        return MetricMesh(
            self.points, self.edges,
            self.lengths if lengths is None else lengths,
            self.faces,
            self.face_areas if face_areas is None else face_areas,
        )

    def scaled(self, c: float) -> "MetricMesh":
        return self.with_metric(self.lengths * c, self.face_areas * c * c)


@dataclass(frozen=True)
class QuadFrame:
    """Four boundary arcs of a quadrilateral in counterclockwise cyclic order."""

    zeta1: tuple
    zeta2: tuple
    zeta3: tuple
    zeta4: tuple

    def __post_init__(self):
        for name in ("zeta1", "zeta2", "zeta3", "zeta4"):
            object.__setattr__(self, name, tuple(int(v) for v in getattr(self, name)))

    @property
    def arcs(self) -> tuple:
        return (self.zeta1, self.zeta2, self.zeta3, self.zeta4)

    def arc(self, k: int) -> tuple:
        """Arc ``k`` for ``k`` in 1..4."""
        return self.arcs[k - 1]

    def arc_edges(self, mesh: MetricMesh, k: int) -> np.ndarray:
        arc = self.arc(k)
        return np.array([mesh.edge_id(a, b) for a, b in zip(arc[:-1], arc[1:])], dtype=np.int64)

    def arc_length(self, mesh: MetricMesh, k: int) -> float:
        return float(mesh.lengths[self.arc_edges(mesh, k)].sum())

    def validate(self, mesh: MetricMesh) -> None:
        arcs = self.arcs
        for k, arc in enumerate(arcs, 1):
            if len(arc) < 2:
                raise MeshError(f"zeta{k} has fewer than two vertices")
            for a, b in zip(arc[:-1], arc[1:]):
                if not mesh.has_edge(a, b) or not mesh.is_boundary_edge[mesh.edge_id(a, b)]:
                    raise MeshError(f"zeta{k} does not follow boundary edges")
            if self.arc_length(mesh, k) <= 0:
                raise MeshError(f"zeta{k} has zero length")
        for k in range(4):
            if arcs[k][-1] != arcs[(k + 1) % 4][0]:
                raise MeshError(f"zeta{k + 1} and zeta{(k + 1) % 4 + 1} do not share an endpoint")
            if len(set(arcs[k]) & set(arcs[(k + 1) % 4])) != 1:
                raise MeshError(f"zeta{k + 1} and zeta{(k + 1) % 4 + 1} overlap")
        for k in range(2):
            if set(arcs[k]) & set(arcs[k + 2]):
                raise MeshError(f"zeta{k + 1} and zeta{k + 3} intersect")
        walk = [v for arc in arcs for v in arc[:-1]]
        if len(walk) != len(set(walk)) or set(walk) != mesh.boundary_vertices:
            raise MeshError("frame arcs do not cover the boundary cycle")

    def arc_of_edge(self, mesh: MetricMesh) -> np.ndarray:
        """Per-edge arc number (1..4), 0 for edges not on the boundary."""
        out = np.zeros(mesh.n_edges, dtype=np.int64)
        for k in range(1, 5):
            out[self.arc_edges(mesh, k)] = k
        return out


@dataclass(frozen=True)
class FamilySpec:
    """Curves running from ``source`` to ``sink`` through ``ambient``.

    ``ambient=None`` means every vertex. Source and sink vertices are always
    allowed as path endpoints.
    """

    source: frozenset
    sink: frozenset
    ambient: frozenset | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "source", frozenset(int(v) for v in self.source))
        object.__setattr__(self, "sink", frozenset(int(v) for v in self.sink))
        if self.ambient is not None:
            object.__setattr__(self, "ambient", frozenset(int(v) for v in self.ambient))
        if not self.source or not self.sink:
            raise ValueError("source and sink must be nonempty")
        if self.source & self.sink:
            raise ValueError("source and sink must be disjoint")

    @classmethod
    def between_arcs(cls, frame: QuadFrame, i: int, j: int, ambient=None) -> "FamilySpec":
        if i == j:
            raise ValueError("source arc equals sink arc")
        return cls(frozenset(frame.arc(i)), frozenset(frame.arc(j)), ambient, f"zeta{i}-zeta{j}")

    @classmethod
    def gamma1(cls, frame: QuadFrame) -> "FamilySpec":
        return cls.between_arcs(frame, 1, 3)

    @classmethod
    def gamma2(cls, frame: QuadFrame) -> "FamilySpec":
        return cls.between_arcs(frame, 2, 4)

    def vertex_mask(self, n: int) -> np.ndarray:
        if self.ambient is None:
            return np.ones(n, dtype=bool)
        m = np.zeros(n, dtype=bool)
        m[list(self.ambient | self.source | self.sink)] = True
        return m

    def edge_mask(self, mesh: MetricMesh) -> np.ndarray:
        """Edges a family curve may use (no edge joins two sink or two source vertices)."""
        vm = self.vertex_mask(mesh.n_vertices)
        i, j = mesh.edges[:, 0], mesh.edges[:, 1]
        mask = vm[i] & vm[j]
        src = np.zeros(mesh.n_vertices, dtype=bool)
        src[list(self.source)] = True
        snk = np.zeros(mesh.n_vertices, dtype=bool)
        snk[list(self.sink)] = True
        return mask & ~(src[i] & src[j]) & ~(snk[i] & snk[j])


# -- builders --------------------------------------------------------------

def _grid(x0, y0, width, height, nx, ny):
    xs = x0 + width * np.arange(nx + 1) / nx
    ys = y0 + height * np.arange(ny + 1) / ny
    X, Y = np.meshgrid(xs, ys)
    points = np.column_stack([X.ravel(), Y.ravel()])
    vid = np.arange((nx + 1) * (ny + 1)).reshape(ny + 1, nx + 1)
    horiz = np.column_stack([vid[:, :-1].ravel(), vid[:, 1:].ravel()])
    vert = np.column_stack([vid[:-1, :].ravel(), vid[1:, :].ravel()])
    edges = np.vstack([horiz, vert])
    quads = np.column_stack([vid[:-1, :-1].ravel(), vid[:-1, 1:].ravel(),
                             vid[1:, 1:].ravel(), vid[1:, :-1].ravel()])
    frame = QuadFrame(
        zeta1=vid[0, :],
        zeta2=vid[:, -1],
        zeta3=vid[-1, ::-1],
        zeta4=vid[::-1, 0],
    )
    return points, edges, quads, frame


def _cells(size: float, n: int) -> int:
    return max(1, int(round(size * n)))


def build_rectangle(width: float, height: float, n: int):
    """Axis-aligned Euclidean grid on ``[0, width] x [0, height]``.

    ``n`` is the number of cells per unit length. Returns ``(mesh, frame)``
    with zeta1 bottom, zeta2 right, zeta3 top, zeta4 left.
    """
    return build_conformal(width, height, n, None)


def build_conformal(width: float, height: float, n: int, weight: Callable | float | None):
    """Grid rectangle carrying the conformal metric ``weight * |dz|``.

    Edge lengths use the weight at the edge midpoint, face areas the squared
    weight at the face centroid. ``weight`` is a vectorized callable
    ``w(x, y)``, a positive constant, or ``None`` for the flat metric.
    """
    if not (width > 0 and height > 0):
        raise ValueError("width and height must be positive")
    if n < 2:
        raise ValueError("n must be at least 2")
    nx, ny = _cells(width, n), _cells(height, n)
    points, edges, quads, frame = _grid(0.0, 0.0, width, height, nx, ny)
    p, q = points[edges[:, 0]], points[edges[:, 1]]
    lengths = np.hypot(*(q - p).T)
    areas = np.full(len(quads), (width / nx) * (height / ny))
    if weight is not None:
        mid = 0.5 * (p + q)
        cen = points[quads].mean(axis=1)
        we = _sample_weight(weight, mid)
        wf = _sample_weight(weight, cen)
        lengths = lengths * we
        areas = areas * wf * wf
    mesh = MetricMesh(points, edges, lengths, [tuple(f) for f in quads.tolist()], areas)
    return mesh, frame


def _sample_weight(weight, xy):
    if callable(weight):
        w = np.asarray(weight(xy[:, 0], xy[:, 1]), dtype=float)
        w = np.broadcast_to(w, (len(xy),))
    else:
        w = np.full(len(xy), float(weight))
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise ValueError("conformal weight must be positive and finite")
    return w


def _outside_length(p, q, r):
    """Length of the part of segment pq outside the centered disk of radius r."""
    d = q - p
    L = np.hypot(*d)
    a = d @ d
    b = 2 * p @ d
    c = p @ p - r * r
    disc = b * b - 4 * a * c
    if disc <= 0:
        return L
    s = np.sqrt(disc)
    t0 = max(0.0, (-b - s) / (2 * a))
    t1 = min(1.0, (-b + s) / (2 * a))
    return L * (1.0 - max(0.0, t1 - t0))


def _disk_rect_area(x0, x1, y0, y1, r):
    """Area of ``[x0, x1] x [y0, y1]`` inside the centered disk of radius r."""
    lo, hi = max(x0, -r), min(x1, r)
    if hi <= lo:
        return 0.0

    def chord(x):
        s = np.sqrt(max(r * r - x * x, 0.0))
        return max(0.0, min(y1, s) - max(y0, -s))

    kinks = [sgn * np.sqrt(r * r - y * y) for y in (y0, y1) if abs(y) < r for sgn in (-1, 1)]
    brk = sorted({lo, hi, *[x for x in kinks if lo < x < hi]})
    return sum(integrate.quad(chord, a, b, epsabs=1e-14, epsrel=1e-12)[0]
               for a, b in zip(brk[:-1], brk[1:]))


def build_collapsed_disk(outer_half_width: float, n: int, collapse_radius: float):
    """Square ``[-a, a]^2`` with the centered closed disk collapsed to a point.

    Edges inside the disk get length 0, faces inside get area 0, and elements
    cut by the circle keep only their part outside the disk. ``n`` is the
    number of cells per unit length, as for :func:`build_rectangle`.
    """
    a, r = float(outer_half_width), float(collapse_radius)
    if not (0 < r < a):
        raise ValueError("need 0 < collapse_radius < outer_half_width")
    if n < 2:
        raise ValueError("n must be at least 2")
    m = _cells(2 * a, n)
    h = 2 * a / m
    if r >= a - h:
        raise ValueError("collapse disk touches the boundary arcs")
    points, edges, quads, frame = _grid(-a, -a, 2 * a, 2 * a, m, m)
    lengths = np.array([_outside_length(points[i], points[j], r) for i, j in edges])
    areas = np.empty(len(quads))
    for f, quad in enumerate(quads):
        (x0, y0), (x1, y1) = points[quad[0]], points[quad[2]]
        full = (x1 - x0) * (y1 - y0)
        corner = np.hypot(np.maximum(abs(x0), abs(x1)), np.maximum(abs(y0), abs(y1)))
        nearest = np.hypot(max(0.0, x0, -x1), max(0.0, y0, -y1))
        if nearest >= r:
            areas[f] = full
        elif corner <= r:
            areas[f] = 0.0
        else:
            areas[f] = max(0.0, full - _disk_rect_area(x0, x1, y0, y1, r))
    mesh = MetricMesh(points, edges, lengths, [tuple(f) for f in quads.tolist()], areas)
    return mesh, frame


def sub_rectangle(mesh: MetricMesh, x0: float, x1: float, y0: float, y1: float):
    """Submesh of the faces lying in ``[x0, x1] x [y0, y1]`` (reference coordinates).

    The frame runs counterclockwise from the corner nearest ``(x0, y0)``:
    bottom, right, top, left. Returns ``(mesh, frame, vertex_ids)`` where
    ``vertex_ids`` maps new vertex numbers to the old ones.
    """
    pts = mesh.points
    eps = 1e-9 * max(1.0, float(np.abs(pts).max()))
    inside = ((pts[:, 0] >= x0 - eps) & (pts[:, 0] <= x1 + eps)
              & (pts[:, 1] >= y0 - eps) & (pts[:, 1] <= y1 + eps))
    keep = [f for f in range(mesh.n_faces) if inside[list(mesh.faces[f])].all()]
    if not keep:
        raise MeshError("window contains no face")
    old = np.unique(np.concatenate([np.asarray(mesh.faces[f]) for f in keep]))
    new_of = {int(v): k for k, v in enumerate(old)}
    eids = sorted({e for f in keep for e in mesh.face_edges[f]})
    edges = np.array([[new_of[int(a)], new_of[int(b)]] for a, b in mesh.edges[eids]])
    faces = [tuple(new_of[v] for v in mesh.faces[f]) for f in keep]
    sub = MetricMesh(pts[old], edges, mesh.lengths[eids], faces, mesh.face_areas[keep])
    cyc = list(sub.boundary_cycle)
    corners = []
    for cx, cy in ((x0, y0), (x1, y0), (x1, y1), (x0, y1)):
        d = np.hypot(sub.points[cyc, 0] - cx, sub.points[cyc, 1] - cy)
        corners.append(cyc[int(np.argmin(d))])
    k = cyc.index(corners[0])
    cyc = cyc[k:] + cyc[:k]
    pos = [cyc.index(c) for c in corners] + [len(cyc)]
    ring = cyc + [cyc[0]]
    arcs = [ring[pos[i]:pos[i + 1] + 1] for i in range(4)]
    frame = QuadFrame(*arcs)
    frame.validate(sub)
    return sub, frame, old


# -- topology ---------------------------------------------------------------

@dataclass(frozen=True)
class SeparatingCut:
    """An edge cut and its organization through the dual graph.

    ``edges`` are ordered along the dual walk, ``faces`` are the faces
    entered between consecutive cut edges. ``boundary_arcs`` lists the arc
    numbers of the cut's boundary edges (empty for a dual cycle).
    """

    edges: tuple
    faces: tuple
    closed: bool
    simple: bool
    connected: bool
    boundary_arcs: tuple


def _order_dual(mesh: MetricMesh, cut_edges: Sequence[int]):
    """Walk cut edges through shared faces. Returns (edges, faces, closed, simple, connected)."""
    cut = sorted(int(e) for e in cut_edges)
    if not cut:
        return (), (), False, True, True
    face_cut = {}
    for e in cut:
        for f in mesh.edge_faces[e]:
            if f >= 0:
                face_cut.setdefault(int(f), []).append(e)
    simple = all(len(v) == 2 for v in face_cut.values())
    nbrs = {e: [] for e in cut}
    for f, es in sorted(face_cut.items()):
        for e in es:
            for g in es:
                if g != e:
                    nbrs[e].append((g, f))
    ends = [e for e in cut if mesh.is_boundary_edge[e]]
    start = ends[0] if ends else cut[0]
    order, faces, seen = [start], [], {start}
    used_faces = set()
    cur = start
    while True:
        step = next(((g, f) for g, f in nbrs[cur] if g not in seen and f not in used_faces), None)
        if step is None:
            break
        g, f = step
        faces.append(f)
        used_faces.add(f)
        order.append(g)
        seen.add(g)
        cur = g
    closed = not ends and len(order) > 2 and any(g == start for g, _ in nbrs[cur])
    connected = len(seen) == len(cut)
    if not connected:
        # remaining edges appended in id order so every cut edge is reported
        order += [e for e in cut if e not in seen]
    return tuple(order), tuple(faces), closed, simple and connected, connected


def separating_cut(mesh: MetricMesh, side_a: Iterable[int], side_b: Iterable[int],
                   forbidden, frame: QuadFrame | None = None) -> SeparatingCut:
    """Minimum-cardinality cut among ``forbidden`` edges separating two vertex sets.

    ``forbidden`` is a boolean edge mask or a predicate ``f(mesh, e) -> bool``
    marking the edges that may be cut. Raises :class:`NoSeparatingCut` when
    removing every forbidden edge still leaves the sides connected.
    """
    A = sorted(set(int(v) for v in side_a))
    B = sorted(set(int(v) for v in side_b))
    if not A or not B:
        raise ValueError("sides must be nonempty")
    if set(A) & set(B):
        raise ValueError("sides must be disjoint")
    if callable(forbidden):
        mask = np.array([bool(forbidden(mesh, e)) for e in range(mesh.n_edges)])
    else:
        mask = np.asarray(forbidden, dtype=bool)

    labels = mesh.components(~mask)
    if set(labels[A]) & set(labels[B]):
        raise NoSeparatingCut("no separating cut")

    nv = mesh.n_vertices
    s, t = nv, nv + 1
    big = mesh.n_edges + 1
    cap = np.where(mask, 1, big).astype(np.int32)
    i, j = mesh.edges[:, 0], mesh.edges[:, 1]
    rows = np.r_[i, j, np.full(len(A), s), B]
    cols = np.r_[j, i, A, np.full(len(B), t)]
    data = np.r_[cap, cap, np.full(len(A) + len(B), big, dtype=np.int32)].astype(np.int32)
    g = sp.csr_matrix((data, (rows, cols)), shape=(nv + 2, nv + 2))
    g.sum_duplicates()
    flow = maximum_flow(g, s, t).flow.tocsr()
    residual = (g - flow).tocsr()
    residual.data = np.where(residual.data > 0, residual.data, 0)
    residual.eliminate_zeros()
    reach = ~np.isinf(dijkstra(residual, directed=True, indices=s, unweighted=True))
    cut = np.flatnonzero(reach[i] != reach[j])
    order, faces, closed, simple, connected = _order_dual(mesh, cut)
    arcs = ()
    if frame is not None:
        arc_of = frame.arc_of_edge(mesh)
        arcs = tuple(sorted({int(arc_of[e]) for e in order if arc_of[e] > 0}))
    return SeparatingCut(order, faces, closed, simple, connected, arcs)


def ball(mesh: MetricMesh, center: int, r: float) -> frozenset:
    """Vertices within metric distance ``r`` of ``center``."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    d = mesh.distances([center])
    return frozenset(np.flatnonzero(d <= r).tolist())


def nearest_vertex(mesh: MetricMesh, xy) -> int:
    """Vertex whose reference coordinates are closest to ``xy``."""
    d = np.hypot(*(mesh.points - np.asarray(xy, dtype=float)).T)
    return int(np.argmin(d))
