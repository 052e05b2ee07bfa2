"""Paths inside edge subgraphs: injective extraction and double traversal."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.sparse.csgraph import dijkstra

from .surface import MetricMesh


class NotConnected(ValueError):
    pass


@dataclass(frozen=True)
class CurvePath:
    """A walk in the 1-skeleton.

    ``vertices`` has one more entry than ``edges``; ``length`` is the sum of
    the traversed edge lengths counted with multiplicity.
    """

    vertices: tuple
    edges: tuple
    length: float

    @property
    def injective(self) -> bool:
        return len(set(self.vertices)) == len(self.vertices)

    def multiplicity(self, n_edges: int) -> np.ndarray:
        return np.bincount(np.asarray(self.edges, dtype=np.int64), minlength=n_edges)

    @classmethod
    def from_vertices(cls, mesh: MetricMesh, verts) -> "CurvePath":
        verts = tuple(int(v) for v in verts)
        edges = tuple(mesh.edge_id(a, b) for a, b in zip(verts[:-1], verts[1:]))
        return cls(verts, edges, float(mesh.lengths[list(edges)].sum()) if edges else 0.0)


def _edge_mask(mesh: MetricMesh, subgraph) -> np.ndarray:
    sub = np.asarray(subgraph)
    if sub.dtype == bool:
        return sub.copy()
    mask = np.zeros(mesh.n_edges, dtype=bool)
    mask[sub.astype(np.int64)] = True
    return mask


def _subgraph_vertices(mesh, mask):
    return np.unique(mesh.edges[mask].ravel())


def _tree_path(pred, start, target):
    out = [target]
    while out[-1] != start:
        p = pred[out[-1]]
        if p < 0:
            raise NotConnected("not connected")
        out.append(int(p))
    return out[::-1]


def _geodesic(mesh, mask, x, y):
    """Shortest path in the subgraph; ties go to fewer edges, then smaller ids."""
    w = mesh.lengths + 1e-15
    d, pred = dijkstra(mesh.graph(w, mask), directed=False, indices=int(x),
                       return_predecessors=True)
    if not np.isfinite(d[y]):
        raise NotConnected("not connected")
    return _tree_path(pred, int(x), int(y)), d, pred


def extract_path(mesh: MetricMesh, subgraph, x: int, y: int) -> CurvePath:
    """Injective path from ``x`` to ``y`` using only subgraph edges.

    The path is a shortest one within the subgraph, so its length never
    exceeds the total length of the subgraph.
    """
    x, y = int(x), int(y)
    if x == y:
        return CurvePath((x,), (), 0.0)
    mask = _edge_mask(mesh, subgraph)
    verts, _, _ = _geodesic(mesh, mask, x, y)
    return CurvePath.from_vertices(mesh, verts)


def double_traversal(mesh: MetricMesh, subgraph, x: int, y: int) -> CurvePath:
    """Walk from ``x`` to ``y`` covering every subgraph edge, each at most twice.

    Starts from a geodesic ``x -> y`` and repeatedly splices in an
    out-and-back detour to the unvisited vertex farthest (in subgraph
    distance) from the covered part; leftover edges whose endpoints are both
    covered are then spliced in as doubled single-edge detours. The total
    length is at most twice the subgraph length.
    """
    x, y = int(x), int(y)
    mask = _edge_mask(mesh, subgraph)
    if not mask.any():
        if x == y:
            return CurvePath((x,), (), 0.0)
        raise NotConnected("empty subgraph")
    verts = _subgraph_vertices(mesh, mask)
    sub_edges = np.flatnonzero(mask)
    labels = mesh.components(mask)
    if len(set(labels[verts])) != 1:
        raise NotConnected("subgraph is not connected")
    if x not in set(verts.tolist()) or y not in set(verts.tolist()):
        raise NotConnected("endpoints outside the subgraph")

    w = mesh.lengths + 1e-15
    g = mesh.graph(w, mask)
    walk = [x] if x == y else _geodesic(mesh, mask, x, y)[0]
    covered_e = np.zeros(mesh.n_edges, dtype=bool)
    covered_v = np.zeros(mesh.n_vertices, dtype=bool)

    def mark(vs):
        covered_v[vs] = True
        for a, b in zip(vs[:-1], vs[1:]):
            covered_e[mesh.edge_id(a, b)] = True

    mark(walk)
    # detours to vertices: farthest uncovered vertex from the covered set
    while True:
        todo = verts[~covered_v[verts]]
        if len(todo) == 0:
            break
        src = np.flatnonzero(covered_v)
        d, pred, origin = dijkstra(g, directed=False, indices=src, min_only=True,
                                   return_predecessors=True)
        dist = d[todo]
        z = int(todo[np.lexsort((todo, -dist))[0]])
        w_j = int(origin[z])
        branch = _tree_path(pred, w_j, z)
        pos = walk.index(w_j)
        detour = branch[1:] + branch[::-1][1:]
        walk = walk[:pos + 1] + detour + walk[pos + 1:]
        mark(branch)
    # edges whose endpoints are both covered but the edge is not
    for e in sub_edges[~covered_e[sub_edges]]:
        a, b = (int(v) for v in mesh.edges[e])
        pos = walk.index(a)
        walk = walk[:pos + 1] + [b, a] + walk[pos + 1:]
        covered_e[e] = True
    return CurvePath.from_vertices(mesh, walk)


def subgraph_length(mesh: MetricMesh, subgraph) -> float:
    return float(mesh.lengths[_edge_mask(mesh, subgraph)].sum())


def random_connected_subgraph(mesh: MetricMesh, rng: np.random.Generator, size: int,
                              allowed: Iterable[int] | None = None) -> np.ndarray:
    """Edge mask of a random connected subgraph grown from a random vertex."""
    if allowed is None:
        ok = np.ones(mesh.n_edges, dtype=bool)
    else:
        ok = _edge_mask(mesh, allowed)
    start = int(rng.choice(np.unique(mesh.edges[ok].ravel())))
    mask = np.zeros(mesh.n_edges, dtype=bool)
    inside = {start}
    frontier = [e for _, e in mesh.neighbors[start] if ok[e]]
    while frontier and mask.sum() < size:
        e = frontier.pop(int(rng.integers(len(frontier))))
        if mask[e]:
            continue
        mask[e] = True
        for v in mesh.edges[e]:
            v = int(v)
            if v not in inside:
                inside.add(v)
                frontier.extend(f for _, f in mesh.neighbors[v] if ok[f] and not mask[f])
    return mask
