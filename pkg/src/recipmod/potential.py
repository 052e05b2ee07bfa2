"""The potential of an extremal density and its level sets.

``u(v)`` is the rho-weighted distance from the first arc, clipped at 1. It
is 1-Lipschitz with respect to ``rho * length`` on every edge, which is the
discrete form of ``rho`` being an upper gradient of ``u``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .surface import MetricMesh, QuadFrame, _order_dual

NUDGE = 1e-12
SCALE_MARGIN = 1e-12


@dataclass(frozen=True, eq=False)
class PotentialField:
    values: np.ndarray
    density: np.ndarray = field(repr=False)
    scale: float = 1.0

    def __post_init__(self):
        self.values.setflags(write=False)

    def weights(self, mesh: MetricMesh) -> np.ndarray:
        """Edge bounds ``scale * rho * length`` for the upper-gradient inequality."""
        return self.scale * self.density * mesh.lengths

    def upper_gradient_violations(self, mesh: MetricMesh, tol: float = 0.0) -> np.ndarray:
        """Edges with ``|u(a) - u(b)| > scale * rho * length + tol``."""
        return _violations(mesh, self.values, self.weights(mesh), tol)


def _violations(mesh, u, w, tol=0.0):
    jump = np.abs(u[mesh.edges[:, 0]] - u[mesh.edges[:, 1]])
    return np.flatnonzero(jump > w + tol)


def _repair(mesh: MetricMesh, u: np.ndarray, w: np.ndarray) -> None:
    """Lower the upper endpoint of edges that fail the bound by rounding alone.

    Vertices joined by zero-weight edges move together so they stay equal.
    """
    labels = mesh.components(w == 0)
    for _ in range(256):
        bad = _violations(mesh, u, w)
        if len(bad) == 0:
            return
        a, b = mesh.edges[bad, 0], mesh.edges[bad, 1]
        hi = np.where(u[a] > u[b], a, b)
        move = np.isin(labels, labels[hi])
        u[move] = np.nextafter(u[move], -np.inf)


def build_potential(mesh: MetricMesh, frame: QuadFrame, density) -> PotentialField:
    """Clipped rho-distance from the first arc.

    When the least rho-length ``L`` of a curve from the first to the third
    arc is below 1 (a density admissible only up to solver tolerance), the
    density is scaled by ``(1 + 1e-12) / L`` first, so the third arc is at
    distance at least 1 and clips to exactly 1. The factor is kept in
    ``PotentialField.scale``. Edges whose bound fails by floating-point
    rounding get their upper endpoint lowered by one ulp at a time, so the
    upper-gradient inequality holds exactly as evaluated.

    Parameters
    ----------
    mesh, frame : surface and its quadrilateral frame
    density : (E,) array
        Nonnegative edge density, typically the extremal one for the first
        family.

    Returns
    -------
    PotentialField
    """
    rho = np.asarray(density, dtype=float)
    if rho.shape != (mesh.n_edges,) or np.any(rho < 0) or np.any(np.isnan(rho)):
        raise ValueError("density must be a nonnegative per-edge array")
    d = mesh.distances(frame.arc(1), rho * mesh.lengths)
    far = min(d[list(frame.arc(3))])
    scale = 1.0
    if 0 < far < 1:
        scale = (1.0 + SCALE_MARGIN) / far
    w = scale * rho * mesh.lengths
    d = mesh.distances(frame.arc(1), w)
    u = np.minimum(d, 1.0)
    # Dijkstra sums can overshoot an edge bound by an ulp
    _repair(mesh, u, w)
    return PotentialField(u, rho.copy(), scale)


def nudge_level(values: np.ndarray, t: float) -> float:
    """Move ``t`` up by 1e-12 steps until it avoids every value."""
    vals = set(np.asarray(values, dtype=float).tolist())
    while t in vals:
        t += NUDGE
    return t


def crossed_edges(mesh: MetricMesh, values: np.ndarray, t: float) -> np.ndarray:
    """Edges whose endpoint values straddle ``t`` (lower < t <= upper)."""
    a, b = values[mesh.edges[:, 0]], values[mesh.edges[:, 1]]
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    return np.flatnonzero((lo < t) & (t <= hi))


@dataclass(frozen=True)
class LevelCurve:
    """Crossed edges of one level, grouped into dual components.

    ``components`` holds one ordered edge tuple per component, each walked
    through shared faces. ``arcs_met`` lists, per component, the frame arcs
    (1 to 4) on which it has a boundary edge.
    """

    level: float
    edges: tuple
    components: tuple
    arcs_met: tuple
    length: float
    degenerate: bool

    @property
    def connected(self) -> bool:
        return len(self.components) == 1

    def spanning_components(self) -> list:
        """Indices of components meeting both the second and fourth arc."""
        return [k for k, a in enumerate(self.arcs_met) if 2 in a and 4 in a]


def _group(mesh: MetricMesh, edges: np.ndarray) -> list:
    """Components of crossed edges; two edges are linked when they share a face."""
    parent = {int(e): int(e) for e in edges}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    by_face = {}
    for e in parent:
        for f in mesh.edge_faces[e]:
            if f >= 0:
                by_face.setdefault(int(f), []).append(e)
    for es in by_face.values():
        r = find(es[0])
        for e in es[1:]:
            s = find(e)
            if s != r:
                parent[max(r, s)] = min(r, s)
                r = min(r, s)
    groups = {}
    for e in sorted(parent):
        groups.setdefault(find(e), []).append(e)
    return [groups[k] for k in sorted(groups)]


def level_set(mesh: MetricMesh, frame: QuadFrame, field: PotentialField, t: float) -> LevelCurve:
    """Edges straddling level ``t``, organised through the dual graph.

    Raises ``ValueError`` for ``t`` outside ``(0, 1)``. A level that collides
    with a vertex value is nudged upward first. The length estimate is the
    sum of dual lengths of crossed edges.
    """
    if not 0 < t < 1:
        raise ValueError("level must lie in (0, 1)")
    u = field.values
    t = nudge_level(u, float(t))
    cut = crossed_edges(mesh, u, t)
    if len(cut) == 0:
        return LevelCurve(t, (), (), (), 0.0, True)
    arc_of = frame.arc_of_edge(mesh)
    comps, arcs = [], []
    for group in _group(mesh, cut):
        order = _order_dual(mesh, group)[0]
        comps.append(order)
        arcs.append(tuple(sorted({int(arc_of[e]) for e in group if arc_of[e] > 0})))
    length = float(mesh.dual_lengths[cut].sum())
    return LevelCurve(t, tuple(int(e) for e in cut), tuple(comps), tuple(arcs), length, False)


@dataclass(frozen=True)
class MaxPrincipleReport:
    region_max: float
    region_min: float
    boundary_max: float
    boundary_min: float
    max_ok: bool
    min_ok: bool

    @property
    def passed(self) -> bool:
        return self.max_ok and self.min_ok


def star_boundary(mesh: MetricMesh, frame: QuadFrame, region) -> set:
    """Outer vertex boundary of ``region`` together with its vertices on the first or third arc."""
    reg = set(int(v) for v in region)
    outer = {w for v in reg for w, _ in mesh.neighbors[v] if w not in reg}
    ends = set(frame.arc(1)) | set(frame.arc(3))
    return outer | (reg & ends)


def max_principle_check(mesh: MetricMesh, frame: QuadFrame, field: PotentialField, region,
                        tol: float = 1e-9) -> MaxPrincipleReport:
    """Compare extremes of ``u`` on a region with those on its boundary set."""
    reg = sorted(set(int(v) for v in region))
    if not reg:
        raise ValueError("region is empty")
    bd = sorted(star_boundary(mesh, frame, reg))
    u = field.values
    if not bd:
        # the region is the whole mesh and touches neither end arc
        hi = lo = float("nan")
        return MaxPrincipleReport(float(u[reg].max()), float(u[reg].min()), hi, lo, False, False)
    rmax, rmin = float(u[reg].max()), float(u[reg].min())
    bmax, bmin = float(u[bd].max()), float(u[bd].min())
    return MaxPrincipleReport(rmax, rmin, bmax, bmin, rmax <= bmax + tol, rmin >= bmin - tol)


def oscillation(field: PotentialField | np.ndarray, region) -> float:
    reg = sorted(set(int(v) for v in region))
    if not reg:
        raise ValueError("region is empty")
    u = field.values if isinstance(field, PotentialField) else np.asarray(field)
    return float(u[reg].max() - u[reg].min())


def potential_csv(mesh: MetricMesh, field: PotentialField) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["vertex", "x", "y", "u"])
    for v, ((x, y), u) in enumerate(zip(mesh.points.tolist(), field.values.tolist())):
        w.writerow([v, f"{x:.12g}", f"{y:.12g}", f"{u:.12g}"])
    return buf.getvalue()


def level_csv(mesh: MetricMesh, field: PotentialField, curve: LevelCurve) -> str:
    """One row per crossed edge in dual order, with the interpolated crossing point."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["level", "component", "edge", "x", "y"])
    for k, comp in enumerate(curve.components):
        for e in comp:
            a, b = mesh.edges[e]
            ua, ub = field.values[a], field.values[b]
            s = (curve.level - ua) / (ub - ua)
            x, y = mesh.points[a] + s * (mesh.points[b] - mesh.points[a])
            w.writerow([f"{curve.level:.12g}", k, e, f"{x:.12g}", f"{y:.12g}"])
    return buf.getvalue()


def random_region(mesh: MetricMesh, rng: np.random.Generator, size: int) -> frozenset:
    """Random connected set of interior (non-boundary) vertices grown from a random seed."""
    interior = np.array(sorted(set(range(mesh.n_vertices)) - mesh.boundary_vertices))
    if len(interior) == 0:
        raise ValueError("mesh has no interior vertex")
    start = int(rng.choice(interior))
    region, frontier = {start}, [start]
    while frontier and len(region) < size:
        v = frontier[int(rng.integers(len(frontier)))]
        options = [w for w, _ in mesh.neighbors[v]
                   if w not in region and w not in mesh.boundary_vertices]
        if not options:
            frontier.remove(v)
            continue
        w = options[int(rng.integers(len(options)))]
        region.add(w)
        frontier.append(w)
    return frozenset(region)
