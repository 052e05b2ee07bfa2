"""Numerical checks of coarea, oscillation, ring-modulus and product bounds.

Level integrals sample ``levels`` equally spaced values (nudged off vertex
values) and apply the trapezoidal rule; the length of a level is the sum of
``g * dual_length`` over edges straddling it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid
from scipy.sparse.csgraph import dijkstra

from .modulus import INFINITE, ModulusOptions, ModulusResult, is_infinite, solve_modulus
from .potential import PotentialField, build_potential, crossed_edges, nudge_level, oscillation
from .surface import FamilySpec, MetricMesh, QuadFrame, ball, nearest_vertex

FOUR_OVER_PI = 4.0 / math.pi
COAREA_U_CONSTANT = 2000.0
KAPPAS = {
    "proved": (2000.0 * FOUR_OVER_PI) ** 2,
    "refined": (216.0 * FOUR_OVER_PI) ** 2,
    "conjectured": FOUR_OVER_PI ** 2,
}
RING_SLACK = 1.25
INDETERMINATE = "indeterminate"


class NotLipschitz(ValueError):
    pass


def mesh_tolerance(n: int) -> float:
    """Relative slack for inequality checks: 5% at n = 32, halved per doubling."""
    return 0.05 * 32.0 / n


def _levels(lo: float, hi: float, count: int) -> np.ndarray:
    if count < 2:
        raise ValueError("need at least two levels")
    return np.linspace(lo, hi, count)


def level_lengths(mesh: MetricMesh, values, g, levels) -> tuple[np.ndarray, np.ndarray]:
    """Weighted level-set length at each (nudged) level; returns ``(levels, lengths)``."""
    u = np.asarray(values, dtype=float)
    c = np.asarray(g, dtype=float) * mesh.dual_lengths
    a, b = u[mesh.edges[:, 0]], u[mesh.edges[:, 1]]
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    ts = np.array([nudge_level(u, float(t)) for t in levels])
    lengths = np.array([c[(lo < t) & (t <= hi)].sum() for t in ts])
    return ts, lengths


def level_integral(mesh: MetricMesh, values, g, lo: float, hi: float, count: int = 64) -> float:
    """Trapezoidal integral over ``[lo, hi]`` of the weighted level lengths."""
    if hi <= lo:
        return 0.0
    grid = _levels(lo, hi, count)
    _, lengths = level_lengths(mesh, values, g, grid)
    return float(trapezoid(lengths, grid))


@dataclass(frozen=True)
class CoareaReport:
    lhs: float
    rhs: float
    constant: float
    levels: int
    passed: bool
    empirical_constant: float
    tolerance: float


def coarea_check(mesh: MetricMesh, m, L: float, g, levels: int = 64,
                 tol: float = 0.05) -> CoareaReport:
    """Level integral of an ``L``-Lipschitz vertex field against ``(4L/pi) * sum(g * edge_area)``.

    Raises :class:`NotLipschitz` when some edge has ``|m(a) - m(b)| > L * length``
    beyond rounding.
    """
    m = np.asarray(m, dtype=float)
    g = np.broadcast_to(np.asarray(g, dtype=float), (mesh.n_edges,))
    jump = np.abs(m[mesh.edges[:, 0]] - m[mesh.edges[:, 1]])
    slack = 1e-12 * max(1.0, float(np.abs(m).max()) if len(m) else 1.0)
    if np.any(jump > L * mesh.lengths + slack):
        raise NotLipschitz("field is not L-Lipschitz")
    lhs = level_integral(mesh, m, g, float(m.min()), float(m.max()), levels)
    mass = float(np.sum(g * mesh.edge_area))
    const = FOUR_OVER_PI * L
    rhs = const * mass
    emp = lhs / (L * mass) if L * mass > 0 else (0.0 if lhs == 0 else math.inf)
    return CoareaReport(lhs, rhs, const, levels, lhs <= rhs * (1 + tol), emp, tol)


def coarea_u_check(mesh: MetricMesh, frame: QuadFrame, field: PotentialField, density, g,
                   levels: int = 64, tol: float = 0.05) -> CoareaReport:
    """Level integral of the potential against ``2000 * sum(g * rho * edge_area)``."""
    rho = np.asarray(density, dtype=float)
    g = np.broadcast_to(np.asarray(g, dtype=float), (mesh.n_edges,))
    lhs = level_integral(mesh, field.values, g, 0.0, 1.0, levels)
    pairing = float(np.sum(g * rho * mesh.edge_area))
    rhs = COAREA_U_CONSTANT * pairing
    emp = lhs / pairing if pairing > 0 else (0.0 if lhs == 0 else math.inf)
    return CoareaReport(lhs, rhs, COAREA_U_CONSTANT, levels, lhs <= rhs * (1 + tol), emp, tol)


def random_lipschitz_field(mesh: MetricMesh, rng: np.random.Generator, L: float = 1.0,
                           pieces: int = 3) -> np.ndarray:
    """Random ``L``-Lipschitz field built from distance functions.

    ``L * |min_k(c_k + d(v, s_k)) - c_0|`` with random vertices ``s_k`` and
    offsets; each piece is linear along geodesics.
    """
    n = mesh.n_vertices
    scale = float(mesh.lengths.sum()) / max(mesh.n_edges, 1) * math.sqrt(n)
    best = np.full(n, np.inf)
    for _ in range(pieces):
        s = int(rng.integers(n))
        best = np.minimum(best, rng.uniform(0, scale) + mesh.distances([s]))
    return L * np.abs(best - rng.uniform(0, scale))


# -- oscillation ------------------------------------------------------------

def arc_diameter(mesh: MetricMesh, frame: QuadFrame, k: int) -> float:
    verts = list(frame.arc(k))
    return float(max(mesh.distances([v])[verts].max() for v in verts))


@dataclass(frozen=True)
class OscillationRow:
    center: int
    radius: float
    osc: float
    image: float
    rhs: float
    osc_ok: bool
    image_ok: bool
    skipped: bool

    @property
    def passed(self) -> bool:
        return self.skipped or (self.osc_ok and self.image_ok)


def _union_measure(lo: np.ndarray, hi: np.ndarray) -> float:
    if len(lo) == 0:
        return 0.0
    order = np.argsort(lo, kind="stable")
    total, cur_lo, cur_hi = 0.0, lo[order[0]], hi[order[0]]
    for a, b in zip(lo[order[1:]], hi[order[1:]]):
        if a > cur_hi:
            total += cur_hi - cur_lo
            cur_lo, cur_hi = a, b
        else:
            cur_hi = max(cur_hi, b)
    return float(total + cur_hi - cur_lo)


def oscillation_check(mesh: MetricMesh, frame: QuadFrame, field: PotentialField, density,
                      centers, radii, tol: float = 0.05) -> list[OscillationRow]:
    """Ball-wise oscillation bound ``r * osc <= (4/pi) * sum_{B(x,2r)} rho * edge_area``.

    The oscillation is taken over the component of ``B(x, r)`` containing
    ``x``; the image variant measures the union of value intervals of edges
    inside the ball. Radii above a quarter of the smaller diameter of the
    first and third arcs are skipped and flagged.
    """
    rho = field.scale * np.asarray(density, dtype=float)
    r0 = min(arc_diameter(mesh, frame, 1), arc_diameter(mesh, frame, 3)) / 4
    u = field.values
    i, j = mesh.edges[:, 0], mesh.edges[:, 1]
    rows = []
    for x in centers:
        x = int(x)
        d = mesh.distances([x])
        for r in radii:
            r = float(r)
            if not 0 < r <= r0 * (1 + 1e-12):
                rows.append(OscillationRow(x, r, math.nan, math.nan, math.nan, False, False, True))
                continue
            inside = d <= r
            emask = inside[i] & inside[j]
            labels = mesh.components(emask, inside)
            comp = np.flatnonzero(labels == labels[x])
            osc = oscillation(u, comp)
            lo = np.minimum(u[i], u[j])[emask]
            hi = np.maximum(u[i], u[j])[emask]
            image = _union_measure(lo, hi)
            big = (d[i] <= 2 * r) & (d[j] <= 2 * r)
            rhs = FOUR_OVER_PI * float(np.sum(rho[big] * mesh.edge_area[big]))
            bound = rhs * (1 + tol)
            rows.append(OscillationRow(x, r, osc, image, rhs, r * osc <= bound,
                                       r * image <= bound, False))
    return rows


# -- ring modulus -----------------------------------------------------------

def ring_family(mesh: MetricMesh, center: int, r: float, R: float) -> FamilySpec:
    """Curves from ``ball(center, r)`` to the outside of ``ball(center, R)``, inside the latter."""
    if not 0 < r < R:
        raise ValueError("need 0 < r < R")
    inner = ball(mesh, center, r)
    outer = ball(mesh, center, R)
    if len(outer) == mesh.n_vertices:
        raise ValueError("complement of the outer ball is empty")
    rim = frozenset(w for v in outer for w, _ in mesh.neighbors[v] if w not in outer)
    return FamilySpec(inner, rim, outer | rim, f"ring({center},{r:g},{R:g})")


def ring_modulus(mesh: MetricMesh, center: int, r: float, R: float,
                 options: ModulusOptions | None = None) -> ModulusResult:
    return solve_modulus(mesh, ring_family(mesh, center, r, R), options)


# -- products and the reciprocality report ----------------------------------

def modulus_product(a, b):
    """Product of two moduli; an infinite factor times 0 is ``"indeterminate"``."""
    if is_infinite(a) or is_infinite(b):
        other = b if is_infinite(a) else a
        if not is_infinite(other) and other == 0:
            return INDETERMINATE
        return INFINITE
    return float(a) * float(b)


def _upper(product, kappa):
    if product == INDETERMINATE:
        return INDETERMINATE
    return "fail" if is_infinite(product) or product > kappa else "pass"


def _lower(product, kappa):
    if product == INDETERMINATE:
        return INDETERMINATE
    return "pass" if is_infinite(product) or product >= 1.0 / kappa else "fail"


@dataclass(frozen=True)
class ProofChain:
    """Discrete run of the product-bound argument with the conjugate extremal density as ``g``.

    ``strip_integral`` integrates over levels of ``u`` the least ``g``-length
    of a second-family curve inside the faces met by that level; ``pairing``
    is ``sum_f |g|_f |rho|_f area_f`` with face magnitudes
    ``|h|_f = sqrt(sum_{e in f} h_e**2 / 2)``, whose squares integrate to the
    edge energies.
    """

    strip_integral: float
    pairing: float
    energy_g: float
    energy_rho: float
    levels: int
    lower_ok: bool
    coarea_ok: bool
    holder_ok: bool
    implied_bound: float
    implied_ok: bool

    @property
    def empirical_constant(self) -> float:
        return self.strip_integral / self.pairing if self.pairing > 0 else math.inf

    @property
    def passed(self) -> bool:
        return self.lower_ok and self.coarea_ok and self.holder_ok and self.implied_ok


def face_magnitude(mesh: MetricMesh, h) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    return np.array([math.sqrt(0.5 * float(np.sum(h[list(es)] ** 2))) for es in mesh.face_edges])


def strip_lengths(mesh: MetricMesh, frame: QuadFrame, u, g, levels) -> tuple[np.ndarray, np.ndarray]:
    """Least ``g``-length of a curve from the second to the fourth arc within each level strip."""
    w = np.asarray(g, dtype=float) * mesh.lengths
    a2 = np.array(frame.arc(2))
    a4 = np.array(frame.arc(4))
    ts, out = [], []
    for t in levels:
        t = nudge_level(u, float(t))
        cut = crossed_edges(mesh, u, t)
        mask = np.zeros(mesh.n_edges, dtype=bool)
        for f in np.unique(mesh.edge_faces[cut]):
            if f >= 0:
                mask[list(mesh.face_edges[f])] = True
        mask[cut] = True
        verts = np.zeros(mesh.n_vertices, dtype=bool)
        verts[mesh.edges[mask].ravel()] = True
        src, dst = a2[verts[a2]], a4[verts[a4]]
        best = math.inf
        if len(src) and len(dst):
            d = dijkstra(mesh.graph(w, mask), directed=False, indices=src, min_only=True)
            best = float(d[dst].min())
        ts.append(t)
        out.append(best)
    return np.array(ts), np.array(out)


def proof_chain(mesh: MetricMesh, frame: QuadFrame, res1: ModulusResult, res2: ModulusResult,
                levels: int = 64, tol: float = 0.05, eps: float = 1e-6) -> ProofChain:
    field = build_potential(mesh, frame, res1.density)
    rho = field.scale * res1.density
    g = np.asarray(res2.density, dtype=float)
    if res2.min_length > 0 and res2.min_length < 1:
        g = g / res2.min_length
    grid = _levels(0.0, 1.0, levels)
    _, lengths = strip_lengths(mesh, frame, field.values, g, grid)
    lengths = np.where(np.isfinite(lengths), lengths, 0.0)
    integral = float(trapezoid(lengths, grid))
    area = mesh.face_areas
    pairing = float(np.sum(face_magnitude(mesh, g) * face_magnitude(mesh, rho) * area))
    free = (mesh.edge_area <= 0)
    e_g = float(np.sum(mesh.edge_area * np.where(free, 0, g) ** 2))
    e_r = float(np.sum(mesh.edge_area * np.where(free, 0, rho) ** 2))
    product = float(res1.value) * float(res2.value)
    implied = (integral / (2 * COAREA_U_CONSTANT * FOUR_OVER_PI)) ** 2
    return ProofChain(
        strip_integral=integral, pairing=pairing, energy_g=e_g, energy_rho=e_r, levels=levels,
        lower_ok=integral >= 1 - eps - tol,
        coarea_ok=integral <= 2 * COAREA_U_CONSTANT * FOUR_OVER_PI * pairing * (1 + tol),
        holder_ok=pairing <= math.sqrt(e_g * e_r) * (1 + 1e-9),
        implied_bound=implied,
        implied_ok=product >= implied * (1 - 1e-9),
    )


@dataclass
class ReciprocalityReport:
    mod_gamma1: float | object
    mod_gamma2: float | object
    product: float | object
    kappas: dict
    upper: dict
    lower: dict
    ring: str
    ring_values: tuple
    chain: ProofChain | None
    certified: bool
    results: tuple = field(default=(), repr=False)

    @property
    def lower_bound_holds(self) -> bool:
        """The hard lower-bound assertion; vacuous unless the product is a finite number."""
        return self.lower["proved"] != "fail"

    @property
    def stronger_empirical(self) -> bool | None:
        if isinstance(self.product, float):
            return self.product >= (math.pi / 4) ** 2
        return None


def ring_condition(mesh: MetricMesh, center: int, R: float,
                   options: ModulusOptions | None = None) -> tuple[str, tuple]:
    """Whether the ring modulus decays as the inner radius shrinks from ``R/4`` to ``R/16``.

    In the plane the modulus is ``2*pi / log(R/r)``, so the two values have
    ratio ``log 4 / log 16 = 0.5``. The condition passes when the measured
    ratio is at most 1.25 times that planar ratio and fails otherwise; a
    positive limit shows up as a ratio near 1. When the two inner balls
    contain the same vertices the result is "indeterminate".
    """
    radii = (R / 4, R / 16)
    if ball(mesh, center, radii[0]) == ball(mesh, center, radii[1]):
        # both inner balls hold the same vertices: the mesh cannot resolve the decay
        v = ring_modulus(mesh, center, radii[0], R, options).value
        return INDETERMINATE, (v, v)
    vals = tuple(ring_modulus(mesh, center, r, R, options).value for r in radii)
    if any(is_infinite(v) for v in vals):
        return "fail", vals
    if vals[0] == 0:
        return "pass", vals
    planar = math.log(R / radii[0]) / math.log(R / radii[1])
    return ("pass" if vals[1] <= RING_SLACK * planar * vals[0] else "fail"), vals


def reciprocality_report(mesh: MetricMesh, frame: QuadFrame, options: ModulusOptions | None = None,
                         center: int | None = None, R: float | None = None,
                         levels: int = 64, tol: float = 0.05,
                         results: tuple | None = None) -> ReciprocalityReport:
    """Both conjugate moduli, their product against the stored constants, ring decay and the proof chain.

    Parameters
    ----------
    center : int, optional
        Ring center; defaults to the vertex nearest the centroid of the
        reference coordinates.
    R : float, optional
        Outer ring radius; defaults to a quarter of the smaller diameter of
        the first and third arcs.
    results : tuple, optional
        Already computed results for the two families, reused as given.
    """
    opts = options or ModulusOptions()
    if results is None:
        results = (solve_modulus(mesh, FamilySpec.gamma1(frame), opts),
                   solve_modulus(mesh, FamilySpec.gamma2(frame), opts))
    r1, r2 = results
    product = modulus_product(r1.value, r2.value)
    upper = {k: _upper(product, v) for k, v in KAPPAS.items()}
    lower = {k: _lower(product, v) for k, v in KAPPAS.items()}
    if center is None:
        center = nearest_vertex(mesh, mesh.points.mean(axis=0))
    if R is None:
        R = min(arc_diameter(mesh, frame, 1), arc_diameter(mesh, frame, 3)) / 4
    ring, ring_vals = ring_condition(mesh, center, R, opts)
    chain = None
    finite = not (is_infinite(r1.value) or is_infinite(r2.value))
    if finite and r1.value > 0 and r2.value > 0:
        chain = proof_chain(mesh, frame, r1, r2, levels, tol, opts.eps_adm)
    return ReciprocalityReport(r1.value, r2.value, product, dict(KAPPAS), upper, lower, ring,
                               ring_vals, chain, r1.certified and r2.certified, (r1, r2))

