from functools import lru_cache

import numpy as np
import pytest

from recipmod import (FamilySpec, PotentialField, build_potential, build_rectangle, level_set,
                      max_principle_check, oscillation, solve_modulus)
from recipmod.potential import level_csv, potential_csv, random_region
from recipmod.surface import ball, nearest_vertex
from recipmod.zoo import SMOOTH, zoo_surface


@lru_cache(maxsize=None)
def solved(name, n):
    mesh, frame = zoo_surface(name, n)
    res = solve_modulus(mesh, FamilySpec.gamma1(frame))
    return mesh, frame, res, build_potential(mesh, frame, res.density)


def test_square_potential_is_height():
    mesh, frame, _, field = solved("square", 32)
    assert np.max(np.abs(field.values - mesh.points[:, 1])) <= 0.02


def test_end_arcs_exact():
    for name in ("square", "conformal_wave", "collapsed_disk"):
        mesh, frame, _, field = solved(name, 16)
        assert np.all(field.values[list(frame.zeta1)] == 0.0)
        assert np.all(field.values[list(frame.zeta3)] == 1.0)


def test_upper_gradient_holds_exactly():
    for name in ("square", "conformal_quadratic", "collapsed_disk"):
        mesh, _, _, field = solved(name, 16)
        assert len(field.upper_gradient_violations(mesh)) == 0


def test_zero_density_gives_zero_field():
    mesh, frame = build_rectangle(1, 1, 8)
    field = build_potential(mesh, frame, np.zeros(mesh.n_edges))
    assert np.all(field.values == 0)


def test_field_is_read_only():
    _, _, _, field = solved("square", 16)
    with pytest.raises(ValueError):
        field.values[0] = 0.5


def test_potential_increases_with_density():
    mesh, frame, res, field = solved("square", 16)
    bigger = build_potential(mesh, frame, 1.5 * res.density)
    assert np.all(bigger.values >= field.values - 1e-12)


def test_level_half_on_square():
    mesh, frame, _, field = solved("square", 32)
    curve = level_set(mesh, frame, field, 0.5)
    assert curve.connected and curve.spanning_components() == [0]
    assert curve.length == pytest.approx(1.0, rel=0.05)
    rows = level_csv(mesh, field, curve).splitlines()
    assert rows[0] == "level,component,edge,x,y" and len(rows) == len(curve.edges) + 1


def test_level_on_constant_field_is_degenerate():
    mesh, frame = build_rectangle(1, 1, 8)
    field = build_potential(mesh, frame, np.zeros(mesh.n_edges))
    curve = level_set(mesh, frame, field, 0.5)
    assert curve.degenerate and curve.edges == () and curve.length == 0


@pytest.mark.parametrize("t", [0.0, 1.0, -0.2, 1.5])
def test_level_outside_unit_interval_rejected(t):
    mesh, frame, _, field = solved("square", 8)
    with pytest.raises(ValueError):
        level_set(mesh, frame, field, t)


def test_level_through_collapsed_cluster():
    mesh, frame, _, field = solved("collapsed_disk", 16)
    c = nearest_vertex(mesh, (0.0, 0.0))
    t = float(field.values[c])
    curve = level_set(mesh, frame, field, t)
    cluster = ball(mesh, c, 0)
    touched = {int(v) for e in curve.edges for v in mesh.edges[e]}
    assert touched & cluster
    assert curve.connected and curve.spanning_components() == [0]


@pytest.mark.parametrize("name", SMOOTH + ("collapsed_disk",))
def test_levels_connected_and_spanning(name):
    mesh, frame, _, field = solved(name, 16)
    for t in np.linspace(0.1, 0.9, 9):
        curve = level_set(mesh, frame, field, float(t))
        assert curve.connected and curve.spanning_components() == [0], t


def test_max_principle_disk_region():
    mesh, frame, _, field = solved("square", 16)
    c = nearest_vertex(mesh, (0.5, 0.5))
    assert max_principle_check(mesh, frame, field, ball(mesh, c, 0.25)).passed


def test_max_principle_single_vertex():
    mesh, frame, _, field = solved("square", 16)
    c = nearest_vertex(mesh, (0.3, 0.6))
    assert max_principle_check(mesh, frame, field, {c}).passed


def test_max_principle_detects_bump():
    mesh, frame, res, field = solved("square", 16)
    c = nearest_vertex(mesh, (0.5, 0.5))
    u = field.values.copy()
    u[c] = max(u[w] for w, _ in mesh.neighbors[c]) + 0.1
    bumped = PotentialField(u, res.density, field.scale)
    rep = max_principle_check(mesh, frame, bumped, {c})
    assert not rep.passed and not rep.max_ok


@pytest.mark.parametrize("name", ["square", "conformal_wave", "collapsed_disk"])
def test_max_principle_random_regions(name):
    mesh, frame, _, field = solved(name, 16)
    rng = np.random.default_rng(7)
    for _ in range(50):
        region = random_region(mesh, rng, int(rng.integers(1, 40)))
        assert max_principle_check(mesh, frame, field, region).passed


def test_oscillation_examples():
    mesh, frame, _, field = solved("square", 32)
    assert oscillation(np.full(mesh.n_vertices, 0.3), range(mesh.n_vertices)) == 0
    assert oscillation(field, range(mesh.n_vertices)) == 1.0
    lower = np.flatnonzero(mesh.points[:, 1] < 0.5)
    assert oscillation(field, lower) == pytest.approx(0.5, abs=1 / 32 + 0.02)


@pytest.mark.parametrize("name", SMOOTH)
def test_face_oscillation_decays_under_refinement(name):
    worst = []
    for n in (8, 16, 32):
        mesh, _, _, field = solved(name, n)
        worst.append(max(oscillation(field, f) for f in mesh.faces))
    assert worst[1] <= worst[0] * 1.1 and worst[2] <= worst[1] * 1.1
    assert worst[2] < worst[0]


def test_potential_csv_header():
    mesh, _, _, field = solved("square", 8)
    lines = potential_csv(mesh, field).splitlines()
    assert lines[0] == "vertex,x,y,u" and len(lines) == mesh.n_vertices + 1
