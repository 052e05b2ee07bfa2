import json

import numpy as np
import pytest

from recipmod import build_collapsed_disk, build_conformal, build_rectangle, read_mesh, write_mesh
from recipmod.meshio import MeshFormatError, dumps, loads


def _same(a, b):
    (ma, fa), (mb, fb) = a, b
    assert np.array_equal(ma.points, mb.points)
    assert np.array_equal(ma.edges, mb.edges)
    assert np.array_equal(ma.lengths, mb.lengths)
    assert ma.faces == mb.faces
    assert np.array_equal(ma.face_areas, mb.face_areas)
    assert fa == fb


def test_round_trip(tmp_path):
    built = build_rectangle(1, 1, 4)
    p = tmp_path / "m.json"
    write_mesh(p, *built)
    _same(built, read_mesh(p))


@pytest.mark.parametrize("built", [build_conformal(1, 1, 6, lambda x, y: 1 + x * x + y * y),
                                   build_collapsed_disk(1.5, 4, 0.5)])
def test_round_trip_is_exact(built):
    _same(built, loads(dumps(*built)))


def _doc():
    return json.loads(dumps(*build_rectangle(1, 1, 2)))


def test_negative_length_rejected():
    d = _doc()
    d["edges"][3][2] = -0.5
    with pytest.raises(MeshFormatError, match=r"edges\[3\]\[2\]: negative edge length"):
        loads(json.dumps(d))


def test_frame_not_covering_boundary_rejected():
    d = _doc()
    d["frame"]["zeta4"] = d["frame"]["zeta4"][:1]
    with pytest.raises(MeshFormatError, match="invalid mesh"):
        loads(json.dumps(d))


def test_syntax_error_reports_position():
    text = dumps(*build_rectangle(1, 1, 2)).replace("],\n  [", "],,\n  [", 1)
    with pytest.raises(MeshFormatError, match=r"line \d+, column \d+"):
        loads(text)


@pytest.mark.parametrize("mutate, message", [
    (lambda d: d.pop("faces"), "missing field"),
    (lambda d: d["edges"][0].__setitem__(0, 999), "out of range"),
    (lambda d: d["faces"][0].__setitem__(1, -1.0), "negative face area"),
    (lambda d: d["vertices"][0].__setitem__(0, "x"), "expected a number"),
])
def test_malformed_documents(mutate, message):
    d = _doc()
    mutate(d)
    with pytest.raises(MeshFormatError, match=message):
        loads(json.dumps(d))
