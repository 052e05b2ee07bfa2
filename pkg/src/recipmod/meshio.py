"""Mesh files: JSON documents with vertices, edges, faces and the frame.

Numbers are written with ``repr`` (17 significant digits), so a write/read
cycle reproduces lengths and areas exactly.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .surface import MeshError, MetricMesh, QuadFrame


class MeshFormatError(ValueError):
    pass


def mesh_to_dict(mesh: MetricMesh, frame: QuadFrame) -> dict:
    return {
        "vertices": mesh.points.tolist(),
        "edges": [[int(i), int(j), float(l)] for (i, j), l in zip(mesh.edges, mesh.lengths)],
        "faces": [[list(f), float(a)] for f, a in zip(mesh.faces, mesh.face_areas)],
        "frame": {f"zeta{k}": list(frame.arc(k)) for k in range(1, 5)},
    }


def dumps(mesh: MetricMesh, frame: QuadFrame) -> str:
    d = mesh_to_dict(mesh, frame)
    # one record per line keeps diffs and error positions readable
    parts = ["{"]
    for key in ("vertices", "edges", "faces"):
        rows = ",\n  ".join(json.dumps(r) for r in d[key])
        parts.append(f' "{key}": [\n  {rows}\n ],')
    parts.append(f' "frame": {json.dumps(d["frame"])}')
    parts.append("}")
    return "\n".join(parts) + "\n"


def write_mesh(path, mesh: MetricMesh, frame: QuadFrame) -> None:
    Path(path).write_text(dumps(mesh, frame))


def _number(x, where):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise MeshFormatError(f"{where}: expected a number, got {x!r}")
    x = float(x)
    if not math.isfinite(x):
        raise MeshFormatError(f"{where}: value must be finite")
    return x


def _index(x, n, where):
    if isinstance(x, bool) or not isinstance(x, int):
        raise MeshFormatError(f"{where}: expected a vertex index, got {x!r}")
    if not 0 <= x < n:
        raise MeshFormatError(f"{where}: vertex index {x} out of range")
    return x


def loads(text: str) -> tuple[MetricMesh, QuadFrame]:
    """Parse a mesh document; errors name the offending line or field."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MeshFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise MeshFormatError("document must be an object")
    for key in ("vertices", "edges", "faces", "frame"):
        if key not in doc:
            raise MeshFormatError(f"missing field {key!r}")
    verts = doc["vertices"]
    if not isinstance(verts, list) or not verts:
        raise MeshFormatError("vertices: expected a nonempty list")
    pts = []
    for k, v in enumerate(verts):
        if not isinstance(v, list) or len(v) != 2:
            raise MeshFormatError(f"vertices[{k}]: expected [x, y]")
        pts.append([_number(c, f"vertices[{k}]") for c in v])
    n = len(pts)
    edges, lengths = [], []
    for k, e in enumerate(doc["edges"]):
        if not isinstance(e, list) or len(e) != 3:
            raise MeshFormatError(f"edges[{k}]: expected [i, j, length]")
        i, j = _index(e[0], n, f"edges[{k}][0]"), _index(e[1], n, f"edges[{k}][1]")
        length = _number(e[2], f"edges[{k}][2]")
        if length < 0:
            raise MeshFormatError(f"edges[{k}][2]: negative edge length")
        edges.append([min(i, j), max(i, j)])
        lengths.append(length)
    faces, areas = [], []
    for k, f in enumerate(doc["faces"]):
        if not isinstance(f, list) or len(f) != 2 or not isinstance(f[0], list):
            raise MeshFormatError(f"faces[{k}]: expected [[v, ...], area]")
        cyc = tuple(_index(v, n, f"faces[{k}][0]") for v in f[0])
        area = _number(f[1], f"faces[{k}][1]")
        if area < 0:
            raise MeshFormatError(f"faces[{k}][1]: negative face area")
        faces.append(cyc)
        areas.append(area)
    fr = doc["frame"]
    if not isinstance(fr, dict):
        raise MeshFormatError("frame: expected an object")
    arcs = []
    for k in range(1, 5):
        key = f"zeta{k}"
        if key not in fr or not isinstance(fr[key], list):
            raise MeshFormatError(f"frame.{key}: missing vertex list")
        arcs.append([_index(v, n, f"frame.{key}") for v in fr[key]])
    try:
        mesh = MetricMesh(np.array(pts, dtype=float), np.array(edges, dtype=np.int64).reshape(-1, 2),
                          np.array(lengths, dtype=float), faces, np.array(areas, dtype=float))
        frame = QuadFrame(*arcs)
        frame.validate(mesh)
    except MeshError as exc:
        raise MeshFormatError(f"invalid mesh: {exc}") from None
    return mesh, frame


def read_mesh(path) -> tuple[MetricMesh, QuadFrame]:
    return loads(Path(path).read_text())
