"""STL (binary and ASCII) and minimal X3D IndexedFaceSet input/output."""

from __future__ import annotations

import logging
import os
import re
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np

from mathprint.mesh import TriMesh, ValidityReport, concatenate, validate

__all__ = [
    "FormatError",
    "StlError",
    "X3dError",
    "STL_RECORD",
    "write_stl_binary",
    "write_stl_ascii",
    "read_stl",
    "read_x3d",
    "read_mesh",
    "write_stl",
    "convert",
    "as_written",
]

log = logging.getLogger(__name__)

STL_RECORD = np.dtype(
    [("normal", "<f4", (3,)), ("vertices", "<f4", (3, 3)), ("attr", "<u2")]
)
assert STL_RECORD.itemsize == 50

DEFAULT_HEADER = b"mathprint binary STL"


class FormatError(ValueError):
    pass


class StlError(FormatError):
    pass


class X3dError(FormatError):
    pass


def _facet_normals(mesh: TriMesh) -> np.ndarray:
    tri = mesh.corners()
    n = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    length = np.linalg.norm(n, axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        n = np.where(length > 0, n / length, 0.0)
    return n


def write_stl_binary(mesh: TriMesh, header: bytes | str = DEFAULT_HEADER) -> bytes:
    """Serialise to binary STL: 80-byte header, uint32 count, 50-byte facets."""
    if isinstance(header, str):
        header = header.encode("ascii")
    if len(header) > 80:
        raise ValueError("STL header comment is limited to 80 bytes")
    if header[:5].lower() == b"solid":
        # readers sniff "solid" as ASCII
        header = b"#" + header[:79]
    n = len(mesh.triangles)
    if n >= 2**32:
        raise ValueError("too many triangles for binary STL")
    rec = np.zeros(n, dtype=STL_RECORD)
    rec["normal"] = _facet_normals(mesh)
    rec["vertices"] = mesh.corners()
    return header.ljust(80, b"\0") + np.uint32(n).astype("<u4").tobytes() + rec.tobytes()


def write_stl_ascii(mesh: TriMesh, name: str = "mathprint") -> bytes:
    lines = [f"solid {name}"]
    normals = _facet_normals(mesh)
    for n, tri in zip(normals, mesh.corners()):
        lines.append(f"  facet normal {n[0]:.9e} {n[1]:.9e} {n[2]:.9e}")
        lines.append("    outer loop")
        for v in tri:
            lines.append(f"      vertex {v[0]:.9e} {v[1]:.9e} {v[2]:.9e}")
        lines.append("    endloop")
        lines.append("  endfacet")
    lines.append(f"endsolid {name}")
    return ("\n".join(lines) + "\n").encode("ascii")


def _weld(corners: np.ndarray) -> TriMesh:
    """Weld bit-identical float32 coordinates; first occurrence order."""
    flat = np.ascontiguousarray(corners.reshape(-1, 3).astype("<f4"))
    if len(flat) == 0:
        return TriMesh.empty()
    keys = flat.view("<u4").view([("x", "<u4"), ("y", "<u4"), ("z", "<u4")]).ravel()
    _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    verts = flat[first[order]].astype(np.float64)
    tris = rank[inverse.ravel()].reshape(-1, 3)
    bad = (tris[:, 0] == tris[:, 1]) | (tris[:, 1] == tris[:, 2]) | (tris[:, 0] == tris[:, 2])
    if bad.any():
        log.warning("dropping %d STL facets with coincident corners", int(bad.sum()))
        tris = tris[~bad]
    tris = _cancel_opposite_pairs(tris)
    return TriMesh(verts, tris)


def as_written(mesh: TriMesh) -> TriMesh:
    """The mesh that a binary STL of ``mesh`` reads back as.

    Coordinates are rounded to float32 and welded. Writing the result again
    gives the same bytes and the same triangles on reading.
    """
    if mesh.is_empty:
        return mesh
    return _weld(mesh.corners())


def _cancel_opposite_pairs(tris: np.ndarray) -> np.ndarray:
    """Drop pairs of facets on the same three vertices with opposite winding.

    Float32 rounding can merge the corners of sliver triangles so that two
    of them become one facet seen from both sides. Such a pair bounds no
    volume, and removing it restores two-triangle edges.
    """
    if len(tris) < 2:
        return tris
    key = np.sort(tris, axis=1)
    # even rotations of (a, b, c) with a < b < c have positive parity
    rot = np.argmin(tris, axis=1)
    rows = np.arange(len(tris))
    second = tris[rows, (rot + 1) % 3]
    positive = second == key[:, 1]
    _, group = np.unique(key, axis=0, return_inverse=True)
    group = group.ravel()
    drop = np.zeros(len(tris), dtype=bool)
    order = np.lexsort((rows, group))
    g_sorted = group[order]
    starts = np.flatnonzero(np.r_[True, g_sorted[1:] != g_sorted[:-1]])
    sizes = np.diff(np.r_[starts, len(order)])
    for s0, n in zip(starts[sizes > 1], sizes[sizes > 1]):
        members = order[s0:s0 + n]
        pos = members[positive[members]]
        neg = members[~positive[members]]
        k = min(len(pos), len(neg))
        drop[pos[:k]] = True
        drop[neg[:k]] = True
    if drop.any():
        log.warning("dropping %d STL facets that pair up back to back", int(drop.sum()))
        tris = tris[~drop]
    return tris


def _read_ascii(text: str) -> np.ndarray:
    toks = text.split()
    pos = 0

    def take(*words):
        nonlocal pos
        for w in words:
            if pos >= len(toks) or toks[pos] != w:
                got = toks[pos] if pos < len(toks) else "end of file"
                raise StlError(f"malformed ASCII STL: expected {w!r}, got {got!r}")
            pos += 1

    def floats(k):
        nonlocal pos
        if pos + k > len(toks):
            raise StlError("malformed ASCII STL: truncated coordinates")
        try:
            vals = [float(t) for t in toks[pos:pos + k]]
        except ValueError as exc:
            raise StlError(f"malformed ASCII STL: {exc}") from None
        pos += k
        return vals

    take("solid")
    # optional solid name up to the first facet/endsolid
    while pos < len(toks) and toks[pos] not in ("facet", "endsolid"):
        pos += 1
    tris = []
    while True:
        if pos >= len(toks):
            raise StlError("malformed ASCII STL: missing 'endsolid'")
        if toks[pos] == "endsolid":
            break
        take("facet", "normal")
        floats(3)
        take("outer", "loop")
        tri = []
        for _ in range(3):
            take("vertex")
            tri.append(floats(3))
        take("endloop", "endfacet")
        tris.append(tri)
    return np.array(tris, dtype=np.float32).reshape(-1, 3, 3)


def read_stl(data: bytes) -> TriMesh:
    """Parse binary or ASCII STL bytes.

    Binary is recognised by size consistency (``84 + 50 n``); otherwise data
    starting with ``solid`` is parsed as ASCII.
    """
    if len(data) >= 84:
        n = int(np.frombuffer(data, "<u4", count=1, offset=80)[0])
        if len(data) == 84 + 50 * n:
            rec = np.frombuffer(data, STL_RECORD, count=n, offset=84)
            return _weld(rec["vertices"])
    if data.lstrip()[:5] == b"solid":
        try:
            text = data.decode("ascii")
        except UnicodeDecodeError:
            raise StlError("file starts with 'solid' but is not ASCII text") from None
        return _weld(_read_ascii(text))
    if len(data) < 84:
        raise StlError(f"truncated STL: {len(data)} bytes is shorter than the 84-byte header")
    raise StlError(
        f"binary STL declares {n} triangles ({84 + 50 * n} bytes) but the file has {len(data)} bytes"
    )


# --------------------------------------------------------------------- X3D


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _floats(text: str | None) -> np.ndarray:
    if not text:
        return np.zeros(0)
    return np.array([float(t) for t in re.split(r"[\s,]+", text.strip()) if t], dtype=float)


def _transform_matrix(el) -> np.ndarray:
    """Affine 4x4 for an X3D Transform (translation, rotation, scale)."""
    m = np.eye(4)
    s = _floats(el.get("scale")) if el.get("scale") else np.ones(3)
    t = _floats(el.get("translation")) if el.get("translation") else np.zeros(3)
    r = _floats(el.get("rotation")) if el.get("rotation") else np.array([0, 0, 1, 0.0])
    axis, angle = r[:3], r[3]
    norm = np.linalg.norm(axis)
    R = np.eye(3)
    if norm > 0 and angle != 0:
        k = axis / norm
        K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
        R = np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * K @ K
    m[:3, :3] = R @ np.diag(s)
    m[:3, 3] = t
    return m


def _faces(coord_index: np.ndarray):
    face, faces = [], []
    for idx in coord_index.astype(np.int64).tolist():
        if idx == -1:
            if face:
                faces.append(face)
            face = []
        else:
            face.append(idx)
    if face:
        faces.append(face)
    return faces


def _ifs_mesh(ifs, matrix: np.ndarray, defs: dict) -> TriMesh | None:
    coord = None
    for child in ifs:
        if _local(child.tag) == "Coordinate":
            coord = child
            break
    if coord is not None and coord.get("USE"):
        coord = defs.get(coord.get("USE"), coord)
    if coord is None or coord.get("point") is None:
        raise X3dError("IndexedFaceSet has no Coordinate point attribute")
    if ifs.get("coordIndex") is None:
        raise X3dError("IndexedFaceSet has no coordIndex attribute")
    pts = _floats(coord.get("point"))
    if len(pts) % 3:
        raise X3dError("Coordinate point count is not a multiple of 3")
    pts = pts.reshape(-1, 3)
    faces = _faces(_floats(ifs.get("coordIndex")))
    if not faces:
        log.warning("empty IndexedFaceSet")
        return None
    tris = []
    for fi, face in enumerate(faces):
        if len(face) < 3:
            raise X3dError(f"face {fi} has fewer than 3 indices")
        if min(face) < 0 or max(face) >= len(pts):
            raise X3dError(f"face {fi} references a vertex index out of range")
        for k in range(1, len(face) - 1):
            tris.append((face[0], face[k], face[k + 1]))
    tris = np.array(tris, dtype=np.int64)
    if ifs.get("ccw", "true").strip().lower() == "false":
        tris = tris[:, ::-1]
    homo = np.column_stack([pts, np.ones(len(pts))]) @ matrix.T
    return TriMesh(homo[:, :3], tris).compacted()


def read_x3d(text: str | bytes) -> TriMesh:
    """Triangulated union of every IndexedFaceSet, with Transforms applied."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise X3dError(f"not well-formed XML: {exc}") from None
    defs = {el.get("DEF"): el for el in root.iter() if el.get("DEF")}
    meshes = []
    found = False

    def visit(el, matrix):
        nonlocal found
        tag = _local(el.tag)
        if tag == "Transform":
            matrix = matrix @ _transform_matrix(el)
        if tag == "IndexedFaceSet":
            found = True
            m = _ifs_mesh(el, matrix, defs)
            if m is not None:
                meshes.append(m)
            return
        for child in el:
            visit(child, matrix)

    visit(root, np.eye(4))
    if not found:
        raise X3dError("no IndexedFaceSet found")
    return concatenate(meshes)


# ------------------------------------------------------------------- files


def read_mesh(path) -> TriMesh:
    path = Path(path)
    ext = path.suffix.lower()
    if ext not in (".stl", ".x3d"):
        raise FormatError(f"unknown mesh extension {ext!r}; expected .stl or .x3d")
    data = path.read_bytes()
    return read_stl(data) if ext == ".stl" else read_x3d(data)


def write_stl(mesh: TriMesh, path, ascii: bool = False, header: bytes | str = DEFAULT_HEADER):
    path = Path(path)
    if path.suffix.lower() != ".stl":
        raise FormatError(f"output must be .stl, got {path.suffix!r}")
    data = write_stl_ascii(mesh) if ascii else write_stl_binary(mesh, header)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def convert(in_path, out_path, ascii: bool = False) -> ValidityReport:
    """Read ``.x3d``/``.stl``, validate, write ``.stl``; return the report."""
    out_path = Path(out_path)
    if out_path.suffix.lower() != ".stl":
        raise FormatError(f"output must be .stl, got {out_path.suffix!r}")
    mesh = read_mesh(in_path)
    report = validate(mesh)
    write_stl(mesh, out_path, ascii=ascii)
    return report
