"""Indexed triangle meshes, their measures and combinatorial validation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

__all__ = [
    "TriMesh",
    "ValidityReport",
    "Measures",
    "measure",
    "validate",
    "concatenate",
    "scale_to_fit",
    "check_build_volume",
    "BUILD_VOLUME_MM",
]

#: Default printable extent of a low-cost FDM machine, millimetres per axis.
BUILD_VOLUME_MM = (200.0, 200.0, 200.0)


class TriMesh:
    """Immutable indexed triangle mesh.

    ``vertices`` is a float64 ``(n, 3)`` array (millimetres once in print
    space) and ``triangles`` an int64 ``(m, 3)`` array of vertex indices.
    """

    __slots__ = ("vertices", "triangles")

    def __init__(self, vertices, triangles):
        v = np.array(vertices, dtype=np.float64).reshape(-1, 3)
        t = np.array(triangles, dtype=np.int64).reshape(-1, 3)
        if t.size and (t.min() < 0 or t.max() >= len(v)):
            raise ValueError("triangle index out of range")
        if t.size and np.any((t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 0] == t[:, 2])):
            raise ValueError("triangle repeats a vertex index")
        v.flags.writeable = False
        t.flags.writeable = False
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)

    def __setattr__(self, name, value):
        raise AttributeError("TriMesh is immutable")

    @classmethod
    def empty(cls) -> TriMesh:
        return cls(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))

    def __len__(self):
        return len(self.triangles)

    def __repr__(self):
        return f"TriMesh(vertices={len(self.vertices)}, triangles={len(self.triangles)})"

    @property
    def is_empty(self) -> bool:
        return len(self.triangles) == 0

    def corners(self) -> np.ndarray:
        """``(m, 3, 3)`` array of triangle corner positions."""
        return self.vertices[self.triangles]

    def transformed(self, scale=1.0, translate=(0.0, 0.0, 0.0), about=(0.0, 0.0, 0.0)) -> TriMesh:
        """Uniform scale about ``about`` followed by a translation."""
        about = np.asarray(about, dtype=float)
        v = (self.vertices - about) * scale + about + np.asarray(translate, dtype=float)
        return TriMesh(v, self.triangles)

    def translated(self, offset) -> TriMesh:
        return TriMesh(self.vertices + np.asarray(offset, dtype=float), self.triangles)

    def flipped(self) -> TriMesh:
        return TriMesh(self.vertices, self.triangles[:, ::-1])

    def compacted(self) -> TriMesh:
        """Drop unreferenced vertices, keeping the survivors in index order."""
        used, inverse = np.unique(self.triangles, return_inverse=True)
        return TriMesh(self.vertices[used], inverse.reshape(-1, 3))

    def bbox(self):
        if len(self.vertices) == 0:
            return None
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def extents(self) -> np.ndarray:
        bb = self.bbox()
        return np.zeros(3) if bb is None else bb[1] - bb[0]


@dataclass(frozen=True)
class Measures:
    area: float
    volume: float
    bbox: tuple | None  # None marks an empty mesh

    @property
    def extents(self):
        if self.bbox is None:
            return (0.0, 0.0, 0.0)
        return tuple(float(b - a) for a, b in zip(*self.bbox))


@dataclass(frozen=True)
class ValidityReport:
    watertight: bool
    consistent_orientation: bool
    degenerate_triangles: int
    components: int
    bbox: tuple | None
    vertex_count: int = 0
    triangle_count: int = 0
    edge_count: int = 0
    nan_vertices: int = 0
    notes: tuple = field(default=())

    @property
    def euler_characteristic(self) -> int:
        return self.vertex_count - self.edge_count + self.triangle_count

    @property
    def multi_shell(self) -> bool:
        return self.components > 1

    def to_dict(self) -> dict:
        return {
            "watertight": self.watertight,
            "consistent_orientation": self.consistent_orientation,
            "degenerate_triangles": self.degenerate_triangles,
            "components": self.components,
            "multi_shell": self.multi_shell,
            "bbox_mm": None if self.bbox is None else [list(map(float, c)) for c in self.bbox],
            "vertices": self.vertex_count,
            "triangles": self.triangle_count,
            "edges": self.edge_count,
            "euler_characteristic": self.euler_characteristic,
            "nan_vertices": self.nan_vertices,
            "notes": list(self.notes),
        }


def _cross(tri):
    return np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])


def measure(mesh: TriMesh) -> Measures:
    """Surface area, signed volume and bounding box."""
    if mesh.is_empty:
        return Measures(0.0, 0.0, mesh.bbox())
    tri = mesh.corners()
    area = 0.5 * np.linalg.norm(_cross(tri), axis=1).sum()
    vol = np.einsum("ij,ij->i", tri[:, 0], np.cross(tri[:, 1], tri[:, 2])).sum() / 6.0
    lo, hi = mesh.bbox()
    return Measures(float(area), float(vol), (tuple(lo.tolist()), tuple(hi.tolist())))


def _directed_edges(tris: np.ndarray) -> np.ndarray:
    return np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])


def validate(mesh: TriMesh) -> ValidityReport:
    """Exact combinatorial checks: closure, orientation, components."""
    tris = mesh.triangles
    nv = len(mesh.vertices)
    bbox = None
    bb = mesh.bbox()
    if bb is not None:
        bbox = (tuple(bb[0].tolist()), tuple(bb[1].tolist()))
    nan_vertices = int(np.isnan(mesh.vertices).any(axis=1).sum())
    if len(tris) == 0:
        return ValidityReport(False, True, 0, 0, bbox, nv, 0, 0, nan_vertices, ("empty mesh",))

    de = _directed_edges(tris)
    d_keys = de[:, 0] * nv + de[:, 1]
    d_unique, d_counts = np.unique(d_keys, return_counts=True)
    rev = de[:, 1] * nv + de[:, 0]

    und = np.sort(de, axis=1)
    u_keys = und[:, 0] * nv + und[:, 1]
    u_unique, u_counts = np.unique(u_keys, return_counts=True)

    # each directed edge used once and its reverse present
    consistent = bool(np.all(d_counts == 1))
    has_reverse = np.isin(rev, d_unique)
    watertight = bool(np.all(u_counts == 2) and consistent and np.all(has_reverse))
    if consistent:
        # edges shared by two faces must traverse in opposite directions
        shared = np.isin(u_keys, u_unique[u_counts >= 2])
        consistent = bool(np.all(has_reverse[shared]))

    area2 = np.linalg.norm(_cross(mesh.corners()), axis=1)
    degenerate = int((area2 <= 0.0).sum())

    used = np.unique(tris)
    adj = coo_matrix(
        (np.ones(len(de), dtype=np.int8), (de[:, 0], de[:, 1])), shape=(nv, nv)
    )
    _, labels = connected_components(adj, directed=False)
    components = len(np.unique(labels[used]))

    notes = []
    if nan_vertices:
        notes.append(f"{nan_vertices} vertices carry NaN coordinates")
    if not watertight:
        notes.append(f"{int((u_counts != 2).sum())} edges not shared by exactly two triangles")
    return ValidityReport(
        watertight,
        consistent,
        degenerate,
        components,
        bbox,
        len(used),
        len(tris),
        len(u_unique),
        nan_vertices,
        tuple(notes),
    )


def concatenate(meshes) -> TriMesh:
    """Disjoint union of meshes (no welding)."""
    meshes = list(meshes)
    if not meshes:
        return TriMesh.empty()
    verts, tris, base = [], [], 0
    for m in meshes:
        verts.append(m.vertices)
        tris.append(m.triangles + base)
        base += len(m.vertices)
    return TriMesh(np.concatenate(verts), np.concatenate(tris))


def scale_to_fit(mesh: TriMesh, target) -> TriMesh:
    """Uniformly scale about the bbox centre to meet ``target`` millimetres.

    A scalar target constrains the longest axis. A 3-sequence constrains
    whichever axis binds first, so the result fits inside the target box
    with one axis meeting it exactly.
    """
    if mesh.is_empty:
        raise ValueError("cannot scale an empty mesh")
    lo, hi = mesh.bbox()
    ext = hi - lo
    target_arr = np.asarray(target, dtype=float)
    if np.any(target_arr <= 0):
        raise ValueError(f"scale target must be positive, got {target}")
    if target_arr.ndim == 0:
        axis = int(np.argmax(ext))
        goal = float(target_arr)
    else:
        with np.errstate(divide="ignore"):
            ratios = np.where(ext > 0, target_arr / ext, np.inf)
        axis = int(np.argmin(ratios))
        goal = float(target_arr[axis])
    if ext[axis] <= 0:
        raise ValueError(f"degenerate bounding box: zero extent on axis {'xyz'[axis]}")
    s = goal / ext[axis]
    center = 0.5 * (lo + hi)
    v = (mesh.vertices - center) * s + center
    return TriMesh(v, mesh.triangles)


def check_build_volume(mesh: TriMesh, limit=BUILD_VOLUME_MM) -> bool:
    """True iff every bbox extent is within ``limit`` (inclusive)."""
    limit = np.broadcast_to(np.asarray(limit, dtype=float), (3,))
    return bool(np.all(mesh.extents() <= limit))
