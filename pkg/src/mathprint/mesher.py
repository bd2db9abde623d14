"""Marching-cubes extraction of implicit surfaces.

Vertices are identified by the grid edge they lie on, so neighbouring cells
share vertices exactly and the output is closed whenever the surface stays
inside the grid. Sampling and per-slab cell processing can run on several
threads; assembly is ordered by global edge id, so the result does not depend
on the worker count.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from mathprint._mc_tables import CORNERS, EDGES, TRIANGLES
from mathprint.fields import Intersection, ScalarField, Shell
from mathprint.mesh import TriMesh

__all__ = [
    "GridSpec",
    "MeshJobReport",
    "MeshingError",
    "BoundaryContactError",
    "EmptySurfaceError",
    "mesh_isosurface",
    "vertex_residuals",
    "sample_grid",
    "EPS_CORNER",
]

#: exact-zero corner samples are nudged to this positive value
EPS_CORNER = 1e-12

_FACE_NAMES = ("x-min", "x-max", "y-min", "y-max", "z-min", "z-max")


class MeshingError(ValueError):
    pass


class BoundaryContactError(MeshingError):
    def __init__(self, faces):
        self.faces = tuple(faces)
        super().__init__(
            "surface touches the grid boundary on face(s) "
            + ", ".join(self.faces)
            + "; enlarge the bounds or add a clip region"
        )


class EmptySurfaceError(MeshingError):
    pass


@dataclass(frozen=True)
class GridSpec:
    lo: tuple
    hi: tuple
    resolution: tuple  # cells per axis

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        res = self.resolution
        if np.ndim(res) == 0:
            res = (int(res),) * 3
        res = tuple(int(r) for r in res)
        if len(lo) != 3 or len(hi) != 3 or len(res) != 3:
            raise ValueError("grid corners and resolution need three components")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ValueError(f"grid max corner must exceed min corner per axis: {lo} {hi}")
        if any(r < 2 for r in res):
            raise ValueError(f"grid resolution must be >= 2 per axis, got {res}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "resolution", res)

    @classmethod
    def cube(cls, half_width: float, resolution) -> GridSpec:
        h = float(half_width)
        return cls((-h, -h, -h), (h, h, h), resolution)

    def axes(self):
        return tuple(
            np.linspace(a, b, n + 1) for a, b, n in zip(self.lo, self.hi, self.resolution)
        )

    @property
    def spacing(self) -> np.ndarray:
        return (np.array(self.hi) - np.array(self.lo)) / np.array(self.resolution)


@dataclass
class MeshJobReport:
    cell_count: int
    triangle_count: int
    vertex_count: int
    degenerate_triangle_count: int
    elapsed_s: float
    shell_degenerate_samples: int = 0
    nan_samples: int = 0
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _slabs(n: int, workers: int):
    bounds = np.linspace(0, n, max(1, min(workers, n)) + 1).astype(int)
    return [(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def sample_grid(field: ScalarField, grid: GridSpec, workers: int = 1) -> np.ndarray:
    """Field values on the ``(nx+1, ny+1, nz+1)`` grid points."""
    ax, ay, az = grid.axes()

    def run(sl):
        X, Y, Z = np.meshgrid(ax[sl[0]:sl[1]], ay, az, indexing="ij")
        return field(X, Y, Z)

    slabs = _slabs(len(ax), workers)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, slabs))
    else:
        parts = [run(s) for s in slabs]
    return np.ascontiguousarray(np.concatenate(parts, axis=0))


_TRI_TABLE = np.full((256, 16), -1, dtype=np.int64)
for _case, _row in enumerate(TRIANGLES):
    _TRI_TABLE[_case, : len(_row)] = _row
_TRI_COUNT = np.array([len(r) // 3 for r in TRIANGLES], dtype=np.int64)
_CORNERS = np.array(CORNERS, dtype=np.int64)
# each cube edge as (axis, offset of its lower corner)
_EDGE_AXIS = np.array(
    [int(np.nonzero(_CORNERS[b] - _CORNERS[a])[0][0]) for a, b in EDGES], dtype=np.int64
)
_EDGE_BASE = np.array([np.minimum(_CORNERS[a], _CORNERS[b]) for a, b in EDGES], dtype=np.int64)


def _cell_cases(inside: np.ndarray, i0: int, i1: int) -> np.ndarray:
    """Case index for cells with x index in ``[i0, i1)``."""
    case = np.zeros((i1 - i0,) + tuple(s - 1 for s in inside.shape[1:]), dtype=np.int64)
    nx1, ny1, nz1 = inside.shape
    for bit, (dx, dy, dz) in enumerate(CORNERS):
        corner = inside[i0 + dx:i1 + dx, dy:ny1 - 1 + dy, dz:nz1 - 1 + dz]
        case |= corner.astype(np.int64) << bit
    return case


def _slab_edges(inside, shape, i0, i1):
    """Global edge ids of triangle corners for cells in x-slab ``[i0, i1)``."""
    nx1, ny1, nz1 = shape
    npts = nx1 * ny1 * nz1
    case = _cell_cases(inside, i0, i1)
    flat = case.ravel()
    active = np.nonzero(_TRI_COUNT[flat])[0]
    if len(active) == 0:
        return np.zeros(0, dtype=np.int64)
    ci, cj, ck = np.unravel_index(active, case.shape)
    ci = ci + i0
    rows = _TRI_TABLE[flat[active]]  # (m, 16)
    slots = rows[:, :15].reshape(-1, 5, 3)
    keep = slots[:, :, 0] >= 0  # (m, 5)
    cell_idx = np.broadcast_to(np.arange(len(active))[:, None], keep.shape)[keep]
    local = slots[keep]  # (t, 3) local edge numbers, cell-major then table order
    base = _EDGE_BASE[local]  # (t, 3, 3)
    gi = ci[cell_idx][:, None] + base[..., 0]
    gj = cj[cell_idx][:, None] + base[..., 1]
    gk = ck[cell_idx][:, None] + base[..., 2]
    point = (gi * ny1 + gj) * nz1 + gk
    return (_EDGE_AXIS[local] * npts + point).ravel()


def mesh_isosurface(
    field: ScalarField,
    grid: GridSpec,
    clip: ScalarField | None = None,
    workers: int = 1,
):
    """Triangulate the zero set of ``field`` (intersected with ``clip``).

    Returns ``(TriMesh, MeshJobReport)``. Triangles are oriented so their
    normals point toward positive field values (outward).
    """
    t0 = time.perf_counter()
    effective = field if clip is None else Intersection(field, clip)
    values = sample_grid(effective, grid, workers)
    nan_samples = int(np.isnan(values).sum())
    values = np.where(values == 0.0, EPS_CORNER, values)
    inside = values < 0.0  # NaN samples count as outside

    touching = []
    for axis in range(3):
        for side, idx in (("min", 0), ("max", -1)):
            face = np.take(inside, idx, axis=axis)
            if face.any():
                touching.append(f"{'xyz'[axis]}-{side}")
    if touching:
        raise BoundaryContactError(touching)
    if not inside.any():
        raise EmptySurfaceError("field has no negative samples on the grid; nothing to mesh")

    shape = values.shape
    nx = shape[0] - 1
    slabs = _slabs(nx, workers)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda s: _slab_edges(inside, shape, *s), slabs))
    else:
        parts = [_slab_edges(inside, shape, *s) for s in slabs]
    edge_ids = np.concatenate(parts)

    uniq, inverse = np.unique(edge_ids, return_inverse=True)
    npts = values.size
    axis = uniq // npts
    point = uniq % npts
    i, j, k = np.unravel_index(point, shape)
    step = np.stack([axis == 0, axis == 1, axis == 2], axis=1).astype(np.int64)
    i2, j2, k2 = i + step[:, 0], j + step[:, 1], k + step[:, 2]
    v0 = values[i, j, k]
    v1 = values[i2, j2, k2]
    v1 = np.where(np.isnan(v1), np.inf, v1)
    v0 = np.where(np.isnan(v0), np.inf, v0)
    with np.errstate(invalid="ignore"):
        t = np.where(np.isinf(v0), 1.0, np.where(np.isinf(v1), 0.0, v0 / (v0 - v1)))
    ax, ay, az = grid.axes()
    p0 = np.stack([ax[i], ay[j], az[k]], axis=1)
    p1 = np.stack([ax[i2], ay[j2], az[k2]], axis=1)
    verts = p0 + t[:, None] * (p1 - p0)
    # the table winds triangles toward the inside; flip to face outward
    tris = inverse.reshape(-1, 3)[:, ::-1]

    mesh = TriMesh(verts, tris)
    cross = np.cross(verts[tris[:, 1]] - verts[tris[:, 0]], verts[tris[:, 2]] - verts[tris[:, 0]])
    degenerate = int((np.linalg.norm(cross, axis=1) == 0.0).sum())

    shell_bad = 0
    flags = []
    shells = [f for f in effective.walk() if isinstance(f, Shell)]
    if shells:
        X, Y, Z = np.meshgrid(ax, ay, az, indexing="ij")
        for s in shells:
            n = int(s.degenerate_mask(X, Y, Z).sum())
            shell_bad += n
            if n:
                flags.append(f"shell gradient below threshold at {n} samples")
    if nan_samples:
        flags.append(f"{nan_samples} NaN field samples treated as outside")

    report = MeshJobReport(
        cell_count=int(np.prod(grid.resolution)),
        triangle_count=len(tris),
        vertex_count=len(verts),
        degenerate_triangle_count=degenerate,
        elapsed_s=time.perf_counter() - t0,
        shell_degenerate_samples=shell_bad,
        nan_samples=nan_samples,
        flags=flags,
    )
    return mesh, report


@dataclass(frozen=True)
class ResidualStats:
    max: float
    mean: float


def vertex_residuals(field: ScalarField, mesh: TriMesh) -> ResidualStats:
    """Max and mean of ``|field(v)|`` over mesh vertices."""
    v = mesh.vertices
    r = np.abs(field(v[:, 0], v[:, 1], v[:, 2]))
    return ResidualStats(float(np.max(r)), float(np.mean(r)))
