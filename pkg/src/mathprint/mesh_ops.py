"""Preparation procedures on closed meshes: plane splits and support bases.

Splitting clips every triangle against the plane, then closes each side with
a planar cap triangulated over the cut's boundary loops (holes included).
Caps reuse the cut vertices, so both halves stay watertight without welding.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from mathprint.mesh import TriMesh, concatenate, validate

__all__ = [
    "SplitPlane",
    "BaseSpec",
    "SplitError",
    "CapTriangulationError",
    "split",
    "split_multi",
    "add_base",
    "box_mesh",
    "cylinder_mesh",
    "triangulate_polygon_with_holes",
]


class SplitError(ValueError):
    pass


class CapTriangulationError(SplitError):
    def __init__(self, loop):
        self.loop = [tuple(map(float, p)) for p in loop]
        super().__init__(f"cannot triangulate cap loop with {len(self.loop)} vertices: {self.loop}")


@dataclass(frozen=True)
class SplitPlane:
    """Plane ``normal . p = offset`` (millimetres)."""

    normal: tuple
    offset: float = 0.0

    def __post_init__(self):
        n = tuple(float(c) for c in self.normal)
        if abs(math.sqrt(sum(c * c for c in n)) - 1.0) > 1e-12:
            raise ValueError(f"split plane normal must be unit length, got {n}")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def from_normal(cls, normal, offset=0.0) -> SplitPlane:
        """Normalise ``normal`` (offset is taken along the unit normal)."""
        n = np.asarray(normal, dtype=float)
        norm = np.linalg.norm(n)
        if norm == 0:
            raise ValueError("split plane normal must be nonzero")
        return cls(tuple((n / norm).tolist()), offset)


@dataclass(frozen=True)
class BaseSpec:
    """Support base: ``shape`` is ``"box"`` (dims = width, depth) or
    ``"cylinder"`` (dims = diameter)."""

    shape: str
    dims: tuple
    height: float
    embed: float = 0.0

    def __post_init__(self):
        if self.shape not in ("box", "cylinder"):
            raise ValueError(f"base shape must be 'box' or 'cylinder', got {self.shape!r}")
        dims = tuple(float(d) for d in np.atleast_1d(self.dims))
        want = 2 if self.shape == "box" else 1
        if len(dims) != want:
            raise ValueError(f"{self.shape} base needs {want} footprint dimension(s), got {dims}")
        if any(d <= 0 for d in dims):
            raise ValueError("base footprint dimensions must be positive")
        if not self.height > 0:
            raise ValueError("base height must be positive")
        if self.embed < 0:
            raise ValueError("base embed depth must be non-negative")
        object.__setattr__(self, "dims", dims)


# ---------------------------------------------------------------- polygons


def _signed_area(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _point_in_polygon(p, poly: np.ndarray) -> bool:
    x, y = p
    xi, yi = poly[:, 0], poly[:, 1]
    xj, yj = np.roll(xi, 1), np.roll(yi, 1)
    cond = (yi > y) != (yj > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xcross = (xj - xi) * (y - yi) / (yj - yi) + xi
    return bool(np.count_nonzero(cond & (x < xcross)) % 2)


def _segments_cross(p, q, a, b) -> np.ndarray:
    """Proper crossings of segment pq with each segment a[i]b[i]."""

    def orient(u, v, w):
        return (v[..., 0] - u[..., 0]) * (w[..., 1] - u[..., 1]) - (v[..., 1] - u[..., 1]) * (
            w[..., 0] - u[..., 0]
        )

    d1 = orient(a, b, p)
    d2 = orient(a, b, q)
    d3 = orient(p, q, a)
    d4 = orient(p, q, b)
    return (d1 * d2 < 0) & (d3 * d4 < 0)


def _passes_through(p, q, verts: np.ndarray) -> bool:
    """True when a vertex other than ``p``/``q`` lies on the closed segment pq."""
    d = q - p
    rel = verts - p
    on_line = d[0] * rel[:, 1] - d[1] * rel[:, 0] == 0
    t = rel @ d
    inside = (t >= 0) & (t <= d @ d)
    endpoint = np.all(verts == p, axis=1) | np.all(verts == q, axis=1)
    return bool(np.any(on_line & inside & ~endpoint))


def _bridge(outer: list, hole: list, pts: np.ndarray, obstacles: list, holes: list) -> list:
    """Splice ``hole`` into ``outer`` through a mutually visible vertex pair."""
    hp = pts[hole]
    m = int(np.argmax(hp[:, 0]))
    mpt = hp[m]
    op = pts[outer]
    order = np.argsort(np.hypot(op[:, 0] - mpt[0], op[:, 1] - mpt[1]), kind="stable")
    seg_a = np.concatenate([pts[o] for o in obstacles])
    seg_b = np.concatenate([pts[np.roll(o, -1)] for o in obstacles])
    for idx in order:
        cand = op[idx]
        if np.any(_segments_cross(mpt, cand, seg_a, seg_b)) or _passes_through(mpt, cand, seg_a):
            continue
        mid = 0.5 * (mpt + cand)
        if not _point_in_polygon(mid, op) or any(_point_in_polygon(mid, pts[h]) for h in holes):
            continue
        a = outer[: idx + 1]
        h = hole[m:] + hole[: m + 1]
        return a + h + outer[idx:]
    raise CapTriangulationError(hp)


def _ear_clip(poly: list, pts: np.ndarray) -> list:
    """Triangulate a simple counter-clockwise polygon given as vertex ids."""
    n = len(poly)
    if n < 3:
        return []
    prev = list(range(-1, n - 1))
    prev[0] = n - 1
    nxt = list(range(1, n + 1))
    nxt[-1] = 0
    xy = pts[poly]
    P = [tuple(p) for p in xy.tolist()]

    def cross(a, b, c):
        return (P[b][0] - P[a][0]) * (P[c][1] - P[a][1]) - (P[b][1] - P[a][1]) * (P[c][0] - P[a][0])

    alive = n
    # reflex vertices bucketed on a uniform grid so ear tests stay local
    lo = xy.min(axis=0)
    cell = float(max(np.ptp(xy[:, 0]), np.ptp(xy[:, 1]))) / max(1.0, math.sqrt(n)) or 1.0
    buckets: dict = {}

    def key(p):
        return int((p[0] - lo[0]) // cell), int((p[1] - lo[1]) // cell)

    reflex = set()
    for i in range(n):
        if cross(prev[i], i, nxt[i]) <= 0:
            reflex.add(i)
            buckets.setdefault(key(P[i]), set()).add(i)

    def drop(i):
        if i in reflex:
            reflex.discard(i)
            buckets[key(P[i])].discard(i)

    def is_ear(i):
        a, b, c = prev[i], i, nxt[i]
        if cross(a, b, c) <= 0:
            return False
        pa, pb, pc = P[a], P[b], P[c]
        k0 = key((min(pa[0], pb[0], pc[0]), min(pa[1], pb[1], pc[1])))
        k1 = key((max(pa[0], pb[0], pc[0]), max(pa[1], pb[1], pc[1])))
        for gx in range(k0[0], k1[0] + 1):
            for gy in range(k0[1], k1[1] + 1):
                for r in buckets.get((gx, gy), ()):
                    if r == a or r == b or r == c:
                        continue
                    q = P[r]
                    if q == pa or q == pb or q == pc:
                        continue
                    if cross(a, b, r) >= 0 and cross(b, c, r) >= 0 and cross(c, a, r) >= 0:
                        return False
        return True

    out = []
    i = 0
    stalled = 0
    while alive > 3:
        if is_ear(i):
            a, c = prev[i], nxt[i]
            out.append((poly[a], poly[i], poly[c]))
            nxt[a], prev[c] = c, a
            drop(i)
            alive -= 1
            for j in (a, c):
                if j in reflex and cross(prev[j], j, nxt[j]) > 0:
                    drop(j)
            i = c
            stalled = 0
            continue
        i = nxt[i]
        stalled += 1
        if stalled > alive:
            # no strict ear: clip a flat vertex (zero-area triangle keeps
            # the cap closed) or give up
            j = i
            for _ in range(alive):
                if cross(prev[j], j, nxt[j]) == 0 and len({poly[prev[j]], poly[j], poly[nxt[j]]}) == 3:
                    break
                j = nxt[j]
            else:
                raise CapTriangulationError(pts[[poly[k] for k in _walk(i, nxt, alive)]])
            a, c = prev[j], nxt[j]
            out.append((poly[a], poly[j], poly[c]))
            nxt[a], prev[c] = c, a
            drop(j)
            alive -= 1
            i = c
            stalled = 0
    a = i
    b = nxt[a]
    c = nxt[b]
    if len({poly[a], poly[b], poly[c]}) == 3:
        out.append((poly[a], poly[b], poly[c]))
    return out


def _walk(start, nxt, count):
    out, i = [], start
    for _ in range(count):
        out.append(i)
        i = nxt[i]
    return out


def _check_simple(loops, pts: np.ndarray):
    """Raise :class:`CapTriangulationError` if any two loop edges cross."""
    a = np.concatenate([pts[l] for l in loops])
    b = np.concatenate([pts[np.roll(l, -1)] for l in loops])
    owner = np.concatenate([np.full(len(l), k) for k, l in enumerate(loops)])
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    order = np.argsort(lo[:, 0], kind="stable")
    lo_sorted = lo[order, 0]
    for i in range(len(a)):
        # candidates whose x-range overlaps edge i
        stop = np.searchsorted(lo_sorted, hi[i, 0], side="right")
        cand = order[:stop]
        cand = cand[(cand > i) & (hi[cand, 0] >= lo[i, 0])
                    & (hi[cand, 1] >= lo[i, 1]) & (lo[cand, 1] <= hi[i, 1])]
        if len(cand) and np.any(_segments_cross(a[i], b[i], a[cand], b[cand])):
            raise CapTriangulationError(pts[loops[owner[i]]])


def triangulate_polygon_with_holes(loops, pts2d: np.ndarray) -> list:
    """Counter-clockwise triangles covering the region bounded by ``loops``.

    ``loops`` are lists of indices into ``pts2d``. Nesting is decided by
    containment: loops at even depth bound material, odd depth are holes.
    """
    loops = [list(l) for l in loops if len(l) >= 3]
    if not loops:
        return []
    _check_simple(loops, pts2d)
    areas = [_signed_area(pts2d[l]) for l in loops]
    depth = []
    for i, l in enumerate(loops):
        probe = pts2d[l[0]]
        d = 0
        for j, other in enumerate(loops):
            if i != j and abs(areas[j]) > abs(areas[i]) and _point_in_polygon(probe, pts2d[other]):
                d += 1
        depth.append(d)
    # orient: material loops CCW, holes CW
    oriented = []
    for l, a, d in zip(loops, areas, depth):
        want_ccw = d % 2 == 0
        oriented.append(l if (a > 0) == want_ccw else l[::-1])

    tris = []
    for i, l in enumerate(oriented):
        if depth[i] % 2:
            continue
        holes = []
        for j, h in enumerate(oriented):
            if depth[j] == depth[i] + 1 and _point_in_polygon(pts2d[h[0]], pts2d[l]):
                holes.append(h)
        holes.sort(key=lambda h: -float(pts2d[h, 0].max()))
        poly = l
        for k, h in enumerate(holes):
            obstacles = [np.array(poly)] + [np.array(x) for x in holes[k:]]
            poly = _bridge(poly, h, pts2d, obstacles, holes[k:])
        tris.extend(_ear_clip(poly, pts2d))
    return tris


# ------------------------------------------------------------------- split


def _plane_basis(n: np.ndarray):
    helper = np.eye(3)[int(np.argmin(np.abs(n)))]
    u = np.cross(helper, n)
    u /= np.linalg.norm(u)
    v = np.cross(n, u)
    return u, v


def _boundary_loops(tris: np.ndarray, pts2d: np.ndarray) -> list:
    """Directed boundary edges (those without a reverse twin) chained into loops.

    Seen from the plane normal, the material of the cap lies to the right of
    these edges; where loops touch at a vertex the walk takes the sharpest
    right turn, which keeps every loop simple.
    """
    if len(tris) == 0:
        return []
    de = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    nv = int(tris.max()) + 1
    fwd = de[:, 0] * nv + de[:, 1]
    rev = de[:, 1] * nv + de[:, 0]
    open_edges = de[~np.isin(fwd, rev)]
    nxt = {}
    for a, b in open_edges.tolist():
        nxt.setdefault(a, []).append(b)

    def pick(prev, cur):
        cands = nxt[cur]
        if len(cands) == 1:
            return cands.pop()
        d_in = pts2d[cur] - pts2d[prev]
        best, best_turn = 0, None
        for k, w in enumerate(cands):
            d_out = pts2d[w] - pts2d[cur]
            turn = math.atan2(d_in[0] * d_out[1] - d_in[1] * d_out[0], d_in @ d_out)
            if best_turn is None or turn < best_turn:
                best, best_turn = k, turn
        return cands.pop(best)

    loops = []
    for start in sorted(nxt):
        while nxt.get(start):
            loop = [start]
            prev, cur = start, nxt[start].pop(0)
            while cur != start:
                loop.append(cur)
                if not nxt.get(cur):
                    raise SplitError("open cross-section boundary; input is not closed")
                prev, cur = cur, pick(prev, cur)
            loops.append(loop)
    return loops


def _clip_side(tris, d, edge_vertex, keep_below: bool):
    """Triangles of the part on one side, with cut polygons fan-triangulated."""
    out = []
    for t in tris:
        poly = []
        for k in range(3):
            a, b = int(t[k]), int(t[(k + 1) % 3])
            da, db = d[a], d[b]
            if (da <= 0) if keep_below else (da >= 0):
                poly.append(a)
            if (da < 0 < db) or (db < 0 < da):
                poly.append(edge_vertex[(min(a, b), max(a, b))])
        if len(poly) >= 3:
            for k in range(1, len(poly) - 1):
                tri = (poly[0], poly[k], poly[k + 1])
                if len(set(tri)) == 3:
                    out.append(tri)
    return out


def split(mesh: TriMesh, plane: SplitPlane, check: bool = True):
    """Cut a closed mesh into ``(below, above)`` closed parts.

    Vertices on the plane count as below. Triangles lying in the plane go
    to whichever side they bound.
    """
    if check:
        rep = validate(mesh)
        if not (rep.watertight and rep.consistent_orientation):
            raise SplitError(f"split needs a watertight, consistently oriented mesh: {rep}")
    n = np.asarray(plane.normal, dtype=float)
    verts = mesh.vertices
    tris = mesh.triangles
    d = verts @ n - plane.offset
    td = d[tris]
    below_mask = np.all(td <= 0, axis=1)
    above_mask = np.all(td >= 0, axis=1) & ~below_mask
    on_plane = np.all(td == 0, axis=1)
    if on_plane.any():
        # coplanar faces: facing +n caps the material below them
        c = mesh.corners()[on_plane]
        facing = np.cross(c[:, 1] - c[:, 0], c[:, 2] - c[:, 0]) @ n
        idx = np.nonzero(on_plane)[0]
        below_mask[idx] = facing > 0
        above_mask[idx] = facing <= 0
    cut = ~(below_mask | above_mask)

    if not cut.any() and not on_plane.any():
        if not above_mask.any():
            return mesh, TriMesh.empty()
        if not below_mask.any():
            return TriMesh.empty(), mesh

    new_pts = []
    edge_vertex = {}
    nv = len(verts)
    for t in tris[cut]:
        for k in range(3):
            a, b = int(t[k]), int(t[(k + 1) % 3])
            key = (min(a, b), max(a, b))
            if key in edge_vertex:
                continue
            da, db = d[key[0]], d[key[1]]
            if (da < 0 < db) or (db < 0 < da):
                s = da / (da - db)
                p = verts[key[0]] + s * (verts[key[1]] - verts[key[0]])
                edge_vertex[key] = nv + len(new_pts)
                new_pts.append(p)
    all_verts = np.concatenate([verts, np.array(new_pts).reshape(-1, 3)])

    below_tris = [tuple(t) for t in tris[below_mask].tolist()]
    above_tris = [tuple(t) for t in tris[above_mask].tolist()]
    below_tris += _clip_side(tris[cut], d, edge_vertex, True)
    above_tris += _clip_side(tris[cut], d, edge_vertex, False)

    below_arr = np.array(below_tris, dtype=np.int64).reshape(-1, 3)
    above_arr = np.array(above_tris, dtype=np.int64).reshape(-1, 3)

    u, v = _plane_basis(n)
    pts2d = np.stack([all_verts @ u, all_verts @ v], axis=1)
    loops = _boundary_loops(below_arr, pts2d)
    cap = []
    if loops:
        cap = triangulate_polygon_with_holes(loops, pts2d)
    cap_arr = np.array(cap, dtype=np.int64).reshape(-1, 3)
    below_arr = np.concatenate([below_arr, cap_arr])
    above_arr = np.concatenate([above_arr, cap_arr[:, ::-1]])

    def part(t):
        if len(t) == 0:
            return TriMesh.empty()
        return TriMesh(all_verts, t).compacted()

    return part(below_arr), part(above_arr)


def split_multi(mesh: TriMesh, planes) -> list:
    """Apply each plane in turn to every nonempty part, below-first."""
    parts = [mesh]
    for plane in planes:
        nxt = []
        for p in parts:
            below, above = split(p, plane)
            nxt.extend(q for q in (below, above) if not q.is_empty)
        parts = nxt
    return parts


# -------------------------------------------------------------------- base


def box_mesh(lo, hi) -> TriMesh:
    """Closed, outward-oriented axis-aligned box."""
    x0, y0, z0 = lo
    x1, y1, z1 = hi
    v = [
        (x0, y0, z0), (x1, y0, z0), (x1, y1, z0), (x0, y1, z0),
        (x0, y0, z1), (x1, y0, z1), (x1, y1, z1), (x0, y1, z1),
    ]
    t = [
        (0, 2, 1), (0, 3, 2),  # bottom
        (4, 5, 6), (4, 6, 7),  # top
        (0, 1, 5), (0, 5, 4),
        (1, 2, 6), (1, 6, 5),
        (2, 3, 7), (2, 7, 6),
        (3, 0, 4), (3, 4, 7),
    ]
    return TriMesh(v, t)


def cylinder_mesh(center_xy, radius, z0, z1, segments=64) -> TriMesh:
    """Closed prism approximating a vertical cylinder."""
    cx, cy = center_xy
    ang = 2.0 * np.pi * np.arange(segments) / segments
    ring = np.stack([cx + radius * np.cos(ang), cy + radius * np.sin(ang)], axis=1)
    bottom = np.column_stack([ring, np.full(segments, z0)])
    top = np.column_stack([ring, np.full(segments, z1)])
    centers = np.array([[cx, cy, z0], [cx, cy, z1]])
    verts = np.concatenate([bottom, top, centers])
    cb, ct = 2 * segments, 2 * segments + 1
    i = np.arange(segments)
    j = (i + 1) % segments
    tris = np.concatenate([
        np.stack([np.full(segments, cb), j, i], axis=1),
        np.stack([np.full(segments, ct), segments + i, segments + j], axis=1),
        np.stack([i, j, segments + j], axis=1),
        np.stack([i, segments + j, segments + i], axis=1),
    ])
    return TriMesh(verts, tris)


def add_base(mesh: TriMesh, base: BaseSpec) -> TriMesh:
    """Sit ``mesh`` on a support base; the result holds both closed shells.

    The object is lifted so its lowest point is ``height - embed`` above the
    build plate and the base is centred under its bounding box. Shells are
    concatenated, not merged, so overlapping volume is counted twice.
    """
    if mesh.is_empty:
        raise ValueError("cannot add a base to an empty mesh")
    lo, hi = mesh.bbox()
    obj = mesh.translated((0.0, 0.0, base.height - base.embed - lo[2]))
    cx, cy = 0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])

    if base.shape == "box":
        w, dpt = base.dims
        solid = box_mesh((cx - w / 2, cy - dpt / 2, 0.0), (cx + w / 2, cy + dpt / 2, base.height))
    else:
        r = base.dims[0] / 2
        solid = cylinder_mesh((cx, cy), r, 0.0, base.height)

    # footprint check against the object's lowest band
    v = mesh.vertices
    band = v[v[:, 2] <= lo[2] + max(base.embed, 1e-9 * max(1.0, hi[2] - lo[2]))]
    if len(band):
        if base.shape == "box":
            span = band[:, :2].max(axis=0) - band[:, :2].min(axis=0)
            small = span[0] > base.dims[0] or span[1] > base.dims[1]
        else:
            rad = np.hypot(band[:, 0] - cx, band[:, 1] - cy).max()
            small = rad > base.dims[0] / 2
        if small:
            warnings.warn(
                "base footprint is smaller than the object's lowest cross-section",
                stacklevel=2,
            )
    return concatenate([obj, solid])
