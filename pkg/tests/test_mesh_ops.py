import warnings

import numpy as np
import pytest
from _oracles import closed
from conftest import unit_cube
from hypothesis import given, settings
from hypothesis import strategies as st

from mathprint.fields import barth_field, shell_field, sphere
from mathprint.mesh import TriMesh, concatenate, measure, validate
from mathprint.mesh_ops import (
    BaseSpec,
    CapTriangulationError,
    SplitError,
    SplitPlane,
    add_base,
    box_mesh,
    cylinder_mesh,
    split,
    split_multi,
    triangulate_polygon_with_holes,
)
from mathprint.mesher import GridSpec, mesh_isosurface


def cross2(a, b, c):
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def random_plane(rng, reach=0.6):
    return SplitPlane.from_normal(rng.normal(size=3), rng.uniform(-reach, reach))


def assert_conserves(mesh, parts, rel=1e-6):
    v = measure(mesh).volume
    total = sum(measure(p).volume for p in parts)
    assert abs(total - v) <= rel * abs(v)


class TestSplitPlane:
    def test_requires_unit_normal(self):
        with pytest.raises(ValueError):
            SplitPlane((0.0, 0.0, 2.0), 0.0)

    def test_from_normal_normalizes(self):
        p = SplitPlane.from_normal((0, 3, 4), 1.0)
        assert np.linalg.norm(p.normal) == pytest.approx(1.0, abs=1e-12)
        assert p.normal == pytest.approx((0, 0.6, 0.8))

    def test_zero_normal(self):
        with pytest.raises(ValueError):
            SplitPlane.from_normal((0, 0, 0), 0.0)


class TestSplit:
    def test_cube_halves(self, cube):
        below, above = split(cube, SplitPlane((0.0, 0.0, 1.0), 0.5))
        for part in (below, above):
            assert closed(part)
            assert measure(part).volume == pytest.approx(0.5, abs=1e-15)
        assert below.bbox()[1][2] == 0.5
        assert above.bbox()[0][2] == 0.5

    def test_sphere_hemispheres(self, sphere_mesh_64):
        below, above = split(sphere_mesh_64, SplitPlane((0.0, 0.0, 1.0), 0.0))
        half = 2.0 / 3.0 * np.pi * 0.8**3
        for part in (below, above):
            assert closed(part)
            assert measure(part).volume == pytest.approx(half, rel=0.01)
        assert_conserves(sphere_mesh_64, (below, above))

    def test_mesh_entirely_below(self, cube):
        below, above = split(cube, SplitPlane((0.0, 0.0, 1.0), 2.0))
        assert below is cube
        assert above.is_empty

    def test_mesh_entirely_above(self, cube):
        below, above = split(cube, SplitPlane((0.0, 0.0, 1.0), -1.0))
        assert below.is_empty and above is cube

    def test_plane_through_face_keeps_mesh_whole(self, cube):
        # vertices on the plane count as below
        below, above = split(cube, SplitPlane((0.0, 0.0, 1.0), 1.0))
        assert measure(below).volume == pytest.approx(1.0)
        assert above.is_empty

    def test_plane_through_bottom_face(self, cube):
        below, above = split(cube, SplitPlane((0.0, 0.0, 1.0), 0.0))
        assert below.is_empty
        assert measure(above).volume == pytest.approx(1.0)
        assert closed(above)

    def test_cap_orientation(self, cube):
        n = np.array([0.0, 0.0, 1.0])
        below, above = split(cube, SplitPlane(tuple(n), 0.3))
        for part, sign in ((below, 1.0), (above, -1.0)):
            c = part.corners()
            on = np.all(np.abs(c[:, :, 2] - 0.3) < 1e-12, axis=1)
            normals = np.cross(c[on, 1] - c[on, 0], c[on, 2] - c[on, 0])
            assert on.any()
            assert np.all(normals @ n * sign > 0)

    def test_rejects_open_mesh(self, cube):
        holed = TriMesh(cube.vertices, cube.triangles[1:])
        with pytest.raises(SplitError, match="watertight"):
            split(holed, SplitPlane((0.0, 0.0, 1.0), 0.5))

    def test_hollow_shell_gives_annular_caps(self):
        mesh, _ = mesh_isosurface(shell_field(sphere(radius=1.0), 0.3), GridSpec.cube(1.4, 28))
        below, above = split(mesh, SplitPlane((0.0, 0.0, 1.0), 0.05))
        assert closed(below) and closed(above)
        assert validate(below).components == 1
        assert_conserves(mesh, (below, above), rel=1e-9)

    def test_barth_grid_aligned_cut(self):
        # z = 0 is a grid plane here, so many vertices lie exactly on the cut
        mesh, _ = mesh_isosurface(barth_field(), GridSpec.cube(2.2, 48), clip=sphere(radius=2.0))
        below, above = split(mesh, SplitPlane((0.0, 0.0, 1.0), 0.0))
        assert closed(below) and closed(above)
        assert_conserves(mesh, (below, above), rel=1e-9)

    def test_deterministic(self, sphere_mesh_24):
        plane = SplitPlane.from_normal((1, 2, 3), 0.1)
        a = split(sphere_mesh_24, plane)
        b = split(sphere_mesh_24, plane)
        for p, q in zip(a, b):
            np.testing.assert_array_equal(p.vertices, q.vertices)
            np.testing.assert_array_equal(p.triangles, q.triangles)

    def test_randomized_sphere_and_cube(self, sphere_mesh_24, rng):
        big_cube = unit_cube((-0.5, -0.5, -0.5))
        for i in range(60):
            mesh = sphere_mesh_24 if i % 2 else big_cube
            parts = [p for p in split(mesh, random_plane(rng)) if not p.is_empty]
            assert all(closed(p) for p in parts)
            assert_conserves(mesh, parts)


@settings(max_examples=40, deadline=None)
@given(
    st.tuples(*[st.floats(-1, 1) for _ in range(3)]).filter(lambda n: np.linalg.norm(n) > 1e-3),
    st.floats(-0.9, 0.9),
)
def test_split_property_box(normal, offset):
    mesh = box_mesh((-0.5, -0.4, -0.3), (0.5, 0.4, 0.3))
    parts = [p for p in split(mesh, SplitPlane.from_normal(normal, offset)) if not p.is_empty]
    assert all(closed(p) for p in parts)
    assert_conserves(mesh, parts, rel=1e-12)


class TestSplitMulti:
    def test_cube_slabs(self, cube):
        planes = [SplitPlane((0.0, 0.0, 1.0), z) for z in (0.25, 0.5, 0.75)]
        parts = split_multi(cube, planes)
        assert len(parts) == 4
        for k, p in enumerate(parts):
            assert closed(p)
            assert measure(p).volume == pytest.approx(0.25, abs=1e-15)
            assert p.bbox()[0][2] == pytest.approx(0.25 * k)

    def test_no_planes(self, cube):
        parts = split_multi(cube, [])
        assert len(parts) == 1 and parts[0] is cube

    def test_sphere_five_parts(self, sphere_mesh_64):
        planes = [SplitPlane((0.0, 0.0, 1.0), z) for z in (-0.5, -0.2, 0.2, 0.5)]
        parts = split_multi(sphere_mesh_64, planes)
        assert len(parts) == 5
        assert all(closed(p) for p in parts)
        assert_conserves(sphere_mesh_64, parts, rel=1e-6 * 5)

    def test_crossing_planes(self, sphere_mesh_24):
        planes = [SplitPlane((1.0, 0.0, 0.0), 0.0), SplitPlane((0.0, 1.0, 0.0), 0.0)]
        parts = split_multi(sphere_mesh_24, planes)
        assert len(parts) == 4
        assert_conserves(sphere_mesh_24, parts)


class TestPolygons:
    def test_square_with_hole(self):
        pts = np.array(
            [(0, 0), (4, 0), (4, 4), (0, 4), (1, 1), (3, 1), (3, 3), (1, 3)], dtype=float
        )
        tris = triangulate_polygon_with_holes([[0, 1, 2, 3], [4, 5, 6, 7]], pts)
        area = sum(0.5 * cross2(pts[a], pts[b], pts[c]) for a, b, c in tris)
        assert area == pytest.approx(12.0)
        for a, b, c in tris:
            assert cross2(pts[a], pts[b], pts[c]) >= 0

    def test_nested_island(self):
        # outer square, hole, island inside the hole
        sq = lambda s, o: [(o, o), (o + s, o), (o + s, o + s), (o, o + s)]
        pts = np.array(sq(10, 0) + sq(6, 2) + sq(2, 4), dtype=float)
        tris = triangulate_polygon_with_holes([[0, 1, 2, 3], [4, 5, 6, 7], [8, 9, 10, 11]], pts)
        area = sum(0.5 * cross2(pts[a], pts[b], pts[c]) for a, b, c in tris)
        assert area == pytest.approx(100 - 36 + 4)

    def test_concave_polygon(self):
        pts = np.array([(0, 0), (4, 0), (4, 4), (2, 1), (0, 4)], dtype=float)
        tris = triangulate_polygon_with_holes([[0, 1, 2, 3, 4]], pts)
        assert len(tris) == 3
        area = sum(0.5 * cross2(pts[a], pts[b], pts[c]) for a, b, c in tris)
        assert area == pytest.approx(10.0)

    def test_self_intersecting_loop_reports_vertices(self):
        pts = np.array([(0, 0), (2, 2), (2, 0), (0, 2)], dtype=float)
        with pytest.raises(CapTriangulationError) as err:
            triangulate_polygon_with_holes([[0, 1, 2, 3]], pts)
        assert len(err.value.loop) == 4


class TestBase:
    def test_spec_validation(self):
        with pytest.raises(ValueError):
            BaseSpec("box", (20, 20), 0.0)
        with pytest.raises(ValueError):
            BaseSpec("box", (20, 20), 3.0, -1.0)
        with pytest.raises(ValueError):
            BaseSpec("cylinder", (20, 20), 3.0)
        with pytest.raises(ValueError):
            BaseSpec("cone", (20,), 3.0)
        assert BaseSpec("cylinder", 60, 4.0).dims == (60.0,)

    def test_cube_on_box_base(self):
        cube10 = unit_cube(side=10.0)
        out = add_base(cube10, BaseSpec("box", (20.0, 20.0), 3.0, 1.0))
        rep = validate(out)
        assert rep.components == 2 and rep.multi_shell and rep.watertight
        # concatenation: overlap counted twice
        assert measure(out).volume == pytest.approx(1000 + 1200)
        lo, hi = out.bbox()
        assert lo[2] == 0.0
        obj_lo = out.vertices[: len(cube10.vertices)].min(axis=0)
        assert obj_lo[2] == pytest.approx(2.0)
        np.testing.assert_allclose(lo[:2], [-5, -5])

    def test_cylinder_base(self):
        out = add_base(unit_cube(side=10.0), BaseSpec("cylinder", (30.0,), 4.0, 0.0))
        rep = validate(out)
        assert rep.components == 2 and rep.watertight

    def test_small_footprint_warns(self):
        with pytest.warns(UserWarning, match="footprint"):
            add_base(unit_cube(side=10.0), BaseSpec("box", (5.0, 5.0), 2.0, 0.0))

    def test_adequate_footprint_silent(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            add_base(unit_cube(side=10.0), BaseSpec("box", (12.0, 12.0), 2.0, 0.0))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            add_base(TriMesh.empty(), BaseSpec("box", (5.0, 5.0), 2.0))

    def test_solids_are_closed(self):
        assert closed(box_mesh((0, 0, 0), (1, 2, 3)))
        cyl = cylinder_mesh((0, 0), 1.0, 0.0, 2.0)
        assert closed(cyl)
        assert len(cyl.triangles) == 4 * 64
        assert measure(cyl).volume == pytest.approx(64 / 2 * np.sin(2 * np.pi / 64) * 2.0)

    def test_concatenate_is_base_semantics(self, cube):
        both = concatenate([cube, unit_cube((2, 0, 0))])
        assert validate(both).components == 2
