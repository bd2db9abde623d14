import numpy as np
import pytest

from mathprint.fields import box, sphere
from mathprint.mesh import TriMesh
from mathprint.mesher import GridSpec, mesh_isosurface

TETRA_X3D = """<?xml version="1.0" encoding="UTF-8"?>
<X3D profile="Interchange" version="3.2">
  <Scene>
    <Shape>
      <IndexedFaceSet coordIndex="0 2 1 -1 0 1 3 -1 1 2 3 -1 0 3 2 -1">
        <Coordinate point="0 0 0  1 0 0  0 1 0  0 0 1"/>
      </IndexedFaceSet>
    </Shape>
  </Scene>
</X3D>
"""


def unit_cube(lo=(0.0, 0.0, 0.0), side=1.0) -> TriMesh:
    """12-triangle outward cube."""
    x0, y0, z0 = lo
    x1, y1, z1 = x0 + side, y0 + side, z0 + side
    v = [
        (x0, y0, z0), (x1, y0, z0), (x1, y1, z0), (x0, y1, z0),
        (x0, y0, z1), (x1, y0, z1), (x1, y1, z1), (x0, y1, z1),
    ]
    t = [
        (0, 2, 1), (0, 3, 2), (4, 5, 6), (4, 6, 7),
        (0, 1, 5), (0, 5, 4), (2, 3, 7), (2, 7, 6),
        (1, 2, 6), (1, 6, 5), (3, 0, 4), (3, 4, 7),
    ]
    return TriMesh(v, t)


@pytest.fixture
def cube():
    return unit_cube()


@pytest.fixture(scope="session")
def sphere_mesh_64():
    mesh, _ = mesh_isosurface(sphere(radius=0.8), GridSpec.cube(1.0, 64))
    return mesh


@pytest.fixture(scope="session")
def sphere_mesh_24():
    mesh, _ = mesh_isosurface(sphere(radius=0.8), GridSpec.cube(1.0, 24))
    return mesh


@pytest.fixture(scope="session")
def box_mesh_20():
    mesh, _ = mesh_isosurface(box((-0.7, -0.6, -0.5), (0.7, 0.6, 0.5)), GridSpec.cube(1.0, 20))
    return mesh


@pytest.fixture
def tetra_x3d():
    return TETRA_X3D


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
