# %% [markdown]
# # STL and X3D
#
# Binary STL stores an 80-byte header, a triangle count and one 50-byte
# record per facet with float32 coordinates. X3D scenes describe meshes as
# IndexedFaceSet nodes that can be nested in transforms.

# %%
import tempfile
from pathlib import Path

from mathprint.io_formats import (
    convert,
    read_stl,
    read_x3d,
    write_stl,
    write_stl_ascii,
    write_stl_binary,
)
from mathprint.mesh_ops import box_mesh

cube = box_mesh((0, 0, 0), (1, 1, 1))
data = write_stl_binary(cube)
print("cube STL bytes:", len(data))
back = read_stl(data)
print("read back:", len(back.triangles), "triangles,", len(back.vertices), "welded vertices")
print(write_stl_ascii(cube).decode().splitlines()[:4])

# %% [markdown]
# An X3D tetrahedron inside a scaling transform, converted to STL.

# %%
x3d = """<X3D><Scene><Transform scale='20 20 20'><Shape>
  <IndexedFaceSet coordIndex='0 2 1 -1 0 1 3 -1 1 2 3 -1 0 3 2 -1'>
    <Coordinate point='0 0 0 1 0 0 0 1 0 0 0 1'/>
  </IndexedFaceSet></Shape></Transform></Scene></X3D>"""
print("tetrahedron bbox:", read_x3d(x3d).bbox())

with tempfile.TemporaryDirectory() as tmp:
    src = Path(tmp) / "tetra.x3d"
    src.write_text(x3d)
    rep = convert(src, Path(tmp) / "tetra.stl")
    print("converted, watertight:", rep.watertight, " size:", (Path(tmp) / "tetra.stl").stat().st_size, "bytes")
    write_stl(cube, Path(tmp) / "cube.stl")
