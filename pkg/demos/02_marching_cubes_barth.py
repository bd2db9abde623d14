# %% [markdown]
# # Meshing the Barth sextic
#
# Marching cubes samples the field on a regular grid and places one vertex
# on every grid edge with a sign change. Vertices are identified by edge, so
# the mesh is closed without any tolerance-based welding.

# %%
import time

from mathprint.fields import barth_field, csg_intersect, sphere
from mathprint.mesh import measure, validate
from mathprint.mesher import GridSpec, mesh_isosurface, vertex_residuals

grid = GridSpec.cube(2.2, 96)
t0 = time.perf_counter()
mesh, report = mesh_isosurface(barth_field(), grid, clip=sphere(radius=2.0), workers=2)
print(f"{report.triangle_count} triangles, {report.vertex_count} vertices in {time.perf_counter() - t0:.2f} s")

# %% [markdown]
# Topology and measures. Every piece is closed and consistently oriented.
# The solid inside the sextic touches itself only at its singular nodes, so
# on a grid it falls apart into separate pieces, each a topological sphere.

# %%
rep = validate(mesh)
m = measure(mesh)
print("watertight:", rep.watertight, " components:", rep.components, " chi:", rep.euler_characteristic)
print(f"area {m.area:.4f}, enclosed volume {m.volume:.4f} (field units)")

# %% [markdown]
# How far do vertices sit from the true zero set? Linear interpolation on
# each edge is exact only for linear fields. The worst vertices sit next to
# the singular nodes, where the field curves sharply, so the maximum shrinks
# slowly. The residual is measured on the clipped field, which is what was
# meshed.

# %%
clipped = csg_intersect(barth_field(), sphere(radius=2.0))
for n in (32, 64, 96):
    msh, _ = mesh_isosurface(barth_field(), GridSpec.cube(2.2, n), clip=sphere(radius=2.0))
    print(f"{n:3d}^3: max |f(v)| = {vertex_residuals(clipped, msh).max:.3e}")

# %% [markdown]
# A sphere gives a quick convergence check against analytic values.

# %%
import math

for n in (32, 64, 128):
    ball, _ = mesh_isosurface(sphere(radius=0.8), GridSpec.cube(1.0, n))
    area = measure(ball).area
    print(f"{n:3d}^3: area error {abs(area - 4 * math.pi * 0.64) / (4 * math.pi * 0.64):.2e}")
