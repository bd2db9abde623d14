# %% [markdown]
# # Cutting a model into printable parts
#
# A model larger than the build volume is cut by planes. Each cut clips the
# triangles, collects the cross-section loops and closes both sides with
# planar caps, so every part stays watertight.

# %%
from mathprint.fields import shell_field, sphere
from mathprint.mesh import measure, scale_to_fit, validate
from mathprint.mesh_ops import BaseSpec, SplitPlane, add_base, split, split_multi
from mathprint.mesher import GridSpec, mesh_isosurface

hollow, _ = mesh_isosurface(shell_field(sphere(radius=1.0), 0.2), GridSpec.cube(1.3, 48))
hollow = scale_to_fit(hollow, 150.0)
lo, hi = hollow.bbox()
hollow = hollow.translated(-(lo + hi) / 2)
print("hollow ball extents (mm):", hollow.extents().round(2))

# %% [markdown]
# Two halves: the caps are annuli because the ball is hollow.

# %%
below, above = split(hollow, SplitPlane((0.0, 0.0, 1.0), 0.0))
total = measure(below).volume + measure(above).volume
print("parts watertight:", validate(below).watertight, validate(above).watertight)
print(f"volume before {measure(hollow).volume:.2f} mm^3, after {total:.2f} mm^3")

# %% [markdown]
# Five slabs from four parallel planes.

# %%
slabs = split_multi(hollow, [SplitPlane((0.0, 0.0, 1.0), z) for z in (-45.0, -15.0, 15.0, 45.0)])
for i, s in enumerate(slabs):
    print(f"slab {i}: {len(s.triangles)} triangles, height {s.extents()[2]:.1f} mm")

# %% [markdown]
# A support base is a separate closed solid placed under the part; slicers
# merge overlapping shells, so no mesh boolean is needed.

# %%
based = add_base(below, BaseSpec("cylinder", (100.0,), 4.0, 1.0))
rep = validate(based)
print("with base: components", rep.components, " watertight", rep.watertight)
