# %% [markdown]
# # What does a print cost?
#
# A coil of mass m, filament diameter d and density rho holds
# L = m / (rho * pi * (d/2)^2) metres of filament. The coil price over L is
# the cost per metre.

# %%
from mathprint.cost import (
    PLA_REEL,
    ReelSpec,
    cost_per_meter,
    cost_table,
    estimate_filament_length,
    exhibition_rows,
    format_table,
    object_cost,
    reel_length,
)
from mathprint.mesh_ops import box_mesh

print(f"PLA coil: {reel_length(PLA_REEL):.10f} m at {cost_per_meter(PLA_REEL):.10f} EUR/m")
print("19.52 m of filament costs", object_cost(19.52), "EUR")

# %% [markdown]
# The exhibition cost table: filament lengths come from a slicer and are
# inputs here; the costs follow from the coil.

# %%
print(format_table(cost_table(exhibition_rows())))

# %% [markdown]
# Without a slicer, a solid's volume over the filament cross-section gives a
# rough length. Infill and perimeters make real prints use less.

# %%
cube = box_mesh((0, 0, 0), (10, 10, 10))
length = estimate_filament_length(cube)
print(f"10 mm solid cube: {length:.5f} m, {object_cost(length):.2f} EUR")
thin = ReelSpec(diameter_mm=1.75)
print(f"on a 1.75 mm coil: {reel_length(thin):.1f} m per kg")
