# %% [markdown]
# # A whole job from a plan
#
# A plan bundles source, scaling, cuts, base and outputs. Running it meshes
# or reads the model, scales it, checks the build volume, cuts, adds a base,
# validates, writes one STL per part and estimates the filament.

# %%
import json
import tempfile
from dataclasses import replace
from pathlib import Path

from mathprint.catalog import catalog_lookup
from mathprint.pipeline import run_plan
from mathprint.plan import PrintPlan

plan = PrintPlan.from_dict({
    "name": "torus",
    "expr": "(sqrt(x^2+y^2) - 1)^2 + z^2 - 0.16",
    "bounds": [-1.6, 1.6],
    "resolution": 64,
    "target_size_mm": 120,
    "split_planes": [[0, 0, 1, 0.0]],
    "outputs": "torus",
})
print(json.dumps(plan.to_dict(), indent=2))

# %%
with tempfile.TemporaryDirectory() as tmp:
    rep = run_plan(plan, base_dir=tmp)
    for p in rep.parts:
        print(f"{Path(p.path).name}: {p.triangles} triangles, {p.filament_m:.2f} m, {p.cost_eur:.2f} EUR")
    print(f"total {rep.total_filament_m:.2f} m, {rep.total_cost_eur:.2f} EUR")

# %% [markdown]
# The catalog holds the Barth sextic's default plan: a 2.1 mm shell, scaled
# to 200 mm and printed as two halves. A coarse grid keeps this quick.

# %%
barth = replace(catalog_lookup("barth").default_plan, resolution=64)
with tempfile.TemporaryDirectory() as tmp:
    rep = run_plan(barth, base_dir=tmp)
    for p in rep.parts:
        ext = [round(b - a, 1) for a, b in zip(*p.bbox_mm)]
        print(f"{Path(p.path).name}: extents {ext} mm, within build volume {p.within_build_volume}")
