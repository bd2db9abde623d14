"""Prepare implicit mathematical surfaces for low-cost FDM printing."""

__version__ = "0.1.0"

from mathprint.catalog import catalog_lookup, parse_object_name
from mathprint.cost import (
    PLA_REEL,
    ReelSpec,
    cost_per_meter,
    cost_table,
    estimate_filament_length,
    object_cost,
    reel_length,
)
from mathprint.expr import parse_expr
from mathprint.fields import (
    barth_field,
    box,
    csg_complement,
    csg_intersect,
    csg_union,
    expr_field,
    halfspace,
    shell_field,
    sphere,
)
from mathprint.io_formats import convert, read_stl, read_x3d, write_stl_binary
from mathprint.mesh import TriMesh, check_build_volume, measure, scale_to_fit, validate
from mathprint.mesh_ops import BaseSpec, SplitPlane, add_base, split, split_multi
from mathprint.mesher import GridSpec, mesh_isosurface, vertex_residuals
from mathprint.pipeline import run_plan
from mathprint.plan import PrintPlan, load_plan

__all__ = [
    "__version__",
    "catalog_lookup",
    "parse_object_name",
    "PLA_REEL",
    "ReelSpec",
    "cost_per_meter",
    "cost_table",
    "estimate_filament_length",
    "object_cost",
    "reel_length",
    "parse_expr",
    "barth_field",
    "box",
    "csg_complement",
    "csg_intersect",
    "csg_union",
    "expr_field",
    "halfspace",
    "shell_field",
    "sphere",
    "convert",
    "read_stl",
    "read_x3d",
    "write_stl_binary",
    "TriMesh",
    "check_build_volume",
    "measure",
    "scale_to_fit",
    "validate",
    "BaseSpec",
    "SplitPlane",
    "add_base",
    "split",
    "split_multi",
    "GridSpec",
    "mesh_isosurface",
    "vertex_residuals",
    "run_plan",
    "PrintPlan",
    "load_plan",
]
