"""Command-line interface: ``mathprint <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 processing error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import re
import sys
from pathlib import Path

from mathprint import __version__
from mathprint.catalog import UnknownObjectError, catalog_lookup
from mathprint.cost import (
    PLA_REEL,
    CostRow,
    ReelSpec,
    cost_per_meter,
    cost_table,
    estimate_filament_length,
    exhibition_rows,
    format_csv,
    format_table,
    object_cost,
    reel_length,
)
from mathprint.expr import ExprError
from mathprint.fields import expr_field, shell_field, sphere
from mathprint.io_formats import convert, read_mesh, write_stl
from mathprint.mesh import measure, scale_to_fit, validate
from mathprint.mesh_ops import BaseSpec, SplitPlane, add_base, split_multi
from mathprint.mesher import GridSpec, mesh_isosurface
from mathprint.pipeline import PipelineError, run_plan
from mathprint.plan import load_plan

EXIT_OK, EXIT_USAGE, EXIT_PROCESSING = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let "-2.2,2.2" be a value rather than an unknown option
        self._negative_number_matcher = re.compile(r"^-\d*\.?\d+(?:[eE][-+]?\d+)?(?:,[-+\d.eE]+)*$")

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _floats(text: str, n=None, what="value"):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{what} must be comma-separated numbers with point decimals, got {text!r}") from None
    if n is not None and len(vals) not in (n if isinstance(n, tuple) else (n,)):
        raise UsageError(f"{what} needs {n} numbers, got {text!r}")
    return vals


def _emit(args, data: dict, text: str):
    if getattr(args, "json", False):
        print(json.dumps(data, indent=2, sort_keys=True, default=_jsonable))
    else:
        print(text)


def _jsonable(o):
    if hasattr(o, "tolist"):
        return o.tolist()
    if hasattr(o, "to_dict"):
        return o.to_dict()
    return str(o)


def _report_text(rep) -> str:
    lines = [
        f"watertight: {rep.watertight}",
        f"consistent orientation: {rep.consistent_orientation}",
        f"degenerate triangles: {rep.degenerate_triangles}",
        f"components: {rep.components}",
        f"triangles: {rep.triangle_count}",
    ]
    if rep.bbox is not None:
        lo, hi = rep.bbox
        ext = [b - a for a, b in zip(lo, hi)]
        lines.append("extents (mm): " + " x ".join(f"{e:.3f}" for e in ext))
    lines.extend(f"note: {n}" for n in rep.notes)
    return "\n".join(lines)


# ---------------------------------------------------------------- commands


def _field_from_args(args, thickness=None):
    if args.expr is not None:
        fld = expr_field(args.expr)
    else:
        entry = catalog_lookup(args.surface)
        if entry.field is None:
            raise UsageError(f"surface {args.surface!r} has no equation; supply its mesh as a file")
        fld = entry.field
    if thickness is not None:
        fld = shell_field(fld, thickness)
    return fld


def _grid_from_args(args) -> GridSpec:
    a, b = _floats(args.bounds, 2, "--bounds")
    res = [int(v) for v in _floats(args.res, (1, 3), "--res")]
    return GridSpec((a, a, a), (b, b, b), res[0] if len(res) == 1 else tuple(res))


def cmd_mesh(args, thickness=None):
    fld = _field_from_args(args, thickness)
    clip = sphere(radius=args.clip_sphere) if args.clip_sphere is not None else None
    mesh, mrep = mesh_isosurface(fld, _grid_from_args(args), clip=clip, workers=args.workers)
    write_stl(mesh, args.output, ascii=args.ascii)
    rep = validate(mesh)
    data = {"output": args.output, "mesh": mrep.to_dict(), "validity": rep.to_dict()}
    _emit(args, data, f"wrote {args.output}: {len(mesh.triangles)} triangles\n" + _report_text(rep))
    return EXIT_OK


def cmd_shell(args):
    return cmd_mesh(args, thickness=args.thickness)


def cmd_split(args):
    mesh = read_mesh(args.input)
    planes = []
    for p in args.plane:
        v = _floats(p, 4, "--plane")
        planes.append(SplitPlane.from_normal(v[:3], v[3]))
    parts = split_multi(mesh, planes)
    out = []
    prefix = args.output[:-4] if args.output.lower().endswith(".stl") else args.output
    for i, part in enumerate(parts):
        path = f"{prefix}_part{i}.stl"
        write_stl(part, path, ascii=args.ascii)
        out.append({"path": path, "triangles": len(part.triangles), "volume": measure(part).volume,
                    "watertight": validate(part).watertight})
    text = "\n".join(f"{o['path']}: {o['triangles']} triangles, volume {o['volume']:.6g}" for o in out)
    _emit(args, {"parts": out}, text)
    return EXIT_OK


def cmd_scale(args):
    mesh = read_mesh(args.input)
    if (args.fit is None) == (args.fit_xyz is None):
        raise UsageError("scale needs exactly one of --fit or --fit-xyz")
    target = args.fit if args.fit is not None else _floats(args.fit_xyz, 3, "--fit-xyz")
    out = scale_to_fit(mesh, target)
    write_stl(out, args.output, ascii=args.ascii)
    ext = [float(e) for e in out.extents()]
    _emit(args, {"output": args.output, "extents_mm": ext},
          f"wrote {args.output}: extents " + " x ".join(f"{e:.3f}" for e in ext) + " mm")
    return EXIT_OK


def cmd_base(args):
    mesh = read_mesh(args.input)
    dims = _floats(args.dims, (1, 2), "--dims")
    shape = "cylinder" if args.shape in ("cyl", "cylinder") else "box"
    out = add_base(mesh, BaseSpec(shape, tuple(dims), args.height, args.embed))
    write_stl(out, args.output, ascii=args.ascii)
    rep = validate(out)
    _emit(args, {"output": args.output, "validity": rep.to_dict()},
          f"wrote {args.output}\n" + _report_text(rep))
    return EXIT_OK


def cmd_validate(args):
    mesh = read_mesh(args.input)
    rep = validate(mesh)
    m = measure(mesh)
    data = rep.to_dict()
    data.update(area=m.area, volume=m.volume)
    _emit(args, data, _report_text(rep) + f"\narea: {m.area:.6g}\nvolume: {m.volume:.6g}")
    return EXIT_OK


def cmd_convert(args):
    rep = convert(args.input, args.output, ascii=args.ascii)
    _emit(args, {"output": args.output, "validity": rep.to_dict()},
          f"wrote {args.output}\n" + _report_text(rep))
    return EXIT_OK


def cmd_cost(args):
    reel = ReelSpec(args.reel_mass, args.reel_cost, args.diameter, args.density)
    if args.table is not None:
        if args.table == "exhibition":
            rows = exhibition_rows()
        else:
            with open(args.table, newline="", encoding="utf-8") as fh:
                rows = [
                    CostRow(r["name"], r.get("author", ""), r.get("size_mm", ""), float(r["length_m"]), str(i + 1))
                    for i, r in enumerate(csv.DictReader(fh))
                ]
        table = cost_table(rows, reel)
        if args.json:
            _emit(args, {"reel_length_m": reel_length(reel), "cost_per_meter": cost_per_meter(reel), "rows": table}, "")
        else:
            print(format_csv(table) if args.csv else format_table(table), end="")
        return EXIT_OK
    if args.length is not None:
        length, provenance = args.length, "measured-length"
    elif args.input is not None:
        mesh = read_mesh(args.input)
        length = estimate_filament_length(mesh, reel, args.flow)
        provenance = "volume-estimate"
    else:
        rl, rate = reel_length(reel), cost_per_meter(reel)
        _emit(args, {"reel_length_m": rl, "cost_per_meter": rate},
              f"reel length: {rl:.10f} m\ncost per meter: {rate:.10f} EUR/m")
        return EXIT_OK
    if length < 0:
        raise UsageError("--length must be non-negative")
    cost = object_cost(length, reel)
    data = {"filament_length_m": length, "cost_per_meter": cost_per_meter(reel),
            "object_cost_eur": cost, "provenance": provenance}
    _emit(args, data, f"{cost:.2f}")
    return EXIT_OK


def cmd_run(args):
    path = Path(args.plan)
    if path.exists() or path.suffix:
        plan = load_plan(path)
        base_dir = path.resolve().parent
    else:
        # a bare catalog name runs that entry's default plan in the cwd
        plan = catalog_lookup(args.plan).default_plan
        base_dir = Path.cwd()
    overrides = {}
    if args.bounds is not None:
        overrides["bounds"] = tuple(_floats(args.bounds, 2, "--bounds"))
    if args.res is not None:
        res = [int(v) for v in _floats(args.res, (1, 3), "--res")]
        overrides["resolution"] = res[0] if len(res) == 1 else tuple(res)
    plan = dataclasses.replace(plan, **overrides)
    rep = run_plan(plan, None, PLA_REEL, base_dir=base_dir, workers=args.workers)
    lines = [f"{p.path}: {p.triangles} triangles, {p.filament_m:.3f} m, {p.cost_eur:.2f} EUR"
             + ("" if p.within_build_volume else " (exceeds build volume)") for p in rep.parts]
    lines.append(f"total: {rep.total_filament_m:.3f} m, {rep.total_cost_eur:.2f} EUR (volume estimate)")
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    _emit(args, rep.to_dict(), "\n".join(lines))
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mathprint", description="Prepare mathematical surfaces for FDM printing.")
    p.add_argument("--version", action="version", version=f"mathprint {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(sp, output=True):
        sp.add_argument("--json", action="store_true", help="machine-readable report")
        if output:
            sp.add_argument("--ascii", action="store_true", help="write ASCII STL")

    def field_opts(sp):
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--surface", help="catalog surface with an equation (barth)")
        src.add_argument("--expr", help="implicit expression in x, y, z")
        sp.add_argument("--bounds", default="-2.2,2.2", help="grid bounds a,b (all axes)")
        sp.add_argument("--res", default="128", help="cells per axis: n or nx,ny,nz")
        sp.add_argument("--clip-sphere", type=float, help="clip to a sphere of this radius")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("-o", "--output", required=True)

    sp = sub.add_parser("mesh", help="mesh an implicit surface")
    field_opts(sp)
    sp.add_argument("--shell", type=float, help="thicken to a shell of this width (field units)")
    common(sp)
    sp.set_defaults(func=lambda a: cmd_mesh(a, thickness=a.shell))

    sp = sub.add_parser("shell", help="mesh a thickened implicit surface")
    field_opts(sp)
    sp.add_argument("--thickness", type=float, required=True, help="shell width (field units)")
    common(sp)
    sp.set_defaults(func=cmd_shell)

    sp = sub.add_parser("split", help="cut a closed mesh by planes")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--plane", action="append", required=True, help="nx,ny,nz,offset (repeatable)")
    sp.add_argument("-o", "--output", required=True, help="output prefix")
    common(sp)
    sp.set_defaults(func=cmd_split)

    sp = sub.add_parser("scale", help="scale a mesh to a target size")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--fit", type=float, help="longest axis in mm")
    sp.add_argument("--fit-xyz", help="box X,Y,Z in mm")
    sp.add_argument("-o", "--output", required=True)
    common(sp)
    sp.set_defaults(func=cmd_scale)

    sp = sub.add_parser("base", help="add a support base")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--shape", choices=("box", "cyl", "cylinder"), required=True)
    sp.add_argument("--dims", required=True, help="box: W,D; cylinder: diameter (mm)")
    sp.add_argument("--height", type=float, required=True)
    sp.add_argument("--embed", type=float, default=0.0)
    sp.add_argument("-o", "--output", required=True)
    common(sp)
    sp.set_defaults(func=cmd_base)

    sp = sub.add_parser("validate", help="check a mesh file")
    sp.add_argument("-i", "--input", required=True)
    common(sp, output=False)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("convert", help="convert X3D or STL to STL")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("-o", "--output", required=True)
    common(sp)
    sp.set_defaults(func=cmd_convert)

    sp = sub.add_parser("cost", help="filament length and cost")
    src = sp.add_mutually_exclusive_group()
    src.add_argument("--length", type=float, help="filament length in metres")
    src.add_argument("-i", "--input", help="estimate from a closed mesh in mm")
    src.add_argument("--table", help="'exhibition' or a CSV with name,author,size_mm,length_m")
    sp.add_argument("--flow", type=float, default=1.0)
    sp.add_argument("--reel-mass", type=float, default=PLA_REEL.mass_kg, help="kg")
    sp.add_argument("--reel-cost", type=float, default=PLA_REEL.cost_eur, help="EUR")
    sp.add_argument("--diameter", type=float, default=PLA_REEL.diameter_mm, help="mm")
    sp.add_argument("--density", type=float, default=PLA_REEL.density_kg_m3, help="kg/m^3")
    sp.add_argument("--csv", action="store_true", help="table as CSV")
    common(sp, output=False)
    sp.set_defaults(func=cmd_cost)

    sp = sub.add_parser("run", help="execute a JSON print plan")
    sp.add_argument("-p", "--plan", required=True, help="plan file, or a catalog name for its default plan")
    sp.add_argument("--res", help="override grid resolution")
    sp.add_argument("--bounds", help="override grid bounds a,b")
    sp.add_argument("--workers", type=int, default=1)
    common(sp, output=False)
    sp.set_defaults(func=cmd_run)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except (UnknownObjectError, ExprError) as exc:
        print(f"mathprint: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PipelineError, ValueError, OSError) as exc:
        print(f"mathprint: error: {exc}", file=sys.stderr)
        return EXIT_PROCESSING


if __name__ == "__main__":
    sys.exit(main())
