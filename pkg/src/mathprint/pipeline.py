"""End-to-end execution of a :class:`~mathprint.plan.PrintPlan`.

Stages run in a fixed order: acquire mesh, scale, centre, build-volume check,
split, base, validate, write, cost. Any failure aborts the job, removes files
already written and raises :class:`PipelineError` naming the stage.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from mathprint.catalog import UnknownObjectError, catalog_lookup
from mathprint.cost import PLA_REEL, ReelSpec, estimate_filament_length, object_cost
from mathprint.fields import ScalarField, expr_field, shell_field, sphere
from mathprint.io_formats import as_written, read_mesh, read_stl, write_stl
from mathprint.mesh import check_build_volume, measure, scale_to_fit, validate
from mathprint.mesh_ops import add_base, split_multi
from mathprint.mesher import GridSpec, mesh_isosurface
from mathprint.plan import PrintPlan

__all__ = ["PipelineError", "PartReport", "JobReport", "run_plan", "resolve_field"]

log = logging.getLogger(__name__)

DEFAULT_RESOLUTION = 128


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException | str):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")


@dataclass
class PartReport:
    path: str
    triangles: int
    bbox_mm: tuple
    watertight: bool
    volume_mm3: float
    base_volume_mm3: float
    within_build_volume: bool
    filament_m: float
    cost_eur: float


@dataclass
class JobReport:
    name: str
    parts: list = field(default_factory=list)
    scale_factor: float = 1.0
    pre_split_volume_mm3: float = 0.0
    total_filament_m: float = 0.0
    total_cost_eur: float = 0.0
    build_volume_override: bool = False
    warnings: list = field(default_factory=list)
    mesh_report: dict | None = None

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["parts"] = [dict(p.__dict__) for p in self.parts]
        return d


def resolve_field(plan: PrintPlan) -> ScalarField | None:
    """Field for field-backed plans, ``None`` for file sources."""
    if plan.expr is not None:
        return expr_field(plan.expr)
    try:
        entry = catalog_lookup(plan.source)
    except UnknownObjectError:
        return None
    return entry.field


def _target_extent(plan: PrintPlan):
    t = plan.target_size_mm
    if t is None:
        return None
    return float(min(t)) if isinstance(t, tuple) else float(t)


def _acquire(plan: PrintPlan, grid: GridSpec | None, base_dir: Path, workers: int):
    fld = resolve_field(plan)
    if fld is None:
        if plan.source is not None and Path(plan.source).suffix.lower() in (".stl", ".x3d"):
            path = Path(plan.source)
            if not path.is_absolute():
                path = base_dir / path
            if plan.shell_thickness_mm is not None:
                log.info("shell thickness ignored for mesh file sources")
            return read_mesh(path), None
        raise ValueError(f"source {plan.source!r} is neither a catalog surface nor an .stl/.x3d file")

    clip_r = plan.clip_radius
    if clip_r is None and plan.source is not None:
        clip_r = catalog_lookup(plan.source).default_clip_radius
    if grid is None:
        if plan.bounds is not None:
            a, b = plan.bounds
        elif clip_r is not None:
            a, b = -1.1 * clip_r, 1.1 * clip_r
        else:
            raise ValueError("field sources need grid bounds or a clip radius")
        grid = GridSpec((a, a, a), (b, b, b), plan.resolution or DEFAULT_RESOLUTION)

    if plan.shell_thickness_mm is not None:
        # field units per millimetre follow from the clip diameter (or grid
        # width) being scaled to the target size
        extent = 2.0 * clip_r if clip_r is not None else float(min(np.subtract(grid.hi, grid.lo)))
        target = _target_extent(plan)
        mm_per_unit = target / extent if target else 1.0
        fld = shell_field(fld, plan.shell_thickness_mm / mm_per_unit)
    clip = sphere(radius=clip_r) if clip_r is not None else None
    mesh, report = mesh_isosurface(fld, grid, clip=clip, workers=workers)
    return mesh, report


def run_plan(
    plan: PrintPlan,
    grid: GridSpec | None = None,
    reel: ReelSpec = PLA_REEL,
    base_dir=None,
    workers: int = 1,
) -> JobReport:
    """Execute ``plan`` and write one STL per part.

    ``base_dir`` anchors relative source and output paths (default: cwd).
    """
    base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
    report = JobReport(plan.name)
    written: list[Path] = []
    stage = "acquire"
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            mesh, mrep = _acquire(plan, grid, base_dir, workers)
            if mrep is not None:
                report.mesh_report = mrep.to_dict()
                report.warnings.extend(mrep.flags)

            stage = "validate-input"
            rep = validate(mesh)
            if not rep.watertight:
                raise ValueError(f"input mesh is not watertight: {'; '.join(rep.notes)}")

            stage = "scale"
            scale = 1.0
            unscaled = mesh
            if plan.target_size_mm is not None:
                mesh = scale_to_fit(mesh, plan.target_size_mm)
                scale = float(np.max(mesh.extents()) / np.max(unscaled.extents()))
            report.scale_factor = scale
            lo, hi = mesh.bbox()
            mesh = mesh.translated(-0.5 * (lo + hi))

            stage = "build-volume"
            if not check_build_volume(mesh, plan.build_volume_mm):
                ext = ", ".join(f"{e:.1f}" for e in mesh.extents())
                msg = f"object extents ({ext}) mm exceed the build volume {plan.build_volume_mm}"
                if plan.strict:
                    raise ValueError(msg)
                report.warnings.append(msg)
                report.build_volume_override = True
            report.pre_split_volume_mm3 = measure(mesh).volume

            stage = "split"
            if plan.split_first and plan.split_planes:
                lo, hi = unscaled.bbox()
                centred = unscaled.translated(-0.5 * (lo + hi))
                parts = [p.transformed(scale=scale) for p in split_multi(centred, plan.split_planes)]
            else:
                parts = split_multi(mesh, plan.split_planes)

            stage = "base"
            object_volumes = [measure(p).volume for p in parts]
            base_volumes = [0.0] * len(parts)
            if plan.base is not None:
                based = []
                for i, p in enumerate(parts):
                    b = add_base(p, plan.base)
                    base_volumes[i] = measure(b).volume - object_volumes[i]
                    based.append(b)
                parts = based

            stage = "validate"
            # check what the files will hold: float32 rounding can merge the
            # corners of sliver triangles, which the reader then drops
            parts = [as_written(p) for p in parts]
            reports = [validate(p) for p in parts]
            for i, r in enumerate(reports):
                if not r.watertight:
                    raise ValueError(f"part {i} is not watertight")

            stage = "write"
            paths = plan.output_paths(len(parts), base_dir)
            for p, path in zip(parts, paths):
                path.parent.mkdir(parents=True, exist_ok=True)
                write_stl(p, path, header=f"mathprint {plan.name}")
                written.append(path)

            stage = "cost"
            total_len = 0.0
            for p, path, r, vol, bvol in zip(parts, paths, reports, object_volumes, base_volumes):
                length = estimate_filament_length(p, reel, plan.flow_factor)
                total_len += length
                fits = check_build_volume(p, plan.build_volume_mm)
                if not fits:
                    report.build_volume_override = True
                report.parts.append(
                    PartReport(
                        path=str(path),
                        triangles=len(p.triangles),
                        bbox_mm=tuple(tuple(c) for c in r.bbox),
                        watertight=r.watertight,
                        volume_mm3=vol,
                        base_volume_mm3=bvol,
                        within_build_volume=fits,
                        filament_m=length,
                        cost_eur=object_cost(length, reel),
                    )
                )
            report.total_filament_m = total_len
            report.total_cost_eur = object_cost(total_len, reel)
        report.warnings.extend(str(w.message) for w in caught)
    except Exception as exc:
        for path in written:
            path.unlink(missing_ok=True)
        if isinstance(exc, PipelineError):
            raise
        raise PipelineError(stage, exc) from exc
    return report


def reread_counts(report: JobReport) -> list[int]:
    """Triangle counts of the written parts, read back from disk."""
    return [len(read_stl(Path(p.path).read_bytes()).triangles) for p in report.parts]
