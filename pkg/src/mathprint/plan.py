"""Print plans: one object's preparation recipe, stored as JSON.

Plan file keys (all but one of ``source``/``expr`` optional)::

    {
      "name": "barth",
      "source": "barth",            # catalog name or path to .stl/.x3d
      "expr": "x^2+y^2+z^2-1",      # alternative to source
      "clip_radius": 2.0,           # field units, implicit sphere clip
      "shell_thickness_mm": 2.1,
      "target_size_mm": 200,        # longest axis, or [x, y, z]
      "split_planes": [[0, 0, 1, 0.0]],
      "base": {"shape": "cylinder", "dims": [60], "height": 4, "embed": 1},
      "outputs": "out/barth",       # prefix, or a list with one path per part
      "strict": false,
      "split_first": false,
      "bounds": [-2.2, 2.2],        # meshing grid, field sources only
      "resolution": 128,
      "flow_factor": 1.0
    }

Split offsets are millimetres from the centre of the scaled object, which
the pipeline moves to the origin before splitting.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from mathprint.mesh import BUILD_VOLUME_MM
from mathprint.mesh_ops import BaseSpec, SplitPlane

__all__ = ["PrintPlan", "PlanError", "load_plan", "dump_plan"]

_KEYS = {
    "name", "source", "expr", "clip_radius", "shell_thickness_mm", "target_size_mm",
    "split_planes", "base", "outputs", "strict", "split_first", "bounds", "resolution",
    "flow_factor", "build_volume_mm",
}


class PlanError(ValueError):
    pass


@dataclass(frozen=True)
class PrintPlan:
    source: str | None = None
    expr: str | None = None
    name: str = "part"
    clip_radius: float | None = None
    shell_thickness_mm: float | None = None
    target_size_mm: float | tuple | None = None
    split_planes: tuple = ()
    base: BaseSpec | None = None
    outputs: str | tuple = "part"
    strict: bool = False
    split_first: bool = False
    bounds: tuple | None = None
    resolution: int | tuple | None = None
    flow_factor: float = 1.0
    build_volume_mm: tuple = field(default=BUILD_VOLUME_MM)

    def __post_init__(self):
        if (self.source is None) == (self.expr is None):
            raise PlanError("plan needs exactly one of 'source' or 'expr'")
        if self.shell_thickness_mm is not None and not self.shell_thickness_mm > 0:
            raise PlanError("shell_thickness_mm must be positive")
        if self.target_size_mm is not None:
            t = self.target_size_mm
            vals = list(t) if isinstance(t, (list, tuple)) else [t]
            if len(vals) not in (1, 3) or any(not v > 0 for v in vals):
                raise PlanError("target_size_mm must be a positive number or three positive numbers")
            object.__setattr__(self, "target_size_mm", tuple(map(float, vals)) if len(vals) == 3 else float(vals[0]))
        planes = tuple(p if isinstance(p, SplitPlane) else _plane(p) for p in self.split_planes)
        object.__setattr__(self, "split_planes", planes)
        if isinstance(self.outputs, list):
            object.__setattr__(self, "outputs", tuple(self.outputs))

    def to_dict(self) -> dict:
        d = {"name": self.name}
        if self.source is not None:
            d["source"] = self.source
        if self.expr is not None:
            d["expr"] = self.expr
        for key in ("clip_radius", "shell_thickness_mm", "bounds", "resolution"):
            val = getattr(self, key)
            if val is not None:
                d[key] = list(val) if isinstance(val, tuple) else val
        if self.target_size_mm is not None:
            t = self.target_size_mm
            d["target_size_mm"] = list(t) if isinstance(t, tuple) else t
        d["split_planes"] = [list(p.normal) + [p.offset] for p in self.split_planes]
        if self.base is not None:
            b = self.base
            d["base"] = {"shape": b.shape, "dims": list(b.dims), "height": b.height, "embed": b.embed}
        d["outputs"] = list(self.outputs) if isinstance(self.outputs, tuple) else self.outputs
        d["strict"] = self.strict
        d["split_first"] = self.split_first
        d["flow_factor"] = self.flow_factor
        return d

    @classmethod
    def from_dict(cls, d: dict) -> PrintPlan:
        unknown = set(d) - _KEYS
        if unknown:
            raise PlanError(f"unknown plan keys: {sorted(unknown)}")
        kw = dict(d)
        if "base" in kw and kw["base"] is not None:
            b = kw["base"]
            try:
                kw["base"] = BaseSpec(b["shape"], tuple(b["dims"]), float(b["height"]), float(b.get("embed", 0.0)))
            except (KeyError, TypeError, ValueError) as exc:
                raise PlanError(f"bad base spec: {exc}") from None
        for key in ("bounds", "build_volume_mm"):
            if key in kw and kw[key] is not None:
                kw[key] = tuple(float(v) for v in kw[key])
        if isinstance(kw.get("resolution"), list):
            kw["resolution"] = tuple(int(v) for v in kw["resolution"])
        if "split_planes" in kw:
            kw["split_planes"] = tuple(kw["split_planes"])
        try:
            return cls(**kw)
        except (TypeError, ValueError) as exc:
            raise PlanError(str(exc)) from None

    def output_paths(self, n_parts: int, base_dir: Path | None = None) -> list[Path]:
        base_dir = Path(base_dir) if base_dir is not None else Path()
        if isinstance(self.outputs, tuple):
            if len(self.outputs) != n_parts:
                raise PlanError(f"plan lists {len(self.outputs)} outputs for {n_parts} parts")
            return [base_dir / p for p in self.outputs]
        prefix = str(self.outputs)
        if prefix.lower().endswith(".stl"):
            if n_parts == 1:
                return [base_dir / prefix]
            prefix = prefix[:-4]
        if n_parts == 1:
            return [base_dir / f"{prefix}.stl"]
        return [base_dir / f"{prefix}_part{i}.stl" for i in range(n_parts)]


def _plane(p) -> SplitPlane:
    vals = [float(v) for v in p]
    if len(vals) != 4:
        raise PlanError(f"split plane needs [nx, ny, nz, offset], got {p}")
    return SplitPlane.from_normal(vals[:3], vals[3])


def load_plan(path) -> PrintPlan:
    try:
        data = json.loads(Path(path).read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise PlanError(f"plan file is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise PlanError("plan file must hold a JSON object")
    return PrintPlan.from_dict(data)


def dump_plan(plan: PrintPlan, path):
    Path(path).write_text(json.dumps(plan.to_dict(), indent=2) + "\n", "utf-8")
