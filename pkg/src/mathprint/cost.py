"""Filament economics for FDM printing with PLA coils.

A coil of mass ``m``, filament diameter ``d`` and material density ``rho``
holds ``L = m / (rho * pi * (d/2)^2)`` metres of filament. Dividing the coil
price by ``L`` gives the cost per metre, and an object's material cost is its
filament length times that rate, rounded to cents.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from importlib import resources

from mathprint.mesh import TriMesh, measure, validate

__all__ = [
    "ReelSpec",
    "PLA_REEL",
    "CostReport",
    "CostRow",
    "reel_length",
    "cost_per_meter",
    "round_cents",
    "object_cost",
    "estimate_filament_length",
    "cost_report",
    "exhibition_rows",
    "cost_table",
    "format_table",
    "format_csv",
]


@dataclass(frozen=True)
class ReelSpec:
    """Filament coil: mass (kg), price (euro), diameter (mm), density (kg/m^3)."""

    mass_kg: float = 1.00
    cost_eur: float = 25.00
    diameter_mm: float = 3.00
    density_kg_m3: float = 1240.0

    def __post_init__(self):
        if not (self.mass_kg > 0 and self.diameter_mm > 0 and self.density_kg_m3 > 0):
            raise ValueError("reel mass, diameter and density must be positive")
        if self.cost_eur < 0:
            raise ValueError("reel cost must be non-negative")

    @property
    def cross_section_m2(self) -> float:
        r = self.diameter_mm / 2000.0
        return math.pi * r * r


#: Coil used for every object: 1 kg, 25 euro, 3 mm PLA at 1240 kg/m^3.
PLA_REEL = ReelSpec()


def reel_length(reel: ReelSpec = PLA_REEL) -> float:
    """Metres of filament on the coil."""
    return reel.mass_kg / (reel.density_kg_m3 * reel.cross_section_m2)


def cost_per_meter(reel: ReelSpec = PLA_REEL) -> float:
    return reel.cost_eur / reel_length(reel)


def round_cents(amount: float) -> float:
    """Round half away from zero to two decimals (on the shortest repr)."""
    q = Decimal(repr(float(amount))).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
    return float(q)


def object_cost(length_m: float, reel: ReelSpec = PLA_REEL) -> float:
    if length_m < 0:
        raise ValueError(f"filament length must be non-negative, got {length_m}")
    return round_cents(length_m * cost_per_meter(reel))


@dataclass(frozen=True)
class CostReport:
    filament_length_m: float
    cost_per_meter: float
    object_cost_eur: float
    provenance: str  # "measured-length" | "volume-estimate"

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def cost_report(length_m: float, reel: ReelSpec = PLA_REEL, provenance="measured-length") -> CostReport:
    return CostReport(length_m, cost_per_meter(reel), object_cost(length_m, reel), provenance)


def estimate_filament_length(mesh: TriMesh, reel: ReelSpec = PLA_REEL, flow_factor: float = 1.0) -> float:
    """Slicer-free estimate: solid volume times ``flow_factor`` over the
    filament cross-section, in metres.

    The mesh is in millimetres and must be watertight.
    """
    if not flow_factor > 0:
        raise ValueError("flow factor must be positive")
    rep = validate(mesh)
    if not rep.watertight:
        raise ValueError(
            "volume estimate needs a watertight mesh; run validate() to see what is open"
        )
    volume_mm3 = abs(measure(mesh).volume) * flow_factor
    r = reel.diameter_mm / 2.0
    return volume_mm3 / (math.pi * r * r) / 1000.0


# ------------------------------------------------------------------- tables


@dataclass(frozen=True)
class CostRow:
    name: str
    author: str
    size: str
    length_m: float
    label: str = ""
    printed_cost_eur: float | None = None


def exhibition_rows() -> list[CostRow]:
    """The 18 objects of the exhibition cost table (Cura filament lengths)."""
    text = resources.files("mathprint.data").joinpath("exhibition_cost_table.csv").read_text("utf-8")
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        rows.append(
            CostRow(
                name=rec["name"],
                author=rec["author"],
                size=rec["size_mm"],
                length_m=float(rec["length_m"]),
                label=rec["row"],
                printed_cost_eur=float(rec["printed_cost_eur"]),
            )
        )
    return rows


def cost_table(rows, reel: ReelSpec = PLA_REEL) -> list[dict]:
    """Rows with computed ``cost_eur``."""
    out = []
    for r in rows:
        out.append(
            {
                "row": r.label,
                "name": r.name,
                "author": r.author,
                "size_mm": r.size,
                "length_m": r.length_m,
                "cost_eur": object_cost(r.length_m, reel),
            }
        )
    return out


_COLUMNS = ("name", "author", "size_mm", "length_m", "cost_eur")


def format_csv(table: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_COLUMNS)
    for r in table:
        w.writerow([r["name"], r["author"], r["size_mm"], f"{r['length_m']:.2f}", f"{r['cost_eur']:.2f}"])
    return buf.getvalue()


def format_table(table: list[dict]) -> str:
    """Aligned plain text with a header line."""
    head = ("#", "Object", "Author", "Size (mm)", "Length (m)", "Cost (EUR)")
    body = [
        (r["row"], r["name"], r["author"], r["size_mm"], f"{r['length_m']:.2f}", f"{r['cost_eur']:.2f}")
        for r in table
    ]
    widths = [max([len(h)] + [len(b[i]) for b in body]) for i, h in enumerate(head)]
    right = {4, 5}

    def fmt(cells):
        return "  ".join(c.rjust(w) if i in right else c.ljust(w) for i, (c, w) in enumerate(zip(cells, widths))).rstrip()

    lines = [fmt(head), fmt(["-" * w for w in widths])]
    lines += [fmt(b) for b in body]
    return "\n".join(lines) + "\n"
