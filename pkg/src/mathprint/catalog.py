"""Named exhibition objects with their default preparation plans.

Only Barth's sextic carries an equation. The other entries are placeholders
for user-supplied meshes; they still record the print size, wall thickness
and preparation steps used for the printed exhibit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from mathprint.fields import ScalarField, barth_field, sphere
from mathprint.mesh_ops import BaseSpec, SplitPlane
from mathprint.plan import PrintPlan

__all__ = ["CatalogEntry", "UnknownObjectError", "catalog", "catalog_lookup", "parse_object_name"]

_SIZE = re.compile(r"^(\d+(?:\.\d+)?)mm$", re.IGNORECASE)
_THICK = re.compile(r"^th(\d+)(?:p(\d+))?(?:mm)?$", re.IGNORECASE)


def parse_object_name(filename: str):
    """Split an exhibit file name into ``(base, size_mm, thickness_mm)``.

    >>> parse_object_name("Helix_200mm_th3p0mm")
    ('Helix', 200.0, 3.0)
    """
    stem = filename.strip()
    stem = re.sub(r"\.(stl|x3d)$", "", stem, flags=re.IGNORECASE)
    tokens = [t for t in re.split(r"[\s_]+", stem) if t]
    size = thickness = None
    size_at = None
    for i, tok in enumerate(tokens):
        m = _SIZE.match(tok)
        if m:
            size, size_at = float(m.group(1)), i
        m = _THICK.match(tok)
        if m:
            thickness = float(m.group(1) + "." + (m.group(2) or "0"))
    if size_at is not None:
        base_tokens = tokens[:size_at]
    else:
        base_tokens = [t for t in tokens if not _THICK.match(t)]
    return "_".join(base_tokens), size, thickness


class UnknownObjectError(KeyError):
    def __init__(self, name, available):
        self.name = name
        self.available = tuple(available)
        super().__init__(f"unknown object {name!r}; available: {', '.join(self.available)}")

    def __str__(self):
        return self.args[0]


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    file_name: str
    attribution: str
    print_size_mm: tuple
    field: ScalarField | None  # None: mesh must be supplied as a file
    default_clip_radius: float | None
    default_plan: PrintPlan
    procedure: str

    @property
    def is_placeholder(self) -> bool:
        return self.field is None

    @property
    def name_size_mm(self):
        return parse_object_name(self.file_name)[1]

    @property
    def thickness_mm(self):
        return parse_object_name(self.file_name)[2]


_HALVES = (SplitPlane((0.0, 0.0, 1.0), 0.0),)
_FIVE = tuple(SplitPlane((0.0, 0.0, 1.0), z) for z in (-54.0, -18.0, 18.0, 54.0))

# key, file name, authors, table print size, procedure
_OBJECTS = [
    ("barth", "Barth_65_50fin_206mm_th2p1mm", "Oliver Labs", (200, 200, 200), "halves"),
    ("calypso", "Calypso_with_support_200mm_th2mm", "FORWISS, Herwig Hauser, Oliver Labs", (86, 120, 84), "halves"),
    ("croissant", "Croissant_empty_200mm_th3p0mm", "FORWISS, Herwig Hauser, Oliver Labs", (95, 100, 35), "halves"),
    ("dinisurface", "DiniSurface_299mm_th2p1mm", "Oliver Labs", (180, 50, 50), "halves"),
    ("distel", "Distel_200mm_full", "FORWISS, Herwig Hauser, Oliver Labs", (98, 98, 98), "halves"),
    ("dullo", "Dullo_200mm_th3p1", "FORWISS, Herwig Hauser, Oliver Labs", (90, 90, 45), "halves"),
    ("gyroid", "Gyroid_199mm_th3p0mm", "Oliver Labs", (100, 100, 100), "halves"),
    ("helix", "Helix_200mm_th3p0mm", "Oliver Labs, Herwig Hauser", (48, 120, 120), "direct"),
    ("kreisel", "Kreisel_hollow_200mm_th3p1mm", "Oliver Labs, Herwig Hauser", (100, 100, 100), "halves"),
    ("lawson", "Lawson_201mm_th2p1mm", "Geometriewerkstatt (Univ. of Tübingen)", (114, 112, 192), "base"),
    ("lemon", "Lemon_offset_215mm", "Herwig Hauser, Oliver Labs", (95, 95, 160), "halves"),
    ("nepali", "Nepali_empty_200mm_th3p0mm", "FORWISS, Herwig Hauser, Oliver Labs", (96, 96, 62), "halves"),
    ("schneeflocke", "Schneeflocke_200mm_th3p5mm", "Oliver Labs, Herwig Hauser", (70, 100, 100), "halves"),
    ("spacecurveincube", "SpaceCurveInCube_206mm_th5p0mm", "Oliver Labs", (180, 180, 180), "five"),
    ("spitz", "Spitz_223mm_th2p5mm", "FORWISS, Herwig Hauser", (100, 76, 100), "halves"),
    ("tuelle", "Tuelle_200mm_th3p0mm", "Oliver Labs, Herwig Hauser", (100, 100, 100), "halves"),
    ("visavis", "Visavis_211mm_th4p0mm", "FORWISS, Herwig Hauser, Oliver Labs", (105, 95, 100), "halves"),
]

BARTH_CLIP_RADIUS = 2.0


def _build():
    entries = {}
    for key, fname, authors, size, proc in _OBJECTS:
        _, _, thick = parse_object_name(fname)
        target = float(max(size))
        planes = {"halves": _HALVES, "five": _FIVE}.get(proc, ())
        base = BaseSpec("cylinder", (60.0,), 4.0, 1.0) if proc == "base" else None
        if key == "barth":
            plan = PrintPlan(
                source="barth", name=key, clip_radius=BARTH_CLIP_RADIUS,
                shell_thickness_mm=thick, target_size_mm=target, split_planes=planes,
                outputs=key, bounds=(-2.2, 2.2), resolution=128,
            )
            field, clip = barth_field(), BARTH_CLIP_RADIUS
        else:
            plan = PrintPlan(
                source=f"{fname}.stl", name=key, target_size_mm=target,
                split_planes=planes, base=base, outputs=key,
            )
            field, clip = None, None
        entries[key] = CatalogEntry(key, fname, authors, tuple(map(float, size)), field, clip, plan, proc)
    return entries


_CATALOG = _build()


def catalog() -> dict:
    """All entries keyed by lowercase name (read-only copy)."""
    return dict(_CATALOG)


def catalog_lookup(name: str) -> CatalogEntry:
    try:
        return _CATALOG[name]
    except KeyError:
        raise UnknownObjectError(name, sorted(_CATALOG)) from None


def clip_field(radius: float) -> ScalarField:
    return sphere(radius=radius)
