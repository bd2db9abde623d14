import math

import numpy as np
import pytest
from conftest import unit_cube
from hypothesis import given
from hypothesis import strategies as st

from mathprint.cost import (
    PLA_REEL,
    CostRow,
    ReelSpec,
    cost_per_meter,
    cost_report,
    cost_table,
    estimate_filament_length,
    exhibition_rows,
    format_csv,
    format_table,
    object_cost,
    reel_length,
    round_cents,
)
from mathprint.mesh import TriMesh


class TestReel:
    def test_defaults(self):
        assert PLA_REEL == ReelSpec(1.0, 25.0, 3.0, 1240.0)

    def test_length_matches_published_value(self):
        assert reel_length() == pytest.approx(114.0895649437, rel=1e-9)
        assert cost_per_meter() == pytest.approx(0.2191260876, rel=1e-9)

    def test_length_independent_formula(self):
        # mass / (density * area) with the area written out in metres
        area = math.pi * 0.0015**2
        assert reel_length() == pytest.approx(1.0 / (1240.0 * area), rel=1e-15)

    @given(st.floats(0.1, 10), st.floats(1, 100), st.floats(0.5, 5), st.floats(500, 3000))
    def test_homogeneity(self, m, c, d, rho):
        reel = ReelSpec(m, c, d, rho)
        assert reel_length(ReelSpec(2 * m, c, d, rho)) == pytest.approx(2 * reel_length(reel), rel=1e-12)
        assert reel_length(ReelSpec(m, c, 2 * d, rho)) == pytest.approx(reel_length(reel) / 4, rel=1e-12)
        assert reel_length(ReelSpec(m, c, d, 2 * rho)) == pytest.approx(reel_length(reel) / 2, rel=1e-12)
        assert cost_per_meter(ReelSpec(m, 2 * c, d, rho)) == pytest.approx(2 * cost_per_meter(reel), rel=1e-12)

    @pytest.mark.parametrize(
        "kw", [dict(mass_kg=0), dict(diameter_mm=-1), dict(density_kg_m3=0), dict(cost_eur=-1)]
    )
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            ReelSpec(**kw)


class TestObjectCost:
    @pytest.mark.parametrize(
        "length, cost", [(19.52, 4.28), (13.23, 2.90), (8.54, 1.87), (10.89, 2.39), (1.0, 0.22), (0.0, 0.0)]
    )
    def test_examples(self, length, cost):
        assert object_cost(length) == cost

    def test_negative_length(self):
        with pytest.raises(ValueError):
            object_cost(-0.01)

    def test_half_up_rounding(self):
        assert round_cents(0.125) == 0.13
        assert round_cents(0.135) == 0.14
        assert round_cents(2.675) == 2.68
        assert round_cents(0.124999) == 0.12

    def test_report(self):
        r = cost_report(19.52)
        assert r.object_cost_eur == 4.28
        assert r.provenance == "measured-length"
        assert r.to_dict()["filament_length_m"] == 19.52


class TestTable:
    def test_eighteen_rows(self):
        rows = exhibition_rows()
        assert len(rows) == 18
        assert [r.label for r in rows[:2]] == ["1", "1(a)"]

    def test_every_printed_cost_reproduced(self):
        for row, computed in zip(exhibition_rows(), cost_table(exhibition_rows())):
            assert computed["cost_eur"] == row.printed_cost_eur, row.name

    def test_csv_format(self):
        text = format_csv(cost_table(exhibition_rows()))
        lines = text.splitlines()
        assert lines[0] == "name,author,size_mm,length_m,cost_eur"
        assert len(lines) == 19
        assert lines[2].endswith(",19.52,4.28")

    def test_empty_table_header_only(self):
        assert format_csv([]) == "name,author,size_mm,length_m,cost_eur\n"
        assert len(format_table([]).splitlines()) == 2

    def test_plain_table(self):
        text = format_table(cost_table([CostRow("Helix", "A", "48 x 120 x 120", 6.48, "8")]))
        assert "Cost (EUR)" in text and text.rstrip().endswith("1.42")


class TestVolumeEstimate:
    def test_cube(self):
        length = estimate_filament_length(unit_cube(side=10.0))
        assert length == pytest.approx(1000.0 / (math.pi * 1.5**2) / 1000.0, rel=1e-12)
        assert length == pytest.approx(0.14147, abs=1e-5)

    def test_flow_factor_is_linear(self):
        c = unit_cube(side=10.0)
        assert estimate_filament_length(c, flow_factor=2.0) == pytest.approx(2 * estimate_filament_length(c))

    @pytest.mark.parametrize("s", [0.5, 2.0, 7.0])
    def test_cubic_scaling(self, sphere_mesh_24, s):
        base = estimate_filament_length(sphere_mesh_24)
        scaled = TriMesh(sphere_mesh_24.vertices * s, sphere_mesh_24.triangles)
        assert estimate_filament_length(scaled) == pytest.approx(base * s**3, rel=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            estimate_filament_length(TriMesh.empty())

    def test_open_rejected(self, cube):
        with pytest.raises(ValueError, match="watertight"):
            estimate_filament_length(TriMesh(cube.vertices, cube.triangles[1:]))

    def test_bad_flow(self, cube):
        with pytest.raises(ValueError):
            estimate_filament_length(cube, flow_factor=0)

    def test_orientation_irrelevant(self, cube):
        assert estimate_filament_length(cube.flipped()) == pytest.approx(estimate_filament_length(cube))
        assert np.isfinite(estimate_filament_length(cube))
