import math

import numpy as np
import pytest

from mathprint.fields import (
    BARTH_ALPHA,
    EPS_GRAD,
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

H = 1e-5

# random expressions for gradient checks; smooth away from min/max ties
GRADIENT_EXPRS = [
    "x^2+y^2+z^2-1",
    "sin(x)*cos(y)+z^3",
    "x*y*z - 0.25",
    "(x^2 + 9/4*y^2 + z^2 - 1)^3 - x^2*z^3 - 9/80*y^2*z^3",
    "sqrt(x^2+y^2+4) - z/2",
    "cos(pi*x) + cos(pi*y) + cos(pi*z)",
    "x^4 - 5*x^2 + y^4 - 5*y^2 + z^4 - 5*z^2 + 11.8",
    "tau_golden^2*x^2 - y^2 + z*x",
    "(x+2*y)/(3+z^2)",
    "abs(x-5) + y^5 - 2^x",
]


def central_diff(f, p):
    p = np.asarray(p, dtype=float)
    g = np.empty(3)
    for k in range(3):
        e = np.zeros(3)
        e[k] = H
        g[k] = (f.eval(p + e) - f.eval(p - e)) / (2 * H)
    return g


def fd_grad_arrays(f, pts):
    x, y, z = pts
    out = []
    for k in range(3):
        d = [np.zeros_like(x) for _ in range(3)]
        d[k] = np.full_like(x, H)
        plus = f(x + d[0], y + d[1], z + d[2])
        minus = f(x - d[0], y - d[1], z - d[2])
        out.append((plus - minus) / (2 * H))
    return np.stack(out)


def relative_gradient_error(f, pts):
    v, gx, gy, gz = f.grad(*pts)
    ad = np.stack([gx, gy, gz])
    fd = fd_grad_arrays(f, pts)
    scale = np.maximum(np.linalg.norm(ad, axis=0), 1.0)
    return np.linalg.norm(ad - fd, axis=0) / scale


class TestBarth:
    def test_origin(self):
        assert barth_field().eval((0, 0, 0)) == pytest.approx(-(2 + math.sqrt(5)) / 4, abs=1e-12)

    @pytest.mark.parametrize("p", [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    def test_unit_axis_points(self, p):
        assert abs(barth_field().eval(p)) <= 1e-12

    def test_alpha(self):
        assert BARTH_ALPHA == pytest.approx((2 + math.sqrt(5)) / 4, rel=1e-15)

    def test_cyclic_example_exact(self):
        f = barth_field()
        assert f.eval((0.3, 0.5, 0.7)) == f.eval((0.5, 0.7, 0.3))

    def test_symmetries(self, rng):
        f = barth_field()
        x, y, z = rng.uniform(-2, 2, size=(3, 1000))
        base = f(x, y, z)
        spacing = np.spacing(np.abs(base))
        for other in (f(y, z, x), f(z, x, y), f(-x, y, z), f(x, -y, z), f(x, y, -z)):
            assert np.all(np.abs(other - base) <= 2 * spacing)

    def test_matches_direct_formula(self, rng):
        t = (1 + math.sqrt(5)) / 2
        x, y, z = rng.uniform(-2, 2, size=(3, 200))
        p6 = (t**2 * x**2 - y**2) * (t**2 * y**2 - z**2) * (t**2 * z**2 - x**2)
        k = x**2 + y**2 + z**2 - 1
        np.testing.assert_allclose(barth_field()(x, y, z), p6 - BARTH_ALPHA * k**2, rtol=1e-12, atol=1e-12)

    def test_gradient_example(self):
        f = barth_field()
        p = (0.3, 0.5, 0.7)
        _, g = f.eval_grad(p)
        fd = central_diff(f, p)
        assert np.linalg.norm(g - fd) / np.linalg.norm(g) <= 1e-4

    def test_gradient_random_points(self, rng):
        pts = rng.uniform(-2, 2, size=(3, 1000))
        assert relative_gradient_error(barth_field(), pts).max() <= 1e-4

    def test_value_path_identical(self, rng):
        f = barth_field()
        pts = rng.uniform(-2, 2, size=(3, 1000))
        np.testing.assert_array_equal(f.grad(*pts)[0], f(*pts))


class TestExpressionFields:
    def test_value_and_gradient(self):
        v, g = expr_field("x^2+y^2+z^2-1").eval_grad((1, 2, 3))
        assert v == 13.0
        np.testing.assert_array_equal(g, [2, 4, 6])

    @pytest.mark.parametrize("src", GRADIENT_EXPRS)
    def test_gradient_matches_finite_differences(self, src, rng):
        f = expr_field(src)
        pts = rng.uniform(-2, 2, size=(3, 1000))
        err = relative_gradient_error(f, pts)
        assert np.nanmax(err) <= 1e-4

    @pytest.mark.parametrize("src", GRADIENT_EXPRS)
    def test_eval_grad_value_bit_identical(self, src, rng):
        f = expr_field(src)
        for p in rng.uniform(-2, 2, size=(20, 3)):
            v, _ = f.eval_grad(p)
            assert v == f.eval(p)

    def test_nan_propagates(self):
        assert math.isnan(expr_field("sqrt(x)").eval((-1.0, 0, 0)))


class TestPrimitives:
    def test_sphere_squared_form(self):
        assert sphere(radius=1.0).eval((2, 0, 0)) == 3.0
        assert sphere(radius=1.0).eval((0, 0, 0)) == -1.0

    def test_sphere_center(self):
        assert sphere(center=(1, 1, 1), radius=1.0).eval((1, 1, 2)) == 0.0

    def test_box_sign(self):
        b = box((-1, -1, -1), (1, 1, 1))
        assert b.eval((0, 0, 0)) < 0
        assert b.eval((1, 0.5, 0)) == 0
        assert b.eval((2, 0, 0)) > 0

    def test_box_rejects_inverted_corners(self):
        with pytest.raises(ValueError):
            box((1, 0, 0), (0, 1, 1))

    def test_halfspace(self):
        h = halfspace((0, 0, 2), 1.0)
        assert h.eval((0, 0, 0)) < 0
        assert h.eval((0, 0, 1)) == 0
        assert h.eval((0, 0, 3)) > 0


class TestCsg:
    def test_pointwise_laws(self, rng):
        a = sphere(radius=1.0)
        b = box((-0.5, -0.5, -2), (0.5, 0.5, 2))
        pts = rng.uniform(-2, 2, size=(3, 500))
        fa, fb = a(*pts), b(*pts)
        np.testing.assert_array_equal(csg_union(a, b)(*pts), np.minimum(fa, fb))
        np.testing.assert_array_equal(csg_intersect(a, b)(*pts), np.maximum(fa, fb))
        np.testing.assert_array_equal(csg_complement(a)(*pts), -fa)

    def test_operator_sugar(self):
        a, b = sphere(radius=1.0), halfspace((1, 0, 0))
        p = (0.3, 0.2, 0.1)
        assert (a | b).eval(p) == csg_union(a, b).eval(p)
        assert (a & b).eval(p) == csg_intersect(a, b).eval(p)
        assert (~a).eval(p) == -a.eval(p)

    def test_active_branch_gradient(self):
        s = sphere(radius=1.0)
        b = box((5, 5, 5), (6, 6, 6))
        p = (0.1, 0.2, 0.3)
        _, g_union = csg_union(s, b).eval_grad(p)
        _, g_sphere = s.eval_grad(p)
        np.testing.assert_array_equal(g_union, g_sphere)

    def test_tie_uses_first_argument(self):
        a = expr_field("x")
        b = expr_field("2*x")
        _, g = csg_union(a, b).eval_grad((0.0, 0.0, 0.0))
        np.testing.assert_array_equal(g, [1, 0, 0])


class TestShell:
    def test_exact_distance_inner(self):
        inner = expr_field("sqrt(x^2+y^2+z^2) - 1")
        s = shell_field(inner, 0.2)
        assert s.eval((0.9, 0, 0)) == pytest.approx(0.0, abs=1e-12)
        assert s.eval((0, 1.1, 0)) == pytest.approx(0.0, abs=1e-12)
        assert s.eval((1.0, 0, 0)) == pytest.approx(-0.1, abs=1e-12)

    def test_squared_sphere_radii(self):
        s = shell_field(sphere(radius=1.0), 0.2)
        # |r^2 - 1| / (2r) = 0.1  ->  r^2 -+ 0.2 r - 1 = 0
        r_in = -0.1 + math.sqrt(0.01 + 1)
        r_out = 0.1 + math.sqrt(0.01 + 1)
        assert r_in == pytest.approx(0.9050, abs=1e-4)
        assert r_out == pytest.approx(1.1050, abs=1e-4)
        assert s.eval((r_in, 0, 0)) == pytest.approx(0.0, abs=1e-12)
        assert s.eval((0, 0, r_out)) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("t", [0.0, -1.0])
    def test_nonpositive_thickness_rejected(self, t):
        with pytest.raises(ValueError):
            shell_field(sphere(), t)

    def test_degenerate_gradient_fallback(self):
        s = shell_field(sphere(radius=1.0), 0.2)
        assert s.degenerate_mask(0.0, 0.0, 0.0)
        # |f| - t/2 at the centre, where grad f = 0
        assert s.eval((0, 0, 0)) == pytest.approx(1.0 - 0.1)
        assert not s.degenerate_mask(1.0, 0.0, 0.0)
        assert EPS_GRAD == 1e-12

    def test_shell_gradient(self, rng):
        s = shell_field(sphere(radius=1.0), 0.2)
        pts = rng.uniform(0.3, 2, size=(3, 500)) * rng.choice([-1, 1], size=(3, 500))
        # stay clear of the kink on the zero set of the inner field
        r = np.linalg.norm(pts, axis=0)
        pts = pts[:, np.abs(r - 1) > 0.05]
        assert relative_gradient_error(s, pts).max() <= 1e-4
