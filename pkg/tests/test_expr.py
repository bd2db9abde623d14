import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mathprint import dual
from mathprint.dual import Dual
from mathprint.expr import (
    TAU_GOLDEN,
    ExprError,
    ExprSyntaxError,
    UnknownIdentifierError,
    evaluate_array,
    parse_expr,
)


def ev(src, x=0.0, y=0.0, z=0.0):
    return float(evaluate_array(parse_expr(src), x, y, z))


class TestParse:
    def test_unit_sphere_point(self):
        assert ev("x^2+y^2+z^2-1", 1, 0, 0) == 0.0

    def test_min_hand_evaluation(self):
        assert ev("min(x, -x)", 0.7) == -0.7

    def test_power_is_right_associative(self):
        assert ev("2^3^2") == 512.0

    def test_unary_minus_binds_looser_than_power(self):
        assert ev("-x^2", 3.0) == -9.0
        assert ev("(-x)^2", 3.0) == 9.0

    def test_precedence(self):
        assert ev("1+2*3-4/2") == 5.0
        assert ev("2*x^2", 3.0) == 18.0

    def test_double_negation(self):
        assert ev("--x", 2.0) == 2.0

    def test_named_constants(self):
        assert ev("tau_golden") == TAU_GOLDEN
        assert ev("pi") == math.pi
        assert TAU_GOLDEN == (1 + math.sqrt(5)) / 2

    def test_number_forms(self):
        assert ev(".5") == 0.5
        assert ev("2.5E3") == 2500.0
        assert ev("1e-3*x", 2.0) == 0.002

    def test_functions(self):
        assert ev("sqrt(x)", 9.0) == 3.0
        assert ev("abs(x)", -2.0) == 2.0
        assert ev("sin(x)", 0.5) == math.sin(0.5)
        assert ev("cos(x)", 0.5) == math.cos(0.5)
        assert ev("max(x, y, z)", 1.0, 3.0, 2.0) == 3.0
        assert ev("min(x, y, z)", 1.0, 3.0, -2.0) == -2.0

    def test_whitespace_is_ignored(self):
        assert ev("  x *\ty\n+ 1 ", 2, 3) == 7.0


class TestErrors:
    def test_double_caret_offset(self):
        with pytest.raises(ExprSyntaxError) as err:
            parse_expr("x^^2")
        assert err.value.offset == 2
        assert "number" in err.value.expected

    @pytest.mark.parametrize(
        "src, offset",
        [("(x", 2), ("x y", 2), ("sin()", 4), ("", 0), ("x+", 2), ("1 $ 2", 2), ("min(x)", 5)],
    )
    def test_syntax_error_offsets(self, src, offset):
        with pytest.raises(ExprSyntaxError) as err:
            parse_expr(src)
        assert err.value.offset == offset

    def test_offsets_are_bytes(self):
        # "é" is two bytes in UTF-8
        with pytest.raises(ExprSyntaxError) as err:
            parse_expr("x + é")
        assert err.value.offset == 4

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifierError) as err:
            parse_expr("x + w")
        assert err.value.name == "w"
        assert "w" in str(err.value)

    def test_unknown_function(self):
        with pytest.raises(UnknownIdentifierError):
            parse_expr("tan(x)")

    def test_constant_is_not_callable(self):
        with pytest.raises(ExprError, match="pi"):
            parse_expr("pi(x)")

    def test_domain_errors_give_nan_not_exceptions(self):
        with np.errstate(all="ignore"):
            assert math.isnan(ev("sqrt(x)", -1.0))
            assert math.isinf(ev("1/x", 0.0))


# ------------------------------------------------------------ round trips

_leaf = st.sampled_from(["x", "y", "z", "pi", "tau_golden", "1", "2.5", "0.125"])


def _combine(children):
    binop = st.tuples(children, st.sampled_from(["+", "-", "*"]), children).map(
        lambda t: f"({t[0]}){t[1]}({t[2]})"
    )
    power = st.tuples(children, st.integers(0, 3)).map(lambda t: f"({t[0]})^{t[1]}")
    unary = st.tuples(st.sampled_from(["-", "sin", "cos", "abs"]), children).map(
        lambda t: f"-({t[1]})" if t[0] == "-" else f"{t[0]}({t[1]})"
    )
    mm = st.tuples(st.sampled_from(["min", "max"]), children, children).map(
        lambda t: f"{t[0]}({t[1]}, {t[2]})"
    )
    return binop | power | unary | mm


expressions = st.recursive(_leaf, _combine, max_leaves=12)


@settings(max_examples=60, deadline=None)
@given(expressions)
def test_pretty_print_round_trip(src):
    rng = np.random.default_rng(7)
    pts = rng.uniform(-2, 2, size=(3, 100))
    a = parse_expr(src)
    b = parse_expr(a.to_source())
    with np.errstate(all="ignore"):
        va = evaluate_array(a, *pts)
        vb = evaluate_array(b, *pts)
    np.testing.assert_array_equal(va, vb)
    assert b.to_source() == a.to_source()


# ------------------------------------------------------------------- duals


class TestDual:
    def test_product_rule(self):
        x, y, z = dual.seed(2.0, 3.0, 5.0)
        f = x * y * z
        assert f.value == 30.0
        assert f.partials == (15.0, 10.0, 6.0)

    def test_quotient_rule(self):
        x, y, _ = dual.seed(3.0, 2.0, 0.0)
        f = x / y
        assert f.value == 1.5
        assert f.partials[0] == pytest.approx(0.5)
        assert f.partials[1] == pytest.approx(-0.75)

    def test_integer_power_is_exact(self):
        x, _, _ = dual.seed(3.0, 0.0, 0.0)
        f = dual.ipow(x, 5)
        assert f.value == 243.0
        assert f.partials[0] == 405.0

    def test_integer_power_differentiable_at_zero(self):
        x, _, _ = dual.seed(0.0, 0.0, 0.0)
        f = dual.dpow(x, 2)
        assert f.value == 0.0 and f.partials[0] == 0.0

    def test_fractional_power(self):
        x, _, _ = dual.seed(4.0, 0.0, 0.0)
        f = dual.dpow(x, 0.5)
        assert f.value == 2.0
        assert f.partials[0] == pytest.approx(0.25)

    def test_tie_goes_to_first_argument(self):
        x, y, _ = dual.seed(1.0, 1.0, 0.0)
        assert dual.dmin(x, y).partials == (1.0, 0.0, 0.0)
        assert dual.dmax(y, x).partials == (0.0, 1.0, 0.0)

    def test_nested_dual_gives_second_derivative(self):
        inner = Dual(Dual(2.0, (1.0, 0.0, 0.0)), (Dual(1.0, (0.0, 0.0, 0.0)), 0.0, 0.0))
        f = inner * inner * inner
        # d/dx x^3 = 3x^2 = 12, d2/dx2 = 6x = 12
        assert f.partials[0].value == 12.0
        assert f.partials[0].partials[0] == 12.0

    def test_array_components(self):
        x, y, z = dual.seed(np.array([1.0, 2.0]), np.zeros(2), np.zeros(2))
        f = dual.dsin(x) * 2.0
        np.testing.assert_allclose(f.partials[0], 2 * np.cos([1.0, 2.0]))

    def test_expression_gradient(self):
        node = parse_expr("x^2+y^2+z^2-1")
        f = node.evaluate(*dual.seed(1.0, 2.0, 3.0))
        assert f.value == 13.0
        assert f.partials == (2.0, 4.0, 6.0)
