"""Implicit scalar fields f: R^3 -> R.

Every field is negative inside, positive outside and zero on its surface.
Fields are immutable; evaluation is pure and vectorised over numpy arrays.
Gradients come from forward-mode differentiation of the same code path, so
``eval_grad(p)[0]`` equals ``eval(p)`` bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from mathprint import dual
from mathprint.dual import Dual, real, select
from mathprint.expr import TAU_GOLDEN, Node, parse_expr

__all__ = [
    "ScalarField",
    "ExprField",
    "BarthField",
    "Sphere",
    "Box",
    "HalfSpace",
    "Union",
    "Intersection",
    "Complement",
    "Shell",
    "barth_field",
    "expr_field",
    "sphere",
    "box",
    "halfspace",
    "csg_union",
    "csg_intersect",
    "csg_complement",
    "shell_field",
    "BARTH_ALPHA",
    "EPS_GRAD",
]

#: alpha = (2 tau + 1)/4 = (2 + sqrt 5)/4
BARTH_ALPHA = (2.0 + math.sqrt(5.0)) / 4.0
#: gradient norm below which a shell falls back to |f| - t/2
EPS_GRAD = 1e-12


class ScalarField:
    """Base class. Subclasses implement :meth:`evaluate` generically."""

    def evaluate(self, x, y, z):
        """Field value; inputs may be floats, arrays or duals."""
        raise NotImplementedError

    def children(self) -> tuple[ScalarField, ...]:
        return ()

    def __call__(self, x, y, z):
        with np.errstate(all="ignore"):
            out = self.evaluate(*_as_float(x, y, z))
        return np.broadcast_to(np.asarray(out, dtype=float), np.broadcast(x, y, z).shape)

    def grad(self, x, y, z):
        """Return ``(value, gx, gy, gz)`` arrays."""
        x, y, z = _as_float(x, y, z)
        shape = np.broadcast(x, y, z).shape
        with np.errstate(all="ignore"):
            d = self.evaluate(*dual.seed(x, y, z))
        if not isinstance(d, Dual):
            d = Dual(d, (0.0, 0.0, 0.0))
        return tuple(
            np.broadcast_to(np.asarray(c, dtype=float), shape)
            for c in (d.value, *d.partials)
        )

    def eval(self, p) -> float:
        x, y, z = p
        return float(self(x, y, z))

    def eval_grad(self, p) -> tuple[float, np.ndarray]:
        x, y, z = p
        v, gx, gy, gz = self.grad(x, y, z)
        return float(v), np.array([gx, gy, gz], dtype=float)

    def walk(self):
        """Yield this field and all sub-fields, depth first."""
        yield self
        for c in self.children():
            yield from c.walk()

    def __or__(self, other):
        return Union(self, other)

    def __and__(self, other):
        return Intersection(self, other)

    def __invert__(self):
        return Complement(self)


def _as_float(x, y, z):
    return np.float64(x) if np.ndim(x) == 0 else np.asarray(x, float), \
        np.float64(y) if np.ndim(y) == 0 else np.asarray(y, float), \
        np.float64(z) if np.ndim(z) == 0 else np.asarray(z, float)


@dataclass(frozen=True, eq=False)
class ExprField(ScalarField):
    node: Node

    def evaluate(self, x, y, z):
        return self.node.evaluate(x, y, z)


def _sort3(a, b, c):
    # compare-swap network on real parts; duals follow their values
    def cs(p, q):
        keep = real(p) <= real(q)
        return select(keep, p, q), select(keep, q, p)

    a, b = cs(a, b)
    b, c = cs(b, c)
    a, b = cs(a, b)
    return a, b, c


@dataclass(frozen=True, eq=False)
class BarthField(ScalarField):
    """Barth's sextic P6 - alpha K^2 with the golden ratio tau.

    P6 = (tau^2 x^2 - y^2)(tau^2 y^2 - z^2)(tau^2 z^2 - x^2) and
    K = x^2 + y^2 + z^2 - 1. The factors and squares are sorted before they
    are combined so that the result is exactly invariant under permutations
    that the equation is symmetric under.
    """

    def evaluate(self, x, y, z):
        t2 = TAU_GOLDEN * TAU_GOLDEN
        x2, y2, z2 = x * x, y * y, z * z
        f1, f2, f3 = _sort3(t2 * x2 - y2, t2 * y2 - z2, t2 * z2 - x2)
        p6 = f1 * f2 * f3
        s1, s2, s3 = _sort3(x2, y2, z2)
        k = s1 + s2 + s3 - 1.0
        return p6 - BARTH_ALPHA * (k * k)


@dataclass(frozen=True, eq=False)
class Sphere(ScalarField):
    """|p - c|^2 - r^2 (squared form, not a distance)."""

    center: tuple = (0.0, 0.0, 0.0)
    radius: float = 1.0

    def evaluate(self, x, y, z):
        cx, cy, cz = self.center
        dx, dy, dz = x - cx, y - cy, z - cz
        return dx * dx + dy * dy + dz * dz - self.radius * self.radius


@dataclass(frozen=True, eq=False)
class Box(ScalarField):
    """Axis-aligned box as the intersection of its six half-spaces."""

    lo: tuple
    hi: tuple

    def evaluate(self, x, y, z):
        out = None
        for c, a, b in zip((x, y, z), self.lo, self.hi):
            side = dual.dmax(a - c, c - b)
            out = side if out is None else dual.dmax(out, side)
        return out


@dataclass(frozen=True, eq=False)
class HalfSpace(ScalarField):
    """n.p - offset: negative on the side the normal points away from."""

    normal: tuple
    offset: float = 0.0

    def evaluate(self, x, y, z):
        nx, ny, nz = self.normal
        return nx * x + ny * y + nz * z - self.offset


@dataclass(frozen=True, eq=False)
class Union(ScalarField):
    a: ScalarField
    b: ScalarField

    def children(self):
        return (self.a, self.b)

    def evaluate(self, x, y, z):
        return dual.dmin(self.a.evaluate(x, y, z), self.b.evaluate(x, y, z))


@dataclass(frozen=True, eq=False)
class Intersection(ScalarField):
    a: ScalarField
    b: ScalarField

    def children(self):
        return (self.a, self.b)

    def evaluate(self, x, y, z):
        return dual.dmax(self.a.evaluate(x, y, z), self.b.evaluate(x, y, z))


@dataclass(frozen=True, eq=False)
class Complement(ScalarField):
    a: ScalarField

    def children(self):
        return (self.a,)

    def evaluate(self, x, y, z):
        return -self.a.evaluate(x, y, z)


@dataclass(frozen=True, eq=False)
class Shell(ScalarField):
    """Solid band of width ``thickness`` around the zero set of ``inner``.

    Uses the first-order distance estimate ``|f| / |grad f|``. Where the
    gradient norm is below :data:`EPS_GRAD` it falls back to ``|f|``; see
    :meth:`degenerate_mask`.
    """

    inner: ScalarField
    thickness: float

    def __post_init__(self):
        if not self.thickness > 0:
            raise ValueError(f"shell thickness must be positive, got {self.thickness}")

    def children(self):
        return (self.inner,)

    def _inner_with_grad(self, x, y, z):
        f = self.inner.evaluate(*dual.seed(x, y, z))
        if not isinstance(f, Dual):
            f = Dual(f, (0.0, 0.0, 0.0))
        gx, gy, gz = f.partials
        return f.value, dual.dsqrt(gx * gx + gy * gy + gz * gz)

    def evaluate(self, x, y, z):
        value, norm = self._inner_with_grad(x, y, z)
        half = 0.5 * self.thickness
        degenerate = real(norm) < EPS_GRAD
        return select(degenerate, dual.dabs(value) - half, dual.dabs(value / norm) - half)

    def degenerate_mask(self, x, y, z) -> np.ndarray:
        with np.errstate(all="ignore"):
            _, norm = self._inner_with_grad(*_as_float(x, y, z))
        return np.broadcast_to(np.asarray(norm) < EPS_GRAD, np.broadcast(x, y, z).shape)


# ------------------------------------------------------------- constructors


def barth_field() -> BarthField:
    return BarthField()


def expr_field(source) -> ExprField:
    """Field from expression text or an already parsed tree."""
    node = parse_expr(source) if isinstance(source, str) else source
    return ExprField(node)


def sphere(center=(0.0, 0.0, 0.0), radius=1.0) -> Sphere:
    if radius <= 0:
        raise ValueError("sphere radius must be positive")
    return Sphere(tuple(float(c) for c in center), float(radius))


def box(lo, hi) -> Box:
    lo = tuple(float(v) for v in lo)
    hi = tuple(float(v) for v in hi)
    if any(a >= b for a, b in zip(lo, hi)):
        raise ValueError(f"box corners must satisfy lo < hi per axis, got {lo}, {hi}")
    return Box(lo, hi)


def halfspace(normal, offset=0.0) -> HalfSpace:
    n = np.asarray(normal, dtype=float)
    n = n / np.linalg.norm(n)
    return HalfSpace(tuple(n.tolist()), float(offset))


def csg_union(a: ScalarField, b: ScalarField) -> Union:
    return Union(a, b)


def csg_intersect(a: ScalarField, b: ScalarField) -> Intersection:
    return Intersection(a, b)


def csg_complement(a: ScalarField) -> Complement:
    return Complement(a)


def shell_field(inner: ScalarField, thickness: float) -> Shell:
    return Shell(inner, float(thickness))
