"""Forward-mode automatic differentiation with three-way dual numbers.

A :class:`Dual` carries a value and its partial derivatives with respect to
x, y and z. Components may be floats, numpy arrays or other duals, so a dual
of duals yields second derivatives (used by shell fields to differentiate a
normalised distance).

The value part of every operation is computed with exactly the same floating
point operations as the plain evaluation, so ``value`` agrees bit-for-bit
with evaluating the same expression on ordinary numbers.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Dual",
    "seed",
    "real",
    "dsqrt",
    "dabs",
    "dsin",
    "dcos",
    "dexp",
    "dlog",
    "dpow",
    "ipow",
    "dmin",
    "dmax",
    "select",
]


class Dual:
    """Value with gradient ``(d/dx, d/dy, d/dz)``."""

    __slots__ = ("value", "partials")
    __array_ufunc__ = None  # ndarray operands defer to the reflected methods

    def __init__(self, value, partials):
        self.value = value
        self.partials = tuple(partials)

    def __repr__(self):
        return f"Dual({self.value!r}, {self.partials!r})"

    def __add__(self, other):
        if not isinstance(other, Dual):
            return Dual(self.value + other, self.partials)
        return Dual(
            self.value + other.value,
            tuple(a + b for a, b in zip(self.partials, other.partials)),
        )

    def __radd__(self, other):
        return Dual(other + self.value, self.partials)

    def __sub__(self, other):
        if not isinstance(other, Dual):
            return Dual(self.value - other, self.partials)
        return Dual(
            self.value - other.value,
            tuple(a - b for a, b in zip(self.partials, other.partials)),
        )

    def __rsub__(self, other):
        return Dual(other - self.value, tuple(-a for a in self.partials))

    def __neg__(self):
        return Dual(-self.value, tuple(-a for a in self.partials))

    def __mul__(self, other):
        if not isinstance(other, Dual):
            return Dual(self.value * other, tuple(a * other for a in self.partials))
        u, v = self.value, other.value
        return Dual(
            u * v,
            tuple(a * v + u * b for a, b in zip(self.partials, other.partials)),
        )

    def __rmul__(self, other):
        return Dual(other * self.value, tuple(other * a for a in self.partials))

    def __truediv__(self, other):
        if not isinstance(other, Dual):
            return Dual(self.value / other, tuple(a / other for a in self.partials))
        u, v = self.value, other.value
        q = u / v
        return Dual(q, tuple((a - q * b) / v for a, b in zip(self.partials, other.partials)))

    def __rtruediv__(self, other):
        v = self.value
        q = other / v
        return Dual(q, tuple(-q * a / v for a in self.partials))

    def __pow__(self, other):
        return dpow(self, other)

    def __rpow__(self, other):
        return dpow(other, self)


def seed(x, y, z):
    """Independent variables for a gradient evaluation at ``(x, y, z)``."""
    return (
        Dual(x, (1.0, 0.0, 0.0)),
        Dual(y, (0.0, 1.0, 0.0)),
        Dual(z, (0.0, 0.0, 1.0)),
    )


def real(a):
    """Innermost real value of a possibly nested dual."""
    while isinstance(a, Dual):
        a = a.value
    return a


def _chain(a, fa, dfa):
    return Dual(fa, tuple(dfa * p for p in a.partials))


def dsqrt(a):
    if isinstance(a, Dual):
        s = dsqrt(a.value)
        return _chain(a, s, 0.5 / s)
    return np.sqrt(a)


def dabs(a):
    if isinstance(a, Dual):
        return _chain(a, dabs(a.value), np.sign(real(a.value)))
    return np.abs(a)


def dsin(a):
    if isinstance(a, Dual):
        return _chain(a, dsin(a.value), dcos(a.value))
    return np.sin(a)


def dcos(a):
    if isinstance(a, Dual):
        return _chain(a, dcos(a.value), -dsin(a.value))
    return np.cos(a)


def dexp(a):
    if isinstance(a, Dual):
        e = dexp(a.value)
        return _chain(a, e, e)
    return np.exp(a)


def dlog(a):
    if isinstance(a, Dual):
        return _chain(a, dlog(a.value), 1.0 / a.value)
    return np.log(a)


def ipow(base, n: int):
    """``base**n`` for integer ``n`` by repeated multiplication.

    Exact for integer-valued inputs and differentiable at zero, unlike an
    exp/log round trip.
    """
    if n == 0:
        return base * 0.0 + 1.0
    if n < 0:
        return 1.0 / ipow(base, -n)
    out = base
    for _ in range(n - 1):
        out = out * base
    return out


def dpow(base, exponent):
    """General power; integral constant exponents use :func:`ipow`."""
    if not isinstance(exponent, Dual):
        e = np.asarray(exponent)
        if e.ndim == 0 and float(e).is_integer():
            return ipow(base, int(e))
        if not isinstance(base, Dual):
            return np.power(base, exponent)
        p = dpow(base.value, exponent)
        return _chain(base, p, exponent * dpow(base.value, exponent - 1))
    # variable exponent: derivative of exp(e*log(base)); the value comes from
    # the plain power so it matches the non-dual evaluation bit for bit
    d = dexp(exponent * dlog(base))
    bv = base.value if isinstance(base, Dual) else base
    return Dual(dpow(bv, exponent.value), d.partials)


def select(cond, a, b):
    """Elementwise ``a if cond else b`` for duals, arrays and scalars."""
    if isinstance(a, Dual) or isinstance(b, Dual):
        if not isinstance(a, Dual):
            a = Dual(a, (0.0, 0.0, 0.0))
        if not isinstance(b, Dual):
            b = Dual(b, (0.0, 0.0, 0.0))
        return Dual(
            select(cond, a.value, b.value),
            tuple(select(cond, pa, pb) for pa, pb in zip(a.partials, b.partials)),
        )
    out = np.where(cond, a, b)
    return out if out.ndim else out[()]


def dmin(a, b):
    """Minimum; ties resolve to the first argument (value and derivative)."""
    return select(real(a) <= real(b), a, b)


def dmax(a, b):
    """Maximum; ties resolve to the first argument (value and derivative)."""
    return select(real(a) >= real(b), a, b)
