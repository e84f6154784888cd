"""Order-2 jet arithmetic for exact first and second directional derivatives.

A :class:`Jet2` carries the truncated Taylor data of a scalar path
``s -> f(x + s*v)`` at ``s = 0``::

    f(x + s*v) = value + s*d1 + s^2*d2/2 + O(s^3)

so ``d1`` is the first and ``d2`` the raw second derivative along the seed
direction.  Arithmetic on jets is ordinary arithmetic in the quotient algebra
R[s]/(s^3): evaluating a programmed vector field on jet inputs yields exact
derivatives, with no truncation error and no expression swell.

Coefficients are generic: they may themselves be :class:`Jet2` values, so
jets nest.  Nested jets give exact mixed higher derivatives, which is how
bracket fields stay jet-evaluable (see :mod:`oscstab.liealg`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import DimensionMismatch, EvaluationError


class Jet2:
    """Truncated second-order Taylor scalar (value, d1, d2) in one seed."""

    __slots__ = ("value", "d1", "d2")

    def __init__(self, value, d1=0.0, d2=0.0):
        self.value = value
        self.d1 = d1
        self.d2 = d2

    def __repr__(self):
        return f"Jet2({self.value!r}, {self.d1!r}, {self.d2!r})"

    def __eq__(self, other):
        if not isinstance(other, Jet2):
            return NotImplemented
        return (
            self.value == other.value
            and self.d1 == other.d1
            and self.d2 == other.d2
        )

    __hash__ = None

    # -- ring operations ------------------------------------------------
    # Non-jet operands are treated as constants (c, 0, 0).

    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.value + other.value, self.d1 + other.d1, self.d2 + other.d2)
        return Jet2(self.value + other, self.d1, self.d2)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.value - other.value, self.d1 - other.d1, self.d2 - other.d2)
        return Jet2(self.value - other, self.d1, self.d2)

    def __rsub__(self, other):
        return Jet2(other - self.value, -self.d1, -self.d2)

    def __neg__(self):
        return Jet2(-self.value, -self.d1, -self.d2)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, Jet2):
            return Jet2(
                self.value * other.value,
                self.value * other.d1 + self.d1 * other.value,
                self.value * other.d2 + 2.0 * self.d1 * other.d1 + self.d2 * other.value,
            )
        return Jet2(self.value * other, self.d1 * other, self.d2 * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other._reciprocal()
        return Jet2(self.value / other, self.d1 / other, self.d2 / other)

    def __rtruediv__(self, other):
        return self._reciprocal() * other

    def _reciprocal(self):
        if deep_value(self.value) == 0.0:
            raise EvaluationError("division by a jet with zero value", deep_value(self.value))
        inv = 1.0 / self.value
        inv2 = inv * inv
        return Jet2(inv, -self.d1 * inv2, (2.0 * self.d1 * self.d1 * inv - self.d2) * inv2)

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("jet exponent must be an integer")
        if n < 0:
            return (self ** (-n))._reciprocal()
        out = Jet2(_one_like(self.value), _zero_like(self.d1), _zero_like(self.d2))
        for _ in range(n):
            out = out * self
        return out


def constant(c) -> Jet2:
    """Lift a plain scalar to the constant jet (c, 0, 0)."""
    return Jet2(c, 0.0, 0.0)


def variable(x, seed=1.0) -> Jet2:
    """Jet of the coordinate path x + s*seed."""
    return Jet2(x, seed, 0.0)


def deep_value(x) -> float:
    """Descend nested jets down to the underlying float value."""
    while isinstance(x, Jet2):
        x = x.value
    return x


def jet_value(x):
    """Value part of a possibly-plain scalar."""
    return x.value if isinstance(x, Jet2) else x


def jet_d1(x):
    """First-derivative part; plain scalars are constants with derivative 0."""
    return x.d1 if isinstance(x, Jet2) else 0.0


def jet_d2(x):
    """Second-derivative part; plain scalars are constants with derivative 0."""
    return x.d2 if isinstance(x, Jet2) else 0.0


def _zero_like(x):
    return x * 0.0 if isinstance(x, Jet2) else 0.0


def _one_like(x):
    return x * 0.0 + 1.0 if isinstance(x, Jet2) else 1.0


def _deeply_constant(a: Jet2) -> bool:
    def flat_zero(x):
        if isinstance(x, Jet2):
            return flat_zero(x.d1) and flat_zero(x.d2) and flat_zero(x.value)
        return x == 0.0

    def const(x):
        if isinstance(x, Jet2):
            return const(x.value) and flat_zero(x.d1) and flat_zero(x.d2)
        return True

    return flat_zero(a.d1) and flat_zero(a.d2) and const(a.value)


def _chain(a: Jet2, f0, f1, f2) -> Jet2:
    """Compose a scalar function (value f0, derivatives f1, f2 at a.value) with a."""
    return Jet2(f0, f1 * a.d1, f2 * a.d1 * a.d1 + f1 * a.d2)


# -- generic scalar functions -------------------------------------------
# Each accepts a float or a Jet2 (possibly nested) and returns the same kind,
# so vector fields can be written once and evaluated either way.


def sin(x):
    return jet_sin(x) if isinstance(x, Jet2) else math.sin(x)


def cos(x):
    return jet_cos(x) if isinstance(x, Jet2) else math.cos(x)


def tan(x):
    if isinstance(x, Jet2):
        return jet_tan(x)
    if abs(math.cos(x)) < 1e-15:
        raise EvaluationError("tangent undefined: cos(x) = 0", x)
    return math.tan(x)


def sec(x):
    if isinstance(x, Jet2):
        return jet_sec(x)
    c = math.cos(x)
    if abs(c) < 1e-15:
        raise EvaluationError("secant undefined: cos(x) = 0", x)
    return 1.0 / c


def sqrt(x):
    if isinstance(x, Jet2):
        return jet_sqrt(x)
    if x < 0.0:
        raise EvaluationError("square root of a negative value", x)
    return math.sqrt(x)


def cbrt(x):
    """Real, sign-preserving cube root."""
    if isinstance(x, Jet2):
        return jet_cbrt(x)
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def jet_sin(a: Jet2) -> Jet2:
    s = sin(a.value)
    c = cos(a.value)
    return _chain(a, s, c, -s)


def jet_cos(a: Jet2) -> Jet2:
    s = sin(a.value)
    c = cos(a.value)
    return _chain(a, c, -s, -c)


def jet_tan(a: Jet2) -> Jet2:
    if abs(cos(deep_value(a.value))) < 1e-15:
        raise EvaluationError("tangent undefined: cos(x) = 0", deep_value(a.value))
    c = cos(a.value)
    t = sin(a.value) / c
    sec2 = 1.0 / (c * c)
    return _chain(a, t, sec2, 2.0 * sec2 * t)


def jet_sec(a: Jet2) -> Jet2:
    if abs(cos(deep_value(a.value))) < 1e-15:
        raise EvaluationError("secant undefined: cos(x) = 0", deep_value(a.value))
    c = cos(a.value)
    se = 1.0 / c
    t = sin(a.value) / c
    return _chain(a, se, se * t, se * (t * t + se * se))


def jet_sqrt(a: Jet2) -> Jet2:
    v = deep_value(a.value)
    if v <= 0.0:
        raise EvaluationError("square root requires a positive value", v)
    r = sqrt(a.value)
    f1 = 0.5 / r
    return _chain(a, r, f1, -0.5 * f1 / a.value)


def jet_cbrt(a: Jet2) -> Jet2:
    v = deep_value(a.value)
    if v == 0.0:
        if _deeply_constant(a):
            return Jet2(_zero_like(jet_value(a.value)), _zero_like(a.d1), _zero_like(a.d2))
        raise EvaluationError("cube root not differentiable at 0", v)
    c = cbrt(a.value)
    c2 = c * c
    f1 = 1.0 / (3.0 * c2)
    f2 = -2.0 / (9.0 * c2 * c2 * c)
    return _chain(a, c, f1, f2)


# -- vector fields -------------------------------------------------------


@dataclass(frozen=True)
class SmoothVectorField:
    """A smooth map R^n -> R^n given by a scalar-generic evaluation function.

    ``func`` receives a length-``dim`` point whose entries are floats or
    :class:`Jet2` values sharing one seed direction, and must return ``dim``
    outputs built from those entries with the generic operations above.
    Literal constants in outputs are fine; readers lift them as needed.
    """

    dim: int
    func: Callable[[Sequence], Sequence]
    name: str = ""

    def eval(self, point: Sequence) -> list:
        if len(point) != self.dim:
            raise DimensionMismatch(
                f"field {self.name or '<anonymous>'} expects dimension {self.dim}, "
                f"got point of length {len(point)}"
            )
        out = list(self.func(point))
        if len(out) != self.dim:
            raise DimensionMismatch(
                f"field {self.name or '<anonymous>'} returned {len(out)} components, "
                f"expected {self.dim}"
            )
        return out

    def __call__(self, point):
        return self.eval(point)


def constant_field(dim: int, values: Sequence[float], name: str = "") -> SmoothVectorField:
    vals = [float(v) for v in values]
    return SmoothVectorField(dim, lambda x: list(vals), name=name)


def seed_point(point: Sequence, direction: Sequence) -> list:
    """Jet point for the path point + s*direction (zero curvature seeds)."""
    return [Jet2(p, d, _zero_like(p)) for p, d in zip(point, direction)]


def directional_derivative(f: SmoothVectorField, g: SmoothVectorField, x: Sequence) -> list:
    """Df(x) . g(x), read off the first-order jet parts of f along g(x)."""
    if f.dim != g.dim:
        raise DimensionMismatch(f"field dimensions differ: {f.dim} vs {g.dim}")
    gx = g.eval(x)
    out = f.eval(seed_point(x, gx))
    return [jet_d1(o) for o in out]
