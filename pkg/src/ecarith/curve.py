"""Affine group law on y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.

The centerpiece is :func:`double_add`, which forms 2P + Q as (P + Q) + P
without ever computing the y-coordinate of P + Q, and also returns the
parabola through P, P, Q and -(2P + Q). Every degenerate branch (infinity
inputs, 2-torsion, P = -Q, P + Q = -P) is handled explicitly and yields the
matching degenerate parabola, which the pairing code consumes as is.

Products with curve constants go through ``ctx.mul_const`` so that the short
form (a1 = a2 = a3 = 0) pays nothing for them. On short-form generic inputs
the operation counts are:

    double      2 sqr  1 mul  1 div
    add         1 sqr  1 mul  1 div
    double_add  2 sqr  1 mul  2 div
    triple      3 sqr  1 mul  2 div
    triple_add  3 sqr  1 mul  3 div
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import gcd

from sympy.ntheory import sqrt_mod

from .errors import DomainError, NonInvertible
from .modring import RingContext, RingElement

# inputs are checked against the curve equation when assertions are enabled
CHECK_INPUTS = __debug__


@dataclass(frozen=True)
class CurvePoint:
    """Affine point, or the point at infinity when ``x`` is None."""

    x: RingElement | None = None
    y: RingElement | None = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __repr__(self) -> str:
        if self.x is None:
            return "CurvePoint(infinity)"
        return f"CurvePoint({self.x.value:#x}, {self.y.value:#x})"


INFINITY = CurvePoint()


@dataclass(frozen=True, eq=False)
class CurveParams:
    ctx: RingContext
    a1: RingElement
    a2: RingElement
    a3: RingElement
    a4: RingElement
    a6: RingElement

    def __post_init__(self):
        for a in (self.a1, self.a2, self.a3, self.a4, self.a6):
            if a.ctx is not self.ctx:
                raise DomainError("curve coefficients must share the curve's context")
        d = self.discriminant()
        n = self.ctx.modulus
        if d == 0:
            raise DomainError("singular curve (discriminant is zero)")
        g = gcd(d, n)
        if g != 1:
            # only a composite modulus can get here with 1 < g < n
            raise NonInvertible(g, n)

    @classmethod
    def from_ints(cls, modulus_or_ctx, a1=0, a2=0, a3=0, a4=0, a6=0) -> CurveParams:
        ctx = modulus_or_ctx if isinstance(modulus_or_ctx, RingContext) else RingContext(modulus_or_ctx)
        return cls(ctx, ctx(a1), ctx(a2), ctx(a3), ctx(a4), ctx(a6))

    @classmethod
    def short(cls, modulus_or_ctx, a, b) -> CurveParams:
        """y^2 = x^3 + a x + b."""
        return cls.from_ints(modulus_or_ctx, 0, 0, 0, a, b)

    @property
    def is_short(self) -> bool:
        return self.a1 == 0 and self.a2 == 0 and self.a3 == 0

    def discriminant(self) -> int:
        """Standard discriminant from b2, b4, b6, b8, reduced mod N (uncounted)."""
        n = self.ctx.modulus
        a1, a2, a3, a4, a6 = (c.value for c in (self.a1, self.a2, self.a3, self.a4, self.a6))
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return (-b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6) % n

    def point(self, x: int, y: int) -> CurvePoint:
        P = CurvePoint(self.ctx(x), self.ctx(y))
        if not is_on_curve(self, P):
            raise DomainError(f"({x:#x}, {y:#x}) is not on the curve")
        return P

    def as_ints(self) -> tuple[int, int, int, int, int]:
        return tuple(c.value for c in (self.a1, self.a2, self.a3, self.a4, self.a6))


@dataclass(frozen=True)
class Slopes:
    lambda1: RingElement | None = None
    lambda2: RingElement | None = None


@dataclass(frozen=True)
class Parabola:
    """A polynomial px2 x^2 + px x + py y + p0 kept in factored form.

    kinds:
      ``one``       1
      ``vertical``  x - x1
      ``line``      y - y1 - slope (x - x1)
      ``square``    (x - x1)^2
      ``generic``   (x - x1)(x - x4 + s lam2) - s (y - y1), s = lam1 + lam2 + a1

    ``shift`` caches -x4 + s lam2 for the generic kind; :meth:`prepared`
    computes it for one multiplication. ``branch`` names the double-add
    branch that produced the polynomial.
    """

    kind: str
    x1: RingElement | None = None
    y1: RingElement | None = None
    slope: RingElement | None = None
    x4: RingElement | None = None
    s: RingElement | None = None
    lam2: RingElement | None = None
    shift: RingElement | None = None
    branch: str = ""

    @classmethod
    def one(cls, branch="") -> Parabola:
        return cls("one", branch=branch)

    @classmethod
    def vertical(cls, x1, branch="") -> Parabola:
        return cls("vertical", x1=x1, branch=branch)

    @classmethod
    def line(cls, x1, y1, slope, branch="") -> Parabola:
        return cls("line", x1=x1, y1=y1, slope=slope, branch=branch)

    @classmethod
    def square(cls, x1, branch="") -> Parabola:
        return cls("square", x1=x1, branch=branch)

    def prepared(self) -> Parabola:
        if self.kind != "generic" or self.shift is not None:
            return self
        shift = self.s * self.lam2 - self.x4
        return Parabola("generic", self.x1, self.y1, None, self.x4, self.s, self.lam2, shift, self.branch)

    def coefficients(self, ctx: RingContext) -> tuple[RingElement, RingElement, RingElement, RingElement]:
        """Expanded (px2, px, py, p0)."""
        z, o = ctx.zero, ctx.one
        if self.kind == "one":
            return z, z, z, o
        if self.kind == "vertical":
            return z, o, z, -self.x1
        if self.kind == "line":
            return z, -self.slope, o, self.slope * self.x1 - self.y1
        if self.kind == "square":
            return o, -(self.x1 * 2), z, self.x1.square()
        p = self.prepared()
        return o, p.shift - p.x1, -p.s, p.s * p.y1 - p.x1 * p.shift


def _check(E: CurveParams, *points: CurvePoint) -> None:
    for P in points:
        assert is_on_curve(E, P), f"{P!r} is not on the curve"


def is_on_curve(E: CurveParams, P: CurvePoint) -> bool:
    if P.is_infinity:
        return True
    n = E.ctx.modulus
    a1, a2, a3, a4, a6 = E.as_ints()
    x, y = P.x.value, P.y.value
    return (y * y + a1 * x * y + a3 * y - (x**3 + a2 * x * x + a4 * x + a6)) % n == 0


def negate(E: CurveParams, P: CurvePoint) -> CurvePoint:
    if P.is_infinity:
        return P
    return CurvePoint(P.x, -E.ctx.mul_const(E.a1, P.x) - E.a3 - P.y)


def tangent_slope(E: CurveParams, P: CurvePoint) -> RingElement | None:
    """Slope of the tangent at finite P, or None when the tangent is vertical."""
    mc = E.ctx.mul_const
    x1, y1 = P.x, P.y
    den = y1 * 2 + mc(E.a1, x1) + E.a3
    if den == 0:
        return None
    num = x1.square() * 3 + mc(E.a2, x1) * 2 + E.a4 - mc(E.a1, y1)
    return num / den


def _chord_x(E: CurveParams, lam: RingElement, xa: RingElement, xb: RingElement) -> RingElement:
    # lam (lam + a1) - a2 - xa - xb; a plain squaring on a1 = 0 curves
    t = lam.square() if E.a1 == 0 else lam * (lam + E.a1)
    return t - E.a2 - xa - xb


def _chord_y(E: CurveParams, lam: RingElement, x1: RingElement, y1: RingElement, x3: RingElement) -> RingElement:
    return lam * (x1 - x3) - E.ctx.mul_const(E.a1, x3) - E.a3 - y1


def double_with_line(E: CurveParams, P: CurvePoint) -> tuple[CurvePoint, Parabola]:
    """2P and the tangent line at P (vertical for 2-torsion)."""
    if P.is_infinity:
        return INFINITY, Parabola.one()
    lam = tangent_slope(E, P)
    if lam is None:
        return INFINITY, Parabola.vertical(P.x)
    x3 = _chord_x(E, lam, P.x, P.x)
    y3 = _chord_y(E, lam, P.x, P.y, x3)
    return CurvePoint(x3, y3), Parabola.line(P.x, P.y, lam)


def add_with_line(E: CurveParams, P: CurvePoint, Q: CurvePoint) -> tuple[CurvePoint, Parabola]:
    """P + Q and the line through P and Q (tangent when P = Q)."""
    if P.is_infinity:
        return (Q, Parabola.one()) if Q.is_infinity else (Q, Parabola.vertical(Q.x))
    if Q.is_infinity:
        return P, Parabola.vertical(P.x)
    if P.x == Q.x:
        if P.y == Q.y:
            return double_with_line(E, P)
        return INFINITY, Parabola.vertical(P.x)
    lam = (P.y - Q.y) / (P.x - Q.x)
    x3 = _chord_x(E, lam, P.x, Q.x)
    y3 = _chord_y(E, lam, P.x, P.y, x3)
    return CurvePoint(x3, y3), Parabola.line(P.x, P.y, lam)


def double(E: CurveParams, P: CurvePoint) -> CurvePoint:
    if CHECK_INPUTS:
        _check(E, P)
    return double_with_line(E, P)[0]


def add(E: CurveParams, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    if CHECK_INPUTS:
        _check(E, P, Q)
    return add_with_line(E, P, Q)[0]


def sub(E: CurveParams, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    return add(E, P, negate(E, Q))


@dataclass(frozen=True)
class _Fused:
    # state of a generic double-add before y4 is formed
    x1: RingElement
    y1: RingElement
    lam1: RingElement
    x3: RingElement
    lam2: RingElement
    x4: RingElement


def _double_add_head(E: CurveParams, P: CurvePoint, Q: CurvePoint):
    """Run the branch logic of 2P + Q up to x4.

    Returns ``(point, parabola, slopes)`` for every terminal branch and a
    :class:`_Fused` record for the generic one.
    """
    if P.is_infinity:
        if Q.is_infinity:
            return INFINITY, Parabola.one("O+O"), Slopes()
        return Q, Parabola.vertical(Q.x, "O+Q"), Slopes()
    x1, y1 = P.x, P.y
    if Q.is_infinity:
        lam1 = tangent_slope(E, P)
        if lam1 is None:
            return INFINITY, Parabola.vertical(x1, "P+O:2-torsion"), Slopes()
        x3 = _chord_x(E, lam1, x1, x1)
        y3 = _chord_y(E, lam1, x1, y1, x3)
        return CurvePoint(x3, y3), Parabola.line(x1, y1, lam1, "P+O"), Slopes(lam1)
    x2, y2 = Q.x, Q.y
    if x1 != x2:
        lam1 = (y1 - y2) / (x1 - x2)
    else:
        lam1 = None if y1 != y2 else tangent_slope(E, P)
        if lam1 is None:
            # Q = -P, so 2P + Q = P
            return P, Parabola.square(x1, "Q=-P"), Slopes()
    x3 = _chord_x(E, lam1, x1, x2)
    # y3 = lam1 (x1 - x3) - a1 x3 - a3 - y1 is never formed
    if x3 == x1:
        # P + Q = -P
        return INFINITY, Parabola.line(x1, y1, lam1, "x3=x1"), Slopes(lam1)
    lam2 = (E.ctx.mul_const(E.a1, x3) + E.a3 + y1 * 2) / (x1 - x3) - lam1
    x4 = _chord_x(E, lam2, x1, x3)
    return _Fused(x1, y1, lam1, x3, lam2, x4)


def double_add(E: CurveParams, P: CurvePoint, Q: CurvePoint) -> tuple[CurvePoint, Parabola, Slopes]:
    """2P + Q together with the parabola through P, P, Q and -(2P + Q).

    The generic parabola is returned unprepared; building its expanded
    coefficients is charged to whoever evaluates it.
    """
    if CHECK_INPUTS:
        _check(E, P, Q)
    head = _double_add_head(E, P, Q)
    if not isinstance(head, _Fused):
        return head
    h = head
    y4 = _chord_y(E, h.lam2, h.x1, h.y1, h.x4)
    s = h.lam1 + h.lam2 + E.a1
    par = Parabola("generic", x1=h.x1, y1=h.y1, x4=h.x4, s=s, lam2=h.lam2, branch="generic")
    return CurvePoint(h.x4, y4), par, Slopes(h.lam1, h.lam2)


def double_sub(E: CurveParams, P: CurvePoint, Q: CurvePoint) -> tuple[CurvePoint, Parabola, Slopes]:
    return double_add(E, P, negate(E, Q))


def triple(E: CurveParams, P: CurvePoint) -> CurvePoint:
    return double_add(E, P, P)[0]


def triple_add(E: CurveParams, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    """3P + Q as ((P + Q) + P) + P, skipping both intermediate y-coordinates."""
    if CHECK_INPUTS:
        _check(E, P, Q)
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return triple(E, P)
    head = _double_add_head(E, P, Q)
    if not isinstance(head, _Fused):
        return add(E, head[0], P)
    h = head
    if h.x4 == h.x1:
        R = CurvePoint(h.x4, _chord_y(E, h.lam2, h.x1, h.y1, h.x4))
        return add(E, R, P)
    lam3 = (E.ctx.mul_const(E.a1, h.x4) + E.a3 + h.y1 * 2) / (h.x1 - h.x4) - h.lam2
    x5 = _chord_x(E, lam3, h.x1, h.x4)
    return CurvePoint(x5, _chord_y(E, lam3, h.x1, h.y1, x5))


def triple_sub(E: CurveParams, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    return triple_add(E, P, negate(E, Q))


def eval_parabola(par: Parabola, T: CurvePoint) -> RingElement:
    """Value of ``par`` at the finite point T.

    Costs: line 1 mul, square 1 sqr, prepared generic 2 mul (an unprepared
    generic parabola pays one more to build its shift).
    """
    x, y = T.x, T.y
    k = par.kind
    if k == "one":
        return x.ctx.one
    if k == "vertical":
        return x - par.x1
    if k == "line":
        return y - par.y1 - par.slope * (x - par.x1)
    if k == "square":
        return (x - par.x1).square()
    p = par.prepared()
    return (x - p.x1) * (x + p.shift) - p.s * (y - p.y1)


def lift_x(E: CurveParams, x: int) -> CurvePoint | None:
    """A point with abscissa ``x`` over a prime field, or None. Uncounted."""
    p = E.ctx.modulus
    a1, a2, a3, a4, a6 = E.as_ints()
    b = (a1 * x + a3) % p
    rhs = (x**3 + a2 * x * x + a4 * x + a6) % p
    if p == 2:
        raise DomainError("lift_x needs an odd prime modulus")
    d = (b * b + 4 * rhs) % p
    r = sqrt_mod(d, p)
    if r is None:
        return None
    y = (r - b) * pow(2, -1, p) % p
    return CurvePoint(E.ctx(x), E.ctx(y))


def random_point(E: CurveParams, rng: random.Random) -> CurvePoint:
    """Uniform-ish random finite point over a prime field (uncounted)."""
    p = E.ctx.modulus
    for _ in range(64 * p.bit_length() + 1000):
        P = lift_x(E, rng.randrange(p))
        if P is not None:
            if rng.random() < 0.5:
                P = CurvePoint(P.x, E.ctx(-E.a1.value * P.x.value - E.a3.value - P.y.value))
            return P
    raise DomainError("could not find a point on the curve")
