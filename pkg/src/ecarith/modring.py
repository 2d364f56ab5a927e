"""Residue arithmetic modulo N with exact operation accounting.

Every :class:`RingElement` belongs to a :class:`RingContext`, which owns the
modulus and an :class:`OpCounter`. Multiplications, squarings, divisions and
inversions are tallied; additions, subtractions, negations and products with
the small constants 0, +-1, 2, 3 are free.

A division is one counted event (``div``); it does not also bump ``mul`` or
``inv``. Converting counts to cost is the job of :mod:`ecarith.costmodel`.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, fields
from math import gcd

from .errors import ContextMismatch, NonInvertible

# multipliers whose products cost nothing (by value, after reduction)
SMALL_CONSTANTS = (0, 1, 2, 3, -1)


@dataclass
class OpCounter:
    mul: int = 0
    sqr: int = 0
    div: int = 0
    inv: int = 0


@dataclass(frozen=True)
class CounterReport:
    """Immutable snapshot of an :class:`OpCounter`; supports ``+`` and ``-``."""

    mul: int = 0
    sqr: int = 0
    div: int = 0
    inv: int = 0

    def __sub__(self, other: CounterReport) -> CounterReport:
        return CounterReport(*(getattr(self, f.name) - getattr(other, f.name) for f in fields(self)))

    def __add__(self, other: CounterReport) -> CounterReport:
        return CounterReport(*(getattr(self, f.name) + getattr(other, f.name) for f in fields(self)))

    @property
    def mults(self) -> int:
        """Multiplications with squarings folded in."""
        return self.mul + self.sqr

    def cost(self, divcost: float, invcost: float | None = None) -> float:
        """Multiplication-equivalent cost; squarings count as one multiplication."""
        if invcost is None:
            invcost = divcost - 1
        return self.mul + self.sqr + divcost * self.div + invcost * self.inv

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


class RingContext:
    """Z/NZ together with the counter that every element of it charges."""

    def __init__(self, modulus: int):
        if modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {modulus}")
        self.modulus = int(modulus)
        self.counter = OpCounter()
        self.zero = RingElement(0, self)
        self.one = RingElement(1 % self.modulus, self)

    def __call__(self, value: int) -> RingElement:
        return RingElement(int(value) % self.modulus, self)

    def __repr__(self) -> str:
        return f"RingContext({self.modulus:#x})"

    def snapshot(self) -> CounterReport:
        c = self.counter
        return CounterReport(c.mul, c.sqr, c.div, c.inv)

    def reset(self) -> None:
        self.counter = OpCounter()

    def _check(self, a: RingElement, b: RingElement) -> None:
        if a.ctx is not b.ctx:
            raise ContextMismatch("elements belong to different ring contexts")

    def _nonzero_gcd(self, a: RingElement) -> int:
        if a.value == 0:
            raise ZeroDivisionError("inverse of zero")
        return gcd(a.value, self.modulus)

    def mul(self, a: RingElement, b: RingElement) -> RingElement:
        self._check(a, b)
        self.counter.mul += 1
        return RingElement(a.value * b.value % self.modulus, self)

    def sqr(self, a: RingElement) -> RingElement:
        self.counter.sqr += 1
        return RingElement(a.value * a.value % self.modulus, self)

    def mul_const(self, c: RingElement, a: RingElement) -> RingElement:
        """Product with a curve constant; free when ``c`` is 0, +-1, 2 or 3."""
        self._check(c, a)
        v = c.value
        if v == 0:
            return self.zero
        if v == 1:
            return a
        if v == self.modulus - 1:
            return -a
        if v == 2:
            return a + a
        if v == 3:
            return a + a + a
        return self.mul(c, a)

    def inv(self, a: RingElement) -> RingElement:
        g = self._nonzero_gcd(a)
        if g != 1:
            raise NonInvertible(g, self.modulus)
        self.counter.inv += 1
        return RingElement(pow(a.value, -1, self.modulus), self)

    def div(self, a: RingElement, b: RingElement) -> RingElement:
        self._check(a, b)
        g = self._nonzero_gcd(b)
        if g != 1:
            raise NonInvertible(g, self.modulus)
        self.counter.div += 1
        return RingElement(a.value * pow(b.value, -1, self.modulus) % self.modulus, self)

    def batch_inv(self, elements: Sequence[RingElement]) -> list[RingElement]:
        """Invert ``k`` elements with one inversion and ``3(k-1)`` multiplications.

        Uses x^-1 = y (xy)^-1 and y^-1 = x (xy)^-1, chained over prefix products.
        Raises :class:`NonInvertible` naming a divisor of the modulus if any
        element is a zero divisor.
        """
        k = len(elements)
        if k == 0:
            return []
        for e in elements:
            self._check(elements[0], e)
            if e.value == 0:
                raise ZeroDivisionError("batch_inv of zero element")
        prefix = [elements[0]]
        for e in elements[1:]:
            prefix.append(self.mul(prefix[-1], e))
        if gcd(prefix[-1].value, self.modulus) != 1:
            # the product may vanish mod N although no single element does
            for e in elements:
                g = gcd(e.value, self.modulus)
                if g != 1:
                    raise NonInvertible(g, self.modulus)
        u = self.inv(prefix[-1])
        out: list[RingElement] = [self.zero] * k
        for i in range(k - 1, 0, -1):
            out[i] = self.mul(u, prefix[i - 1])
            u = self.mul(u, elements[i])
        out[0] = u
        return out

    def pow(self, a: RingElement, e: int) -> RingElement:
        """Left-to-right square-and-multiply, every step counted."""
        if e < 0:
            a, e = self.inv(a), -e
        if e == 0:
            return self.one
        r = a
        for bit in bin(e)[3:]:
            r = self.sqr(r)
            if bit == "1":
                r = self.mul(r, a)
        return r


class RingElement:
    """Immutable residue in [0, N) tied to one context."""

    __slots__ = ("ctx", "value")

    def __init__(self, value: int, ctx: RingContext):
        # callers guarantee 0 <= value < modulus; treated as immutable
        self.value = value
        self.ctx = ctx

    def _coerce(self, other) -> RingElement:
        if isinstance(other, RingElement):
            self.ctx._check(self, other)
            return other
        if isinstance(other, int):
            return self.ctx(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RingElement((self.value + other.value) % self.ctx.modulus, self.ctx)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RingElement((self.value - other.value) % self.ctx.modulus, self.ctx)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return RingElement(-self.value % self.ctx.modulus, self.ctx)

    def __mul__(self, other):
        if isinstance(other, int):
            # only the free small constants may appear as bare ints
            if other not in SMALL_CONSTANTS:
                raise TypeError(f"multiply by ctx({other}) explicitly; only {SMALL_CONSTANTS} are free")
            return RingElement(self.value * other % self.ctx.modulus, self.ctx)
        if isinstance(other, RingElement):
            return self.ctx.mul(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.__mul__(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, int):
            other = self.ctx(other)
        if not isinstance(other, RingElement):
            return NotImplemented
        return self.ctx.div(self, other)

    def square(self) -> RingElement:
        return self.ctx.sqr(self)

    def inverse(self) -> RingElement:
        return self.ctx.inv(self)

    def __eq__(self, other) -> bool:
        if isinstance(other, RingElement):
            return self.ctx is other.ctx and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.ctx.modulus
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.value, self.ctx.modulus))

    def __bool__(self) -> bool:
        return self.value != 0

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"RingElement({self.value:#x} mod {self.ctx.modulus:#x})"


def add(a: RingElement, b: RingElement) -> RingElement:
    return a + b


def mul(a: RingElement, b: RingElement) -> RingElement:
    return a.ctx.mul(a, b)


def sqr(a: RingElement) -> RingElement:
    return a.ctx.sqr(a)


def inv(a: RingElement) -> RingElement:
    return a.ctx.inv(a)


def div(a: RingElement, b: RingElement) -> RingElement:
    return a.ctx.div(a, b)


def batch_inv(elements: Sequence[RingElement]) -> list[RingElement]:
    if not elements:
        return []
    return elements[0].ctx.batch_inv(elements)


def counter_snapshot(ctx: RingContext) -> CounterReport:
    return ctx.snapshot()


def counter_reset(ctx: RingContext) -> None:
    ctx.reset()


def total(reports: Iterable[CounterReport]) -> CounterReport:
    out = CounterReport()
    for r in reports:
        out = out + r
    return out
