"""Instrumented affine elliptic-curve arithmetic with fused double-add."""

from .curve import INFINITY, CurveParams, CurvePoint
from .errors import (
    ContextMismatch,
    DivisorCollision,
    DomainError,
    NonInvertible,
    RetriesExhausted,
)
from .modring import CounterReport, RingContext, RingElement

__all__ = [
    "INFINITY",
    "ContextMismatch",
    "CounterReport",
    "CurveParams",
    "CurvePoint",
    "DivisorCollision",
    "DomainError",
    "NonInvertible",
    "RetriesExhausted",
    "RingContext",
    "RingElement",
]
