"""JSON encoding of integers, points, curves, chains and counters.

Big integers are lowercase hex strings with a ``0x`` prefix. A point is
``"infinity"`` or ``{"x": hex, "y": hex}``; a curve is
``{"a1": hex, ..., "a6": hex, "n": hex}`` where ``n`` is the field modulus.
Curve files may carry extra keys (a base point, pairing data); they are
ignored by :func:`curve_from_json`.
"""

from __future__ import annotations

import json
import os
from collections.abc import Sequence
from importlib import resources
from typing import Any

from .curve import INFINITY, CurveParams, CurvePoint
from .modring import CounterReport, RingContext
from .scalarmul import ChainStep

COEFFS = ("a1", "a2", "a3", "a4", "a6")


def to_hex(v: int) -> str:
    return hex(int(v))


def from_hex(s: str | int) -> int:
    """Parse ``0x``-prefixed hex or plain decimal."""
    if isinstance(s, int):
        return s
    s = s.strip().lower()
    sign = -1 if s.startswith("-") else 1
    s = s.lstrip("+-")
    return sign * (int(s, 16) if s.startswith("0x") else int(s, 10))


def point_to_json(P: CurvePoint) -> Any:
    if P.is_infinity:
        return "infinity"
    return {"x": to_hex(P.x.value), "y": to_hex(P.y.value)}


def point_from_json(E: CurveParams, obj: Any) -> CurvePoint:
    """Decode and validate; off-curve points raise DomainError."""
    if isinstance(obj, str):
        obj = obj.strip()
        if obj == "infinity":
            return INFINITY
        obj = json.loads(obj)
        if obj == "infinity":
            return INFINITY
    if not isinstance(obj, dict) or set(obj) != {"x", "y"}:
        raise ValueError(f"malformed point: {obj!r}")
    return E.point(from_hex(obj["x"]), from_hex(obj["y"]))


def curve_to_json(E: CurveParams) -> dict:
    out = {k: to_hex(v) for k, v in zip(COEFFS, E.as_ints())}
    out["n"] = to_hex(E.ctx.modulus)
    return out


def curve_from_json(obj: dict, ctx: RingContext | None = None) -> CurveParams:
    n = from_hex(obj["n"])
    if ctx is None:
        ctx = RingContext(n)
    elif ctx.modulus != n:
        raise ValueError("context modulus does not match the curve file")
    return CurveParams.from_ints(ctx, *(from_hex(obj.get(k, "0x0")) for k in COEFFS))


def chain_to_json(steps: Sequence[ChainStep]) -> list[dict]:
    return [s.to_json() for s in steps]


def chain_from_json(obj: list) -> list[ChainStep]:
    return [ChainStep.from_json(o) for o in obj]


def counts_to_json(c: CounterReport) -> dict:
    return c.as_dict()


def load_json(path: str) -> Any:
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def load_fixture(name: str) -> Any:
    """A committed fixture from the package's ``fixtures`` directory."""
    return json.loads(resources.files("ecarith").joinpath("fixtures", name).read_text(encoding="utf-8"))


def load_schema(name: str) -> dict:
    return json.loads(resources.files("ecarith").joinpath("schemas", name).read_text(encoding="utf-8"))


def dumps(obj: Any, pretty: bool = True) -> str:
    """Deterministic JSON: sorted keys, fixed separators."""
    if pretty:
        return json.dumps(obj, sort_keys=True, indent=2)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def load_curve(source: str) -> tuple[CurveParams, dict]:
    """A curve from a JSON file path, or from a packaged fixture by name.

    Returns the curve and the raw JSON so callers can read extra keys.
    """
    obj = load_source(source)
    return curve_from_json(obj), obj


def load_source(source: str) -> Any:
    """JSON from a file path, falling back to a packaged fixture of that name."""
    if os.path.exists(source):
        return load_json(source)
    return load_fixture(source if source.endswith(".json") else source + ".json")
