import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ecarith import codec
from ecarith.curve import CurveParams, CurvePoint


def affine_points(E: CurveParams) -> list[CurvePoint]:
    """Every point of E over a small prime field, infinity first."""
    from ecarith import curve

    ctx = E.ctx
    pts = [curve.INFINITY]
    for x in range(ctx.modulus):
        for y in range(ctx.modulus):
            P = CurvePoint(ctx(x), ctx(y))
            if curve.is_on_curve(E, P):
                pts.append(P)
    return pts


def as_tuple(P: CurvePoint):
    return None if P.is_infinity else (P.x.value, P.y.value)


@pytest.fixture(scope="session")
def small_curves():
    return [codec.curve_from_json(obj) for obj in codec.load_fixture("group_law_curves.json")]


@pytest.fixture
def secp160r1():
    E, obj = codec.load_curve("secp160r1")
    return E, codec.point_from_json(E, obj["base"]), codec.from_hex(obj["order"])


@pytest.fixture
def pairing_fixture():
    obj = codec.load_fixture("pairing_m13.json")
    E = codec.curve_from_json(obj)
    return E, codec.point_from_json(E, obj["P"]), codec.point_from_json(E, obj["Q"]), codec.from_hex(obj["m"])


@pytest.fixture
def rng():
    return random.Random(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
