"""Closed-form operation costs, in multiplication equivalents.

Units: a squaring or a general multiplication costs 1, an inversion costs
``alpha``, a division costs ``divcost`` (``alpha + 1`` unless given). The
pairing figures are conventionally quoted with divcost = 5.18; keep that
separate from alpha = 4.18 even though the two agree.
"""

from __future__ import annotations

from dataclasses import dataclass

SCALAR_VARIANTS = ("conventional", "save_sqr", "fused")
PAIRING_MODES = ("standard", "parabola", "trace_standard", "trace_parabola")

# additions per scalar bit for each recoding
EPSILON = {"window1": 1 / 2, "window2": 3 / 8, "window4": 15 / 64, "naf": 1 / 3}

PAIRING_DIVCOST = 5.18


@dataclass(frozen=True)
class CostParams:
    n: float
    epsilon: float
    alpha: float
    divcost: float | None = None

    def __post_init__(self):
        if self.n < 0 or self.alpha <= 0:
            raise ValueError("n must be >= 0 and alpha > 0")
        if not 0 <= self.epsilon < 1:
            raise ValueError("epsilon must lie in [0, 1)")

    @property
    def division(self) -> float:
        return self.alpha + 1 if self.divcost is None else self.divcost


@dataclass(frozen=True)
class CostBreakdown:
    squarings: float
    multiplications: float
    divisions: float
    divcost: float

    @property
    def total_mul_equiv(self) -> float:
        return self.squarings + self.multiplications + self.divcost * self.divisions


def scalar_cost(params: CostParams, variant: str = "conventional") -> CostBreakdown:
    """Expected counts for an n-bit scalar with epsilon * n additions.

    conventional  (4 + alpha) n + (3 + alpha) eps n
    save_sqr      (4 + alpha) n + (2 + alpha) eps n   (2P + Q as P + (P + Q))
    fused         (4 + alpha) n + (1 + alpha) eps n   (double-add, no y3)
    """
    n, e = params.n, params.epsilon
    if variant == "conventional":
        s, m = 2 * n + e * n, n + e * n
    elif variant == "save_sqr":
        s, m = 2 * n, n + e * n
    elif variant == "fused":
        s, m = 2 * n, n
    else:
        raise ValueError(f"variant must be one of {SCALAR_VARIANTS}")
    return CostBreakdown(s, m, n + e * n, params.division)


def scalar_savings(epsilon: float, alpha: float) -> float:
    """Fraction saved by fusing: 2 eps / ((4 + alpha) + (3 + alpha) eps)."""
    return 2 * epsilon / ((4 + alpha) + (3 + alpha) * epsilon)


def pairing_step_costs(divcost: float = PAIRING_DIVCOST) -> dict[str, float]:
    """Per-step multiplication equivalents of the Miller loop."""
    return {
        "double": 11 + divcost,
        "standard_double_add": 21 + 2 * divcost,
        "parabola_double_add": 16 + 2 * divcost,
        "trace_line": 8,
        "trace_parabola": 12,
    }


def pairing_cost(n: float, divcost: float = PAIRING_DIVCOST, mode: str = "parabola") -> float:
    """Cost of forming h_m for an n-bit m with 2n/3 doublings and n/3 double-adds."""
    c = pairing_step_costs(divcost)
    if mode == "standard":
        return c["double"] * 2 * n / 3 + c["standard_double_add"] * n / 3
    if mode == "parabola":
        return c["double"] * 2 * n / 3 + c["parabola_double_add"] * n / 3
    if mode == "trace_standard":
        # a double-add replays as a line step plus another line step
        return 8 * 2 * n / 3 + 16 * n / 3
    if mode == "trace_parabola":
        return 8 * 2 * n / 3 + 12 * n / 3
    raise ValueError(f"mode must be one of {PAIRING_MODES}")


def pairing_savings(divcost: float = PAIRING_DIVCOST, trace: bool = False) -> float:
    if trace:
        std, new = pairing_cost(1, divcost, "trace_standard"), pairing_cost(1, divcost, "trace_parabola")
    else:
        std, new = pairing_cost(1, divcost, "standard"), pairing_cost(1, divcost, "parabola")
    return (std - new) / std


@dataclass(frozen=True)
class BreakEven:
    n: float
    ladder_cost: float
    fused_cost: float
    breakeven_inversion: float
    fused_superior: bool


def ecm_breakeven(inversion: float, sqr: float = 1.0, mul: float = 1.0, n: float = 1.0) -> BreakEven:
    """Compare the x-only ladder (4n S + 7n M) with the fused chain
    (2n S + n M + 4n/3 D), a division being an inversion plus a multiplication.

    The fused chain wins exactly when inversion < 1.5 S + 3.5 M.
    """
    ladder = 4 * n * sqr + 7 * n * mul
    fused = 2 * n * sqr + n * mul + 4 * n / 3 * (inversion + mul)
    return BreakEven(n, ladder, fused, 1.5 * sqr + 3.5 * mul, fused < ladder)


def relative_deviation(measured: float, predicted: float) -> float:
    return (measured - predicted) / predicted if predicted else 0.0
