"""ECM stage 1 over Z/NZ with two engines.

``montgomery``
    x-only ladder on By^2 = x^3 + Ax^2 + x; no divisions, a single
    gcd(Z, N) at the end.
``fused``
    short Weierstrass curve, signed-binary chain with fused double-adds;
    a factor appears the moment some division hits a zero divisor. With
    ``batch=True`` all curves advance in lockstep and share one inversion
    per step through ``batch_inv``.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import gcd

from sympy import primerange

from . import costmodel, curve
from .curve import CurveParams, CurvePoint
from .errors import NonInvertible
from .modring import CounterReport, RingContext, RingElement
from .scalarmul import mul_naf, recode_naf

ENGINES = ("montgomery", "fused")


@dataclass(frozen=True)
class MontgomeryCurve:
    A: RingElement
    B: RingElement
    a24: RingElement


@dataclass(frozen=True)
class XZPoint:
    X: RingElement
    Z: RingElement


@dataclass(frozen=True)
class EcmParams:
    N: int
    B1: int
    seed: int = 0
    curves: int = 1
    engine: str = "montgomery"
    batch: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.N < 4:
            raise ValueError("N must be >= 4")
        if self.B1 < 2:
            raise ValueError("B1 must be >= 2")
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}")
        if self.curves < 1:
            raise ValueError("need at least one curve")


@dataclass
class CurveRun:
    index: int
    counts: CounterReport
    factor: int | None = None
    ladder_counts: CounterReport | None = None


@dataclass
class EcmResult:
    factor: int | None
    curves_tried: int
    runs: list[CurveRun] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.factor is not None


def xz_dadd(C: MontgomeryCurve, P: XZPoint, Q: XZPoint, diff: XZPoint) -> XZPoint:
    """x(P + Q) from x(P), x(Q), x(P - Q): 2 sqr + 4 mul."""
    u = (P.X - P.Z) * (Q.X + Q.Z)
    v = (P.X + P.Z) * (Q.X - Q.Z)
    return XZPoint(diff.Z * (u + v).square(), diff.X * (u - v).square())


def xz_double(C: MontgomeryCurve, P: XZPoint) -> XZPoint:
    """x(2P): 2 sqr + 3 mul."""
    s = (P.X + P.Z).square()
    d = (P.X - P.Z).square()
    t = s - d
    return XZPoint(s * d, t * (d + C.a24 * t))


def ladder(C: MontgomeryCurve, k: int, P: XZPoint) -> XZPoint:
    """x(kP) by the Montgomery ladder, keeping R1 - R0 = P throughout."""
    if k < 1:
        raise ValueError("ladder needs k >= 1")
    if k == 1:
        return P
    r0, r1 = P, xz_double(C, P)
    for bit in bin(k)[3:]:
        if bit == "1":
            r0, r1 = xz_dadd(C, r1, r0, P), xz_double(C, r1)
        else:
            r0, r1 = xz_double(C, r0), xz_dadd(C, r1, r0, P)
    return r0


def stage1_multiplier(B1: int) -> int:
    """Product of p^floor(log_p B1) over primes p <= B1."""
    k = 1
    for p in primerange(2, B1 + 1):
        q = p
        while q * p <= B1:
            q *= p
        k *= q
    return k


def _rng(seed: int, index: int) -> random.Random:
    return random.Random(seed * 1_000_003 + index)


def _nontrivial(g: int, N: int) -> int | None:
    return g if 1 < g < N else None


def montgomery_curve(ctx: RingContext, A: int) -> MontgomeryCurve:
    """Curve with point x0 = 2 (y0 = 1, so B = 10 + 4A). Raises NonInvertible on a lucky gcd."""
    N = ctx.modulus
    g = gcd((A * A - 4) % N, N)
    if g != 1:
        if g < N:
            raise NonInvertible(g, N)
        raise ValueError("degenerate Montgomery curve")
    a24 = ctx(A + 2) / ctx(4)
    return MontgomeryCurve(ctx(A), ctx(10 + 4 * A), a24)


def _run_montgomery(N: int, k: int, seed: int, index: int) -> CurveRun:
    ctx = RingContext(N)
    rng = _rng(seed, index)
    try:
        C = montgomery_curve(ctx, rng.randrange(3, N - 3) if N > 7 else 3)
    except NonInvertible as exc:
        return CurveRun(index, ctx.snapshot(), exc.factor)
    except ValueError:
        return CurveRun(index, ctx.snapshot())
    before = ctx.snapshot()
    R = ladder(C, k, XZPoint(ctx(2), ctx.one))
    after = ctx.snapshot()
    return CurveRun(index, after, _nontrivial(gcd(R.Z.value, N), N), after - before)


def weierstrass_curve(ctx: RingContext, rng: random.Random) -> tuple[CurveParams, CurvePoint]:
    """Random y^2 = x^3 + ax + b through a random point; b is solved for."""
    N = ctx.modulus
    a, x0, y0 = (rng.randrange(N) for _ in range(3))
    b = (y0 * y0 - x0**3 - a * x0) % N
    E = CurveParams.short(ctx, a, b)
    return E, CurvePoint(ctx(x0), ctx(y0))


def _run_fused(N: int, k: int, seed: int, index: int) -> CurveRun:
    ctx = RingContext(N)
    rng = _rng(seed, index)
    try:
        E, P = weierstrass_curve(ctx, rng)
        mul_naf(E, k, P, "fused")
    except NonInvertible as exc:
        return CurveRun(index, ctx.snapshot(), exc.factor)
    except ValueError:
        return CurveRun(index, ctx.snapshot())
    return CurveRun(index, ctx.snapshot())


def _run_one(args) -> CurveRun:
    engine, N, k, seed, index = args
    return (_run_montgomery if engine == "montgomery" else _run_fused)(N, k, seed, index)


def _batched_fused(params: EcmParams, k: int) -> EcmResult:
    """All curves in one context, stepping through the same NAF chain together.

    Generic steps gather their denominators across curves and invert them
    with one ``batch_inv``; degenerate steps fall back to the plain curve
    operations for that curve alone.
    """
    N = params.N
    ctx = RingContext(N)
    curves, points = [], []
    for i in range(params.curves):
        try:
            E, P = weierstrass_curve(ctx, _rng(params.seed, i))
        except NonInvertible as exc:
            return EcmResult(exc.factor, i + 1, [CurveRun(-1, ctx.snapshot(), exc.factor)])
        except ValueError:
            continue
        curves.append(E)
        points.append(P)
    base = list(points)
    T = list(points)
    try:
        for d in recode_naf(k)[1:]:
            if d == 0:
                T = _batched_double(ctx, curves, T)
            else:
                Q = base if d > 0 else [curve.negate(E, P) for E, P in zip(curves, base)]
                T = _batched_double_add(ctx, curves, T, Q)
    except NonInvertible as exc:
        return EcmResult(exc.factor, len(curves), [CurveRun(-1, ctx.snapshot(), exc.factor)])
    return EcmResult(None, len(curves), [CurveRun(-1, ctx.snapshot())])


def _batched_double(ctx, curves, T):
    out = list(T)
    todo = [i for i, P in enumerate(T) if not P.is_infinity and P.y != 0]
    for i in set(range(len(T))) - set(todo):
        out[i] = curve.double(curves[i], T[i])
    invs = ctx.batch_inv([T[i].y * 2 for i in todo])
    for i, inv in zip(todo, invs):
        x1, y1 = T[i].x, T[i].y
        lam = (x1.square() * 3 + curves[i].a4) * inv
        x3 = lam.square() - x1 - x1
        out[i] = CurvePoint(x3, lam * (x1 - x3) - y1)
    return out


def _batched_double_add(ctx, curves, T, Q):
    out = list(T)
    todo = [i for i in range(len(T)) if not T[i].is_infinity and T[i].x != Q[i].x]
    for i in set(range(len(T))) - set(todo):
        out[i] = curve.double_add(curves[i], T[i], Q[i])[0]
    invs = ctx.batch_inv([T[i].x - Q[i].x for i in todo])
    stage2 = []
    for i, inv in zip(todo, invs):
        x1, y1 = T[i].x, T[i].y
        lam1 = (y1 - Q[i].y) * inv
        x3 = lam1.square() - x1 - Q[i].x
        if x3 == x1:
            out[i] = curve.double_add(curves[i], T[i], Q[i])[0]
        else:
            stage2.append((i, lam1, x3))
    invs = ctx.batch_inv([T[i].x - x3 for i, _, x3 in stage2])
    for (i, lam1, x3), inv in zip(stage2, invs):
        x1, y1 = T[i].x, T[i].y
        lam2 = y1 * 2 * inv - lam1
        x4 = lam2.square() - x1 - x3
        out[i] = CurvePoint(x4, lam2 * (x1 - x4) - y1)
    return out


def ecm_stage1(params: EcmParams) -> EcmResult:
    """Try ``params.curves`` seeded curves; stop at the first nontrivial factor.

    Curves are visited in index order, so the outcome is deterministic even
    with ``workers > 1``.
    """
    k = stage1_multiplier(params.B1)
    if params.engine == "fused" and params.batch:
        return _batched_fused(params, k)
    jobs = [(params.engine, params.N, k, params.seed, i) for i in range(params.curves)]
    runs: list[CurveRun] = []
    if params.workers > 1:
        with ProcessPoolExecutor(params.workers) as pool:
            futures = [pool.submit(_run_one, j) for j in jobs]
            for fut in futures:
                run = fut.result()
                runs.append(run)
                if run.factor is not None:
                    for rest in futures:
                        rest.cancel()
                    break
    else:
        for j in jobs:
            run = _run_one(j)
            runs.append(run)
            if run.factor is not None:
                break
    factor = runs[-1].factor if runs else None
    return EcmResult(factor, len(runs), runs)


@dataclass(frozen=True)
class EcmCostComparison:
    n: int
    alpha: float
    ladder: float
    fused: float
    breakeven_inversion: float
    fused_superior: bool


def ecm_cost_compare(n: int, alpha: float, sqr_cost: float = 1.0, mul_cost: float = 1.0) -> EcmCostComparison:
    """Predicted stage-1 cost of the ladder (4n S + 7n M) against the fused
    chain (2n S + n M + 4n/3 D, with D = inversion + M)."""
    r = costmodel.ecm_breakeven(alpha, sqr_cost, mul_cost, n=n)
    return EcmCostComparison(n, alpha, r.ladder_cost, r.fused_cost, r.breakeven_inversion, r.fused_superior)
