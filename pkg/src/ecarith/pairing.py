"""Miller loops for the Tate and Weil pairings.

Notation: f_b is a function with divisor b(P) - (bP) - (b - 1)(O), and
h_b = f_b(Q1) / f_b(Q2). The loop tracks h_b as a numerator/denominator
pair and divides once at the very end.

Each Miller step is split in two phases:

* planning: the group operation on bP plus construction of the lines,
  verticals or parabola it needs. Independent of Q1, Q2.
* applying: evaluating those polynomials at Q1 and Q2 and multiplying the
  fractions together.

A live loop plans and applies step by step; :func:`precompute_trace` stores
the plans so :func:`eval_trace` only pays the applying phase.

Engines
  ``standard``  doubling step, then an addition (or subtraction) step
  ``parabola``  one double-add whose parabola replaces g_{b,c} g_{b+c,b} / g_{b+c}

Step costs on generic inputs, squarings counted as multiplications:
  doubling 11 + 1 div, standard double-add 21 + 2 div, parabola double-add
  16 + 2 div; replaying a trace costs 8 per line step and 12 per parabola step.

Double-subtract in the parabola engine uses h_{-c} = g_c(Q2) / (h_c g_c(Q1)),
where g_c is the vertical through cP; it is the divisor-level identity
f_{-c} = 1 / (f_c g_c). With it, 2b - c is an ordinary double-add with the
entry (-cP, h_{-c}), so the step costs the same 16 + 2 div. h_{-c} itself is
formed once per evaluation (2 mul).
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field

from . import curve
from .curve import CurveParams, CurvePoint, Parabola, eval_parabola
from .errors import DivisorCollision, DomainError, RetriesExhausted
from .modring import CounterReport, RingContext, RingElement
from .scalarmul import recode_naf

ENGINES = ("standard", "parabola")
PAIRING_ENGINES = ("standard", "parabola", "trace", "trace-standard")
RECODINGS = ("naf", "binary")


@dataclass(frozen=True)
class PairingFraction:
    num: RingElement
    den: RingElement

    @classmethod
    def one(cls, ctx: RingContext) -> PairingFraction:
        return cls(ctx.one, ctx.one)

    def value(self) -> RingElement:
        """The single deferred division."""
        return self.num / self.den

    def same_value(self, other: PairingFraction) -> bool:
        """Exact equality of num/den as field elements (uncounted)."""
        n = self.num.ctx.modulus
        return (self.num.value * other.den.value - other.num.value * self.den.value) % n == 0


@dataclass(frozen=True)
class MillerState:
    b: int
    point: CurvePoint
    h: PairingFraction


@dataclass(frozen=True)
class MillerEntry:
    """(c, cP, h_c): the table operand of an addition-type step."""

    c: int
    point: CurvePoint
    h: PairingFraction


@dataclass(frozen=True)
class _Update:
    """h <- h^(2 if square) * entry^(+-1) * num(Q1) den(Q2) / (num(Q2) den(Q1))."""

    kind: str
    square: bool
    entry: str | None  # None, "+c", "-c" (h_{-c}) or "/c" (divide by h_c)
    num: Parabola
    den: Parabola


@dataclass(frozen=True)
class StepRecord:
    kind: str
    counts: CounterReport


@dataclass
class MillerResult:
    h: PairingFraction
    point: CurvePoint
    steps: list[StepRecord] = field(default_factory=list)
    setup: CounterReport = field(default_factory=CounterReport)

    def tally(self) -> Counter:
        return Counter(s.kind for s in self.steps)


@dataclass(frozen=True)
class StepTrace:
    """Every line, vertical and parabola needed to evaluate h_m for a fixed P."""

    P: CurvePoint
    m: int
    engine: str
    recoding: str
    steps: tuple[tuple[str, tuple[_Update, ...]], ...]
    final_point: CurvePoint
    precompute_counts: CounterReport


def _vertical_at(R: CurvePoint) -> Parabola:
    return Parabola.one() if R.is_infinity else Parabola.vertical(R.x)


def _eval(poly: Parabola, Q: CurvePoint) -> RingElement | None:
    if poly.kind == "one":
        return None
    v = eval_parabola(poly, Q)
    if v == 0:
        raise DivisorCollision(f"{poly.kind} polynomial vanishes at the evaluation point")
    return v


def _apply(u: _Update, h: PairingFraction, entries: dict, Q1: CurvePoint, Q2: CurvePoint) -> PairingFraction:
    n1, n2 = _eval(u.num, Q1), _eval(u.num, Q2)
    d1, d2 = _eval(u.den, Q1), _eval(u.den, Q2)
    if u.square:
        num, den = h.num.square(), h.den.square()
    else:
        num, den = h.num, h.den
    if u.entry is not None:
        e = entries[u.entry]
        en, ed = (e.den, e.num) if u.entry == "/c" else (e.num, e.den)
        num, den = num * en, den * ed
    for a in (n1, d2):
        if a is not None:
            num = num * a
    for a in (n2, d1):
        if a is not None:
            den = den * a
    return PairingFraction(num, den)


def _negated_h(entry_h: PairingFraction, cP: CurvePoint, Q1: CurvePoint, Q2: CurvePoint) -> PairingFraction:
    """h_{-c} = g_c(Q2) / (h_c g_c(Q1)) with g_c the vertical through cP."""
    g = _vertical_at(cP)
    g1, g2 = _eval(g, Q1), _eval(g, Q2)
    num, den = entry_h.den, entry_h.num
    if g2 is not None:
        num = num * g2
    if g1 is not None:
        den = den * g1
    return PairingFraction(num, den)


# planning: group operation plus polynomial construction, no Q involved


def _plan_double(E: CurveParams, T: CurvePoint):
    R, line = curve.double_with_line(E, T)
    return R, (_Update("double", True, None, line, _vertical_at(R)),)


def _plan_add(E: CurveParams, T: CurvePoint, cP: CurvePoint):
    R, line = curve.add_with_line(E, T, cP)
    return R, (_Update("add", False, "+c", line, _vertical_at(R)),)


def _plan_sub(E: CurveParams, T: CurvePoint, cP: CurvePoint):
    # h_{b-c} = h_b g_b(Q1) g_{-b,c}(Q2) / (h_c g_b(Q2) g_{-b,c}(Q1))
    S, line = curve.add_with_line(E, curve.negate(E, T), cP)
    return curve.negate(E, S), (_Update("sub", False, "/c", _vertical_at(T), line),)


def _plan_parabola(E: CurveParams, T: CurvePoint, cP: CurvePoint, kind: str, entry: str):
    R, par, _ = curve.double_add(E, T, cP)
    par = par.prepared()
    return R, (_Update(kind, True, entry, par, _vertical_at(R)),)


def _plan_digit(E, T, d, P, negP, engine):
    """Plan one chain digit. Returns (kind, new point, updates)."""
    if d == 0:
        R, us = _plan_double(E, T)
        return "double", R, us
    if engine == "parabola":
        if d > 0:
            R, us = _plan_parabola(E, T, P, "double_add", "+c")
            return "double_add", R, us
        R, us = _plan_parabola(E, T, negP, "double_sub", "-c")
        return "double_sub", R, us
    R, us1 = _plan_double(E, T)
    if d > 0:
        R, us2 = _plan_add(E, R, P)
        return "double_add", R, us1 + us2
    R, us2 = _plan_sub(E, R, P)
    return "double_sub", R, us1 + us2


def chain_digits(m: int, recoding: str = "naf") -> list[int]:
    if m < 1:
        raise ValueError("m must be >= 1")
    if recoding == "naf":
        return recode_naf(m)
    if recoding == "binary":
        return [int(b) for b in bin(m)[2:]]
    raise ValueError(f"recoding must be one of {RECODINGS}")


def _entries(P: CurvePoint, h1: PairingFraction, needs_neg: bool, Q1, Q2) -> dict:
    entries = {"+c": h1, "/c": h1}
    if needs_neg:
        entries["-c"] = _negated_h(h1, P, Q1, Q2)
    return entries


# live single steps


def _live(E, state: MillerState, plan, entries, Q1, Q2, b_new) -> MillerState:
    R, updates = plan
    h = state.h
    for u in updates:
        h = _apply(u, h, entries, Q1, Q2)
    return MillerState(b_new, R, h)


def miller_double_step(E: CurveParams, state: MillerState, Q1: CurvePoint, Q2: CurvePoint) -> MillerState:
    """(h_b, bP) -> (h_2b, 2bP) via the tangent line over the vertical through 2bP."""
    return _live(E, state, _plan_double(E, state.point), {}, Q1, Q2, 2 * state.b)


def miller_add_step(E: CurveParams, state: MillerState, entry: MillerEntry, Q1, Q2) -> MillerState:
    entries = {"+c": entry.h}
    return _live(E, state, _plan_add(E, state.point, entry.point), entries, Q1, Q2, state.b + entry.c)


def miller_sub_step(E: CurveParams, state: MillerState, entry: MillerEntry, Q1, Q2) -> MillerState:
    """(h_b, bP) -> (h_{b-c}, (b-c)P); reaching O (b = c) is a valid terminal state."""
    entries = {"/c": entry.h}
    return _live(E, state, _plan_sub(E, state.point, entry.point), entries, Q1, Q2, state.b - entry.c)


def miller_double_add_step(
    E: CurveParams, state: MillerState, entry: MillerEntry, Q1, Q2, engine: str = "parabola"
) -> MillerState:
    """(h_b, bP), (h_c, cP) -> (h_{2b+c}, (2b+c)P)."""
    if engine == "parabola":
        plan = _plan_parabola(E, state.point, entry.point, "double_add", "+c")
        return _live(E, state, plan, {"+c": entry.h}, Q1, Q2, 2 * state.b + entry.c)
    if engine != "standard":
        raise ValueError(f"engine must be one of {ENGINES}")
    mid = miller_double_step(E, state, Q1, Q2)
    return miller_add_step(E, mid, entry, Q1, Q2)


def miller_double_sub_step(
    E: CurveParams,
    state: MillerState,
    entry: MillerEntry,
    Q1,
    Q2,
    engine: str = "parabola",
    neg_h: PairingFraction | None = None,
) -> MillerState:
    """(h_b, bP), (h_c, cP) -> (h_{2b-c}, (2b-c)P).

    ``neg_h`` is h_{-c}; when omitted it is formed here for 2 extra
    multiplications.
    """
    if engine == "parabola":
        if neg_h is None:
            neg_h = _negated_h(entry.h, entry.point, Q1, Q2)
        negP = curve.negate(E, entry.point)
        plan = _plan_parabola(E, state.point, negP, "double_sub", "-c")
        return _live(E, state, plan, {"-c": neg_h}, Q1, Q2, 2 * state.b - entry.c)
    if engine != "standard":
        raise ValueError(f"engine must be one of {ENGINES}")
    mid = miller_double_step(E, state, Q1, Q2)
    return miller_sub_step(E, mid, entry, Q1, Q2)


# whole loops


def miller_loop(
    E: CurveParams,
    P: CurvePoint,
    m: int,
    Q1: CurvePoint,
    Q2: CurvePoint,
    engine: str = "parabola",
    recoding: str = "naf",
) -> MillerResult:
    """Build (h_m, mP) along an addition/subtraction chain for m.

    m need not annihilate P; the result then carries mP != O. Per-step
    counter deltas are recorded in ``steps``; forming h_{-1} for
    double-subtract steps is reported as ``setup``.
    """
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {ENGINES}")
    ctx = E.ctx
    digits = chain_digits(m, recoding)
    h1 = PairingFraction.one(ctx)
    t0 = ctx.snapshot()
    entries = _entries(P, h1, engine == "parabola" and -1 in digits, Q1, Q2)
    setup = ctx.snapshot() - t0
    negP = curve.negate(E, P)
    T, h = P, h1
    steps = []
    for d in digits[1:]:
        before = ctx.snapshot()
        kind, T, updates = _plan_digit(E, T, d, P, negP, engine)
        for u in updates:
            h = _apply(u, h, entries, Q1, Q2)
        steps.append(StepRecord(kind, ctx.snapshot() - before))
    return MillerResult(h, T, steps, setup)


def precompute_trace(
    E: CurveParams, P: CurvePoint, m: int, engine: str = "parabola", recoding: str = "naf"
) -> StepTrace:
    """Record every polynomial of the Miller loop for P; nothing depends on Q."""
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {ENGINES}")
    ctx = E.ctx
    before = ctx.snapshot()
    negP = curve.negate(E, P)
    T = P
    steps = []
    for d in chain_digits(m, recoding)[1:]:
        kind, T, updates = _plan_digit(E, T, d, P, negP, engine)
        steps.append((kind, updates))
    return StepTrace(P, m, engine, recoding, tuple(steps), T, ctx.snapshot() - before)


def eval_trace(trace: StepTrace, Q1: CurvePoint, Q2: CurvePoint, step_costs: list | None = None) -> RingElement:
    """h_m(Q1, Q2) from a precomputed trace, with one division at the end.

    If ``step_costs`` is a list, one :class:`StepRecord` per replayed
    polynomial update is appended to it.
    """
    ctx = Q1.x.ctx
    h1 = PairingFraction.one(ctx)
    needs_neg = any(u.entry == "-c" for _, us in trace.steps for u in us)
    entries = _entries(trace.P, h1, needs_neg, Q1, Q2)
    h = h1
    for _, updates in trace.steps:
        for u in updates:
            before = ctx.snapshot()
            h = _apply(u, h, entries, Q1, Q2)
            if step_costs is not None:
                step_costs.append(StepRecord(u.kind, ctx.snapshot() - before))
    return h.value()


# pairings


@dataclass
class PairingReport:
    value: RingElement
    steps: Counter
    attempts: int
    counts: CounterReport


def _require_prime_field(E: CurveParams) -> None:
    from sympy import isprime

    if not isprime(E.ctx.modulus):
        raise DomainError("pairings need a prime field")


def _offset_pair(E, Q, rng):
    S = curve.random_point(E, rng)
    Q1 = curve.add(E, Q, S)
    if Q1.is_infinity:
        raise DivisorCollision("Q + S is the point at infinity")
    return Q1, S


def _h_fraction(E, P, m, Q1, Q2, engine, recoding, trace=None):
    if trace is not None:
        ctx = E.ctx
        h1 = PairingFraction.one(ctx)
        needs_neg = any(u.entry == "-c" for _, us in trace.steps for u in us)
        entries = _entries(trace.P, h1, needs_neg, Q1, Q2)
        h = h1
        kinds = Counter()
        for kind, updates in trace.steps:
            kinds[kind] += 1
            for u in updates:
                h = _apply(u, h, entries, Q1, Q2)
        return h, trace.final_point, kinds
    res = miller_loop(E, P, m, Q1, Q2, engine, recoding)
    return res.h, res.point, res.tally()


def _engine_split(engine: str) -> tuple[str, bool]:
    if engine not in PAIRING_ENGINES:
        raise ValueError(f"engine must be one of {PAIRING_ENGINES}")
    if engine == "trace":
        return "parabola", True
    if engine == "trace-standard":
        return "standard", True
    return engine, False


def tate_report(
    E: CurveParams,
    P: CurvePoint,
    Q: CurvePoint,
    m: int,
    engine: str = "parabola",
    seed: int = 0,
    reduce: bool = False,
    recoding: str = "naf",
    retries: int = 32,
) -> PairingReport:
    """h_m evaluated at the divisor (Q + S) - (S) for a seeded random S.

    With ``reduce`` the value is raised to (p - 1) / m, landing in the m-th
    roots of unity; this requires m | p - 1 (embedding degree one).
    """
    _require_prime_field(E)
    base, use_trace = _engine_split(engine)
    ctx = E.ctx
    p = ctx.modulus
    if reduce and (p - 1) % m:
        raise DomainError("reduced Tate pairing needs m | p - 1")
    start = ctx.snapshot()
    trace = precompute_trace(E, P, m, base) if use_trace else None
    rng = random.Random(seed)
    for attempt in range(1, retries + 1):
        try:
            Q1, Q2 = _offset_pair(E, Q, rng)
            h, mP, kinds = _h_fraction(E, P, m, Q1, Q2, base, recoding, trace)
        except DivisorCollision:
            continue
        if not mP.is_infinity:
            raise DomainError("m does not annihilate P")
        value = h.value()
        if reduce:
            value = ctx.pow(value, (p - 1) // m)
        return PairingReport(value, kinds, attempt, ctx.snapshot() - start)
    raise RetriesExhausted(f"no collision-free evaluation points after {retries} attempts")


def tate_pairing(E, P, Q, m, engine="parabola", seed=0, reduce=False, recoding="naf") -> RingElement:
    return tate_report(E, P, Q, m, engine, seed, reduce, recoding).value


def weil_report(
    E: CurveParams,
    P: CurvePoint,
    Q: CurvePoint,
    m: int,
    engine: str = "parabola",
    seed: int = 0,
    recoding: str = "naf",
    retries: int = 32,
) -> PairingReport:
    """e_m(P, Q) = [f_P(Q + S) / f_P(S)] / [f_Q(P - S) / f_Q(-S)]: four evaluations, one division.

    Both quotients share one offset S: x -> f_Q(x - S) has divisor
    m((Q + S) - (S)), so Weil reciprocity needs the P-side points to be
    P - S and -S rather than an independent offset.
    """
    _require_prime_field(E)
    base, use_trace = _engine_split(engine)
    ctx = E.ctx
    start = ctx.snapshot()
    if P.is_infinity or Q.is_infinity:
        return PairingReport(ctx.one, Counter(), 0, CounterReport())
    trace_p = precompute_trace(E, P, m, base) if use_trace else None
    trace_q = precompute_trace(E, Q, m, base) if use_trace else None
    rng = random.Random(seed)
    for attempt in range(1, retries + 1):
        try:
            Q1, S = _offset_pair(E, Q, rng)
            P2 = curve.negate(E, S)
            P1 = curve.add(E, P, P2)
            if P1.is_infinity:
                raise DivisorCollision("P - S is the point at infinity")
            hp, mP, kp = _h_fraction(E, P, m, Q1, S, base, recoding, trace_p)
            hq, mQ, kq = _h_fraction(E, Q, m, P1, P2, base, recoding, trace_q)
        except DivisorCollision:
            continue
        if not (mP.is_infinity and mQ.is_infinity):
            raise DomainError("m does not annihilate both points")
        value = (hp.num * hq.den) / (hp.den * hq.num)
        return PairingReport(value, kp + kq, attempt, ctx.snapshot() - start)
    raise RetriesExhausted(f"no collision-free evaluation points after {retries} attempts")


def weil_pairing(E, P, Q, m, engine="parabola", seed=0, recoding="naf") -> RingElement:
    return weil_report(E, P, Q, m, engine, seed, recoding).value


def initial_state(P: CurvePoint, ctx: RingContext) -> MillerState:
    return MillerState(1, P, PairingFraction.one(ctx))


def base_entry(P: CurvePoint, ctx: RingContext) -> MillerEntry:
    return MillerEntry(1, P, PairingFraction.one(ctx))


def naive_h(E: CurveParams, P: CurvePoint, m: int, Q1, Q2) -> PairingFraction:
    """h_m by plain double-and-add with line/vertical quotients, one step per bit."""
    state = initial_state(P, E.ctx)
    entry = base_entry(P, E.ctx)
    for bit in bin(m)[3:]:
        state = miller_double_step(E, state, Q1, Q2)
        if bit == "1":
            state = miller_add_step(E, state, entry, Q1, Q2)
    return state.h
