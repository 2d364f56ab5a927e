"""Scalar multiplication strategies, each runnable in standard or fused mode.

In ``standard`` mode a doubling followed by an addition runs as two group
operations; in ``fused`` mode the pair becomes one :func:`curve.double_add`.
Results never depend on the mode, only the counters do. Precomputation
(window tables, joint subset-sum tables) is tallied apart from the main loop.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field

from . import curve
from .curve import INFINITY, CurveParams, CurvePoint
from .modring import CounterReport

MODES = ("standard", "fused")

CHAIN_OPS = {
    "d": "double",
    "da": "double_add",
    "ds": "double_sub",
    "a": "add",
    "t": "triple",
    "ta": "triple_add",
}

# how many elementary group operations each tallied op stands for
_ELEMENTARY = {"double": 1, "add": 1, "double_add": 2, "double_sub": 2, "triple": 2, "triple_add": 3}


@dataclass(frozen=True)
class ChainStep:
    op: str
    idx: int = 0

    def __post_init__(self):
        if self.op not in CHAIN_OPS:
            raise ValueError(f"unknown chain op {self.op!r}")
        if self.idx < 0:
            raise ValueError("chain table index must be >= 0")

    def to_json(self) -> dict:
        return {"op": self.op, "idx": self.idx}

    @classmethod
    def from_json(cls, obj: dict) -> ChainStep:
        return cls(obj["op"], int(obj.get("idx", 0)))


@dataclass
class MulReport:
    result: CurvePoint
    counts: CounterReport
    mode: str
    ops: Counter = field(default_factory=Counter)
    precomp_counts: CounterReport = field(default_factory=CounterReport)
    precomp_ops: Counter = field(default_factory=Counter)
    trace: list[str] = field(default_factory=list)

    @property
    def additions(self) -> int:
        """Group additions in the main loop, fused or not."""
        o = self.ops
        return o["add"] + o["double_add"] + o["double_sub"] + o["triple_add"]

    @property
    def elliptic_ops(self) -> int:
        return elliptic_op_count(self.ops)

    @property
    def total_elliptic_ops(self) -> int:
        return self.elliptic_ops + elliptic_op_count(self.precomp_ops)


def elliptic_op_count(ops: Counter) -> int:
    """Elementary group operations in a tally, a double-add counting as two."""
    return sum(_ELEMENTARY[k] * v for k, v in ops.items())


class _Runner:
    """Executes group operations in one mode while tallying them."""

    def __init__(self, E: CurveParams, mode: str):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        self.E = E
        self.mode = mode
        self.ops: Counter = Counter()

    def double(self, T):
        self.ops["double"] += 1
        return curve.double(self.E, T)

    def add(self, T, Q):
        self.ops["add"] += 1
        return curve.add(self.E, T, Q)

    def double_add(self, T, Q):
        if self.mode == "fused":
            self.ops["double_add"] += 1
            return curve.double_add(self.E, T, Q)[0]
        return self.add(self.double(T), Q)

    def double_sub(self, T, Q):
        if self.mode == "fused":
            self.ops["double_sub"] += 1
            return curve.double_sub(self.E, T, Q)[0]
        return self.add(self.double(T), curve.negate(self.E, Q))

    def triple(self, T):
        if self.mode == "fused":
            self.ops["triple"] += 1
            return curve.triple(self.E, T)
        return self.add(self.double(T), T)

    def triple_add(self, T, Q):
        if self.mode == "fused":
            self.ops["triple_add"] += 1
            return curve.triple_add(self.E, T, Q)
        return self.add(self.triple(T), Q)


def recode_naf(k: int) -> list[int]:
    """Non-adjacent form of k >= 1, most significant digit first."""
    if k < 1:
        raise ValueError("NAF recoding needs k >= 1")
    digits = []
    while k:
        if k & 1:
            d = 2 - (k & 3)
            k -= d
        else:
            d = 0
        digits.append(d)
        k >>= 1
    return digits[::-1]


def window_digits(k: int, w: int) -> list[int]:
    """Fixed w-bit windows of k >= 1, most significant first (leading digit nonzero)."""
    if k < 1:
        raise ValueError("window recoding needs k >= 1")
    mask = (1 << w) - 1
    digits = []
    while k:
        digits.append(k & mask)
        k >>= w
    return digits[::-1]


def _normalize(E: CurveParams, k: int, P: CurvePoint):
    if k < 0:
        return -k, curve.negate(E, P)
    return k, P


def _finish(E, runner, T, start, mid=None, precomp_ops=None, trace=None) -> MulReport:
    end = E.ctx.snapshot()
    mid = start if mid is None else mid
    return MulReport(
        result=T,
        counts=end - mid,
        mode=runner.mode,
        ops=runner.ops,
        precomp_counts=mid - start,
        precomp_ops=precomp_ops or Counter(),
        trace=trace or [],
    )


def mul_window(E: CurveParams, k: int, P: CurvePoint, w: int = 1, mode: str = "standard") -> MulReport:
    """Left-to-right fixed-window scalar multiplication.

    The table holds P, 2P, ..., (2^w - 1)P. For each window the loop does w
    doublings and, when the digit is nonzero, one table addition; in fused
    mode the last doubling and the addition merge into a double-add.
    """
    if w < 1:
        raise ValueError("window size must be >= 1")
    runner = _Runner(E, mode)
    start = E.ctx.snapshot()
    k, P = _normalize(E, k, P)
    if k == 0 or P.is_infinity:
        return _finish(E, runner, INFINITY, start)
    digits = window_digits(k, w)
    pre = _Runner(E, "standard")
    table = [INFINITY, P]
    if len(digits) > 1 or digits[0] > 1:
        if w > 1:
            table.append(pre.double(P))
        for _ in range(3, 1 << w):
            table.append(pre.add(table[-1], P))
    mid = E.ctx.snapshot()
    T = table[digits[0]]
    for d in digits[1:]:
        for _ in range(w - 1):
            T = runner.double(T)
        T = runner.double_add(T, table[d]) if d else runner.double(T)
    return _finish(E, runner, T, start, mid, pre.ops)


def mul_naf(E: CurveParams, k: int, P: CurvePoint, mode: str = "standard") -> MulReport:
    """Signed-binary (NAF) scalar multiplication: about 2n/3 doublings and
    n/3 double-adds or double-subtracts for an n-bit k."""
    runner = _Runner(E, mode)
    start = E.ctx.snapshot()
    k, P = _normalize(E, k, P)
    if k == 0 or P.is_infinity:
        return _finish(E, runner, INFINITY, start)
    digits = recode_naf(k)
    T = P
    for d in digits[1:]:
        if d == 0:
            T = runner.double(T)
        elif d > 0:
            T = runner.double_add(T, P)
        else:
            T = runner.double_sub(T, P)
    return _finish(E, runner, T, start)


def exec_chain(
    E: CurveParams,
    steps: Sequence[ChainStep],
    P: CurvePoint,
    precomputed: Sequence[CurvePoint] = (),
    mode: str = "standard",
) -> MulReport:
    """Replay an explicit chain starting from T = P.

    ``idx`` is 1-based into ``precomputed``; ops that take an operand need
    idx >= 1. In standard mode ``da``/``ds`` run as a doubling plus an
    addition, ``t`` as doubling plus addition, ``ta`` as a tripling plus an
    addition.
    """
    runner = _Runner(E, mode)
    start = E.ctx.snapshot()
    T = P
    for step in steps:
        Q = None
        if step.op in ("da", "ds", "a", "ta"):
            if not 1 <= step.idx <= len(precomputed):
                raise ValueError(f"chain step {step} has no precomputed operand")
            Q = precomputed[step.idx - 1]
        if step.op == "d":
            T = runner.double(T)
        elif step.op == "da":
            T = runner.double_add(T, Q)
        elif step.op == "ds":
            T = runner.double_sub(T, Q)
        elif step.op == "a":
            T = runner.add(T, Q)
        elif step.op == "t":
            T = runner.triple(T)
        else:
            T = runner.triple_add(T, Q)
    return _finish(E, runner, T, start)


def chain_value(steps: Sequence[ChainStep], multiples: Sequence[int]) -> int:
    """The scalar a chain computes, given the multiples of P in its table."""
    k = 1
    for s in steps:
        q = multiples[s.idx - 1] if s.idx else 0
        k = {"d": 2 * k, "da": 2 * k + q, "ds": 2 * k - q, "a": k + q, "t": 3 * k, "ta": 3 * k + q}[s.op]
    return k


def _mask_name(mask: int) -> str:
    names = [f"P{i + 1}" for i in range(mask.bit_length()) if mask >> i & 1]
    return names[0] if len(names) == 1 else "(" + "+".join(names) + ")"


def multi_mul(
    E: CurveParams, scalars: Sequence[int], points: Sequence[CurvePoint], mode: str = "standard"
) -> MulReport:
    """Sum of k_i P_i by a joint left-to-right scan over a 2^t-entry subset-sum table.

    Each bit column costs one doubling plus, unless the column is all zero,
    the addition of one table entry; fused mode does both as a double-add.
    """
    if len(scalars) != len(points):
        raise ValueError("scalars and points must have equal length")
    if not scalars:
        raise ValueError("need at least one scalar")
    runner = _Runner(E, mode)
    start = E.ctx.snapshot()
    ks, Ps = [], []
    for k, P in zip(scalars, points):
        k, P = _normalize(E, k, P)
        ks.append(k)
        Ps.append(P)
    t = len(ks)
    pre = _Runner(E, "standard")
    table = [INFINITY] * (1 << t)
    for mask in range(1, 1 << t):
        top = mask.bit_length() - 1
        rest = mask & ~(1 << top)
        table[mask] = Ps[top] if rest == 0 else pre.add(table[rest], Ps[top])
    mid = E.ctx.snapshot()
    nbits = max(k.bit_length() for k in ks)
    T = None
    trace = []
    for j in range(nbits - 1, -1, -1):
        mask = sum(((k >> j) & 1) << i for i, k in enumerate(ks))
        if T is None:
            if mask:
                T = table[mask]
                trace.append(f"T:={_mask_name(mask)}")
            continue
        if mask:
            T = runner.double_add(T, table[mask])
            trace.append(f"2T+{_mask_name(mask)}")
        else:
            T = runner.double(T)
            trace.append("2T")
    if T is None:
        T = INFINITY
    return _finish(E, runner, T, start, mid, pre.ops, trace)


def separate_mul(
    E: CurveParams, scalars: Sequence[int], points: Sequence[CurvePoint], mode: str = "standard"
) -> MulReport:
    """Baseline for :func:`multi_mul`: one binary chain per scalar, then t - 1 additions."""
    start = E.ctx.snapshot()
    ops: Counter = Counter()
    acc = None
    for k, P in zip(scalars, points):
        r = mul_window(E, k, P, 1, mode)
        ops.update(r.ops)
        if acc is None:
            acc = r.result
        else:
            ops["add"] += 1
            acc = curve.add(E, acc, r.result)
    return MulReport(acc if acc is not None else INFINITY, E.ctx.snapshot() - start, mode, ops)


def repeated_addition(E: CurveParams, k: int, P: CurvePoint) -> CurvePoint:
    """kP by k - 1 plain additions; a slow reference."""
    k, P = _normalize(E, k, P)
    T = INFINITY
    for _ in range(k):
        T = curve.add(E, T, P)
    return T
