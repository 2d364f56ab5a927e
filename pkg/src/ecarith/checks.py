"""The acceptance checks, shared by ``ecarith selftest`` and the test suite.

Each check returns a :class:`CheckResult`; a check with a runtime budget
fails if it overruns. Everything is seeded, so results are reproducible.
"""

from __future__ import annotations

import random
import time
from collections.abc import Callable
from dataclasses import dataclass

from . import codec, costmodel, curve, pairing
from .curve import INFINITY, CurveParams, CurvePoint
from .ecm import EcmParams, ecm_stage1, stage1_multiplier
from .modring import CounterReport
from .scalarmul import exec_chain, mul_naf, repeated_addition

ALPHA = 4.18


@dataclass(frozen=True)
class CheckResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d}. {self.title}: {self.detail} ({self.seconds:.2f}s)"


def _secp160r1() -> tuple[CurveParams, CurvePoint]:
    E, obj = codec.load_curve("secp160r1")
    return E, codec.point_from_json(E, obj["base"])


def _delta(E: CurveParams, fn: Callable, *args) -> CounterReport:
    before = E.ctx.snapshot()
    fn(*args)
    return E.ctx.snapshot() - before


def _cost(c: CounterReport, divcost: float) -> float:
    return c.mults + divcost * c.div


# 1


def check_table_costs() -> tuple[bool, str]:
    E, _ = _secp160r1()
    rng = random.Random(1)
    expected = {
        "double": (2, 1, 1),
        "add": (1, 1, 1),
        "double_add": (2, 1, 2),
        "triple": (3, 1, 2),
        "triple_add": (3, 1, 3),
    }
    ops = {
        "double": lambda P, Q: curve.double(E, P),
        "add": lambda P, Q: curve.add(E, P, Q),
        "double_add": lambda P, Q: curve.double_add(E, P, Q),
        "triple": lambda P, Q: curve.triple(E, P),
        "triple_add": lambda P, Q: curve.triple_add(E, P, Q),
    }
    bad = []
    for _ in range(20):
        P, Q = curve.random_point(E, rng), curve.random_point(E, rng)
        for name, fn in ops.items():
            d = _delta(E, fn, P, Q)
            if (d.sqr, d.mul, d.div) != expected[name] or d.inv:
                bad.append(f"{name}={d.as_dict()}")
    if bad:
        return False, "mismatch " + ", ".join(sorted(set(bad)))
    return True, "double {2s,1m,1d} add {1,1,1} double_add {2,1,2} triple {3,1,2} triple_add {3,1,3}"


# 2


def check_chain_replay() -> tuple[bool, str]:
    fx = codec.load_fixture("chain_1133044.json")
    E, G = _secp160r1()
    steps = codec.chain_from_json(fx["steps"])
    table = [mul_naf(E, q, G).result for q in fx["precomputed_multiples"]]
    counts = {}
    for mode in ("standard", "fused"):
        r = exec_chain(E, steps, G, table, mode)
        counts[mode] = {k: r.counts.as_dict()[k] for k in ("div", "sqr", "mul")}
    divcost = fx["divcost"]
    std = counts["standard"]["sqr"] + counts["standard"]["mul"] + divcost * counts["standard"]["div"]
    new = counts["fused"]["sqr"] + counts["fused"]["mul"] + divcost * counts["fused"]["div"]
    savings = (std - new) / std
    ok = counts == fx["expected"] and abs(savings - 0.0447) <= 0.0001
    return ok, f"standard {counts['standard']}, fused {counts['fused']}, savings {savings:.4%} at div={divcost}"


# 3

SAVINGS_TABLE = [
    (0.5, 4.18, 0.085),
    (0.5, 6.23, 0.067),
    (3 / 8, 4.18, 0.069),
    (3 / 8, 6.23, 0.055),
    (1 / 3, 4.18, 0.063),
]


def check_savings_formula() -> tuple[bool, str]:
    got = [(e, a, want, costmodel.scalar_savings(e, a)) for e, a, want in SAVINGS_TABLE]
    ok = all(abs(v - want) <= 0.0005 for _, _, want, v in got)
    return ok, ", ".join(f"({e:.3g},{a})->{v:.2%}" for e, a, _, v in got)


# 4


def check_scalar_model() -> tuple[bool, str]:
    E, G = _secp160r1()
    rng = random.Random(4)
    n, divcost = 160, ALPHA + 1
    totals = {"standard": 0.0, "fused": 0.0}
    samples = 100
    for _ in range(samples):
        k = rng.getrandbits(n) | 1 << (n - 1)
        results = {}
        for mode in totals:
            r = mul_naf(E, k, G, mode)
            totals[mode] += _cost(r.counts, divcost)
            results[mode] = r.result
        if results["standard"] != results["fused"]:
            return False, f"modes disagree for k={k:#x}"
    pred_f = (4 + ALPHA) * n + (1 + ALPHA) * n / 3
    pred_s = (4 + ALPHA) * n + (3 + ALPHA) * n / 3
    mean_f, mean_s = totals["fused"] / samples, totals["standard"] / samples
    dev_f = costmodel.relative_deviation(mean_f, pred_f)
    dev_s = costmodel.relative_deviation(mean_s, pred_s)
    savings = (mean_s - mean_f) / mean_s
    ok = abs(dev_f) <= 0.03 and abs(dev_s) <= 0.03 and 0.060 <= savings <= 0.066
    return ok, (
        f"fused {mean_f:.1f} vs {pred_f:.1f} ({dev_f:+.2%}), standard {mean_s:.1f} vs {pred_s:.1f} "
        f"({dev_s:+.2%}), savings {savings:.2%}"
    )


# 5

LIVE_STEP = {
    "standard": {"double": (11, 1), "double_add": (21, 2), "double_sub": (21, 2)},
    "parabola": {"double": (11, 1), "double_add": (16, 2), "double_sub": (16, 2)},
}
TRACE_STEP = {
    "standard": {"double": 8, "add": 8, "sub": 8},
    "parabola": {"double": 8, "double_add": 12, "double_sub": 12},
}


def check_pairing_steps() -> tuple[bool, str]:
    E, G = _secp160r1()
    rng = random.Random(5)
    Q1, Q2 = curve.random_point(E, rng), curve.random_point(E, rng)
    seen: dict[str, set] = {}
    bad = []
    for _ in range(3):
        m = rng.getrandbits(160) | 1 << 159
        for engine in ("standard", "parabola"):
            for s in pairing.miller_loop(E, G, m, Q1, Q2, engine).steps:
                got = (s.counts.mults, s.counts.div)
                seen.setdefault(f"{engine}:{s.kind}", set()).add(got)
                if got != LIVE_STEP[engine][s.kind]:
                    bad.append((engine, s.kind, got))
            costs: list = []
            pairing.eval_trace(pairing.precompute_trace(E, G, m, engine), Q1, Q2, costs)
            for s in costs:
                got = s.counts.mults
                seen.setdefault(f"trace-{engine}:{s.kind}", set()).add(got)
                if got != TRACE_STEP[engine][s.kind] or s.counts.div:
                    bad.append(("trace-" + engine, s.kind, got))
    if bad:
        return False, f"{len(bad)} off-model steps, first {bad[0]}"
    summary = ", ".join(f"{k} {sorted(v)}" for k, v in sorted(seen.items()))
    return True, summary


# 6


def _miller_value(E, P, m, Q1, Q2, engine):
    return pairing.miller_loop(E, P, m, Q1, Q2, engine).h.value()


def check_pairing_totals(samples: int = 10) -> tuple[bool, str]:
    E, G = _secp160r1()
    rng = random.Random(6)
    Q1, Q2 = curve.random_point(E, rng), curve.random_point(E, rng)
    n = 160
    divcost = costmodel.PAIRING_DIVCOST
    sums = dict.fromkeys(("standard", "parabola", "trace_standard", "trace_parabola"), 0.0)
    for _ in range(samples):
        m = rng.getrandbits(n) | 1 << (n - 1)
        for engine in ("standard", "parabola"):
            d = _delta(E, _miller_value, E, G, m, Q1, Q2, engine)
            sums[engine] += _cost(d, divcost)
            trace = pairing.precompute_trace(E, G, m, engine)
            d = _delta(E, pairing.eval_trace, trace, Q1, Q2)
            # the final division is common to both trace modes and not part of the per-step model
            sums["trace_" + engine] += d.mults
    mean = {k: v / samples / n for k, v in sums.items()}
    pred = {k: costmodel.pairing_cost(1, divcost, k) for k in sums}
    dev = {k: costmodel.relative_deviation(mean[k], pred[k]) for k in sums}
    gain = (mean["standard"] - mean["parabola"]) / mean["standard"]
    gain_t = (mean["trace_standard"] - mean["trace_parabola"]) / mean["trace_standard"]
    ok = all(abs(v) <= 0.02 for v in dev.values()) and 0.073 <= gain <= 0.083 and abs(gain_t - 0.125) <= 0.005
    detail = ", ".join(f"{k} {mean[k]:.2f}n vs {pred[k]:.2f}n ({dev[k]:+.2%})" for k in sums)
    return ok, f"{detail}; improvement {gain:.2%}, trace improvement {gain_t:.2%}"


# 7


def check_pairing_properties() -> tuple[bool, str]:
    obj = codec.load_fixture("pairing_m13.json")
    E = codec.curve_from_json(obj)
    P, Q = codec.point_from_json(E, obj["P"]), codec.point_from_json(E, obj["Q"])
    m = codec.from_hex(obj["m"])
    ctx = E.ctx
    engines = ("standard", "parabola", "trace")
    t0 = pairing.tate_pairing(E, P, Q, m, "standard", seed=0, reduce=True)
    e0 = pairing.weil_pairing(E, P, Q, m, "standard", seed=0)
    if ctx.pow(t0, m) != 1 or ctx.pow(e0, m) != 1:
        return False, "values outside mu_m"
    if t0 == 1 or e0 == 1:
        return False, "degenerate pairing on the fixture basis"
    multiples_P = [repeated_addition(E, a, P) for a in range(m)]
    multiples_Q = [repeated_addition(E, b, Q) for b in range(m)]
    failures = []
    for engine in engines:
        for a in range(1, m):
            if pairing.tate_pairing(E, multiples_P[a], Q, m, engine, seed=a, reduce=True) != ctx.pow(t0, a):
                failures.append(f"tate {engine} a={a}")
            if pairing.tate_pairing(E, P, multiples_Q[a], m, engine, seed=a, reduce=True) != ctx.pow(t0, a):
                failures.append(f"tate {engine} b={a}")
            if pairing.weil_pairing(E, multiples_P[a], multiples_P[a], m, engine, seed=a) != 1:
                failures.append(f"weil {engine} e(aP,aP)")
            for b in range(1, m):
                if pairing.weil_pairing(E, multiples_P[a], multiples_Q[b], m, engine, seed=a * m + b) != ctx.pow(
                    e0, a * b
                ):
                    failures.append(f"weil {engine} a={a} b={b}")
    if failures:
        return False, f"{len(failures)} failures, first {failures[0]}"
    return True, f"m={m}, p={ctx.modulus}: bilinear, mu_m-valued, alternating, {len(engines)} engines agree"


# 8


def _naive_add(c: tuple, p: int, P, Q):
    a1, a2, a3, a4, _ = c
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2 and (y1 + y2 + a1 * x2 + a3) % p == 0:
        return None
    if x1 == x2:
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) * pow(2 * y1 + a1 * x1 + a3, -1, p)
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p)
    nu = y1 - lam * x1
    x3 = (lam * lam + a1 * lam - a2 - x1 - x2) % p
    return x3, (-(lam + a1) * x3 - nu - a3) % p


def _as_tuple(P: CurvePoint):
    return None if P.is_infinity else (P.x.value, P.y.value)


GROUP_LAW_BRANCHES = {"O+O", "O+Q", "P+O:2-torsion", "P+O", "Q=-P", "x3=x1", "generic"}


def check_group_law() -> tuple[bool, str]:
    branches = set()
    curves = codec.load_fixture("group_law_curves.json")
    mismatches = []
    pairs = 0
    for obj in curves:
        E = codec.curve_from_json(obj)
        p, c = E.ctx.modulus, E.as_ints()
        pts = [INFINITY] + [
            CurvePoint(E.ctx(x), E.ctx(y))
            for x in range(p)
            for y in range(p)
            if curve.is_on_curve(E, CurvePoint(E.ctx(x), E.ctx(y)))
        ]
        if len(pts) != obj["points"]:
            mismatches.append(f"{obj['name']}: point count")
        for P in pts:
            tP = _as_tuple(P)
            two = _naive_add(c, p, tP, tP)
            three = _naive_add(c, p, two, tP)
            if _as_tuple(curve.double(E, P)) != two or _as_tuple(curve.triple(E, P)) != three:
                mismatches.append(f"{obj['name']}: 2P/3P at {P}")
            for Q in pts:
                pairs += 1
                tQ = _as_tuple(Q)
                want = _naive_add(c, p, two, tQ)
                R, par, _ = curve.double_add(E, P, Q)
                branches.add(par.branch)
                std = curve.add(E, curve.double(E, P), Q)
                neg = curve.negate(E, Q)
                checks = [
                    _as_tuple(curve.add(E, P, Q)) == _naive_add(c, p, tP, tQ),
                    _as_tuple(R) == want,
                    _as_tuple(std) == want,
                    curve.double_sub(E, P, Q)[0] == curve.add(E, curve.double(E, P), neg),
                    _as_tuple(curve.triple_add(E, P, Q)) == _naive_add(c, p, three, tQ),
                ]
                if not all(checks):
                    mismatches.append(f"{obj['name']}: P={P} Q={Q} {checks}")
    missing = GROUP_LAW_BRANCHES - branches
    ok = not mismatches and not missing
    detail = f"{len(curves)} curves, {pairs} ordered pairs, branches hit {len(branches & GROUP_LAW_BRANCHES)}/{len(GROUP_LAW_BRANCHES)}"
    if mismatches:
        detail += f"; {len(mismatches)} mismatches, first {mismatches[0]}"
    if missing:
        detail += f"; missing {sorted(missing)}"
    return ok, detail


# 9


def check_ecm() -> tuple[bool, str]:
    fx = codec.load_fixture("ecm_semiprime40.json")
    N = codec.from_hex(fx["N"])
    targets = [(91, 10, 0, 30), (N, fx["B1"], fx["seed"], fx["curves"])]
    notes, ok = [], True
    for n, B1, seed, curves in targets:
        bits = stage1_multiplier(B1).bit_length()
        for engine in ("montgomery", "fused"):
            r = ecm_stage1(EcmParams(n, B1, seed, curves, engine))
            good = r.factor is not None and n % r.factor == 0 and 1 < r.factor < n
            for run in r.runs:
                lc = run.ladder_counts
                if lc is not None and not (abs(lc.sqr - 4 * bits) <= 4 and abs(lc.mul - 7 * bits) <= 7):
                    good = False
                    notes.append(f"ladder {lc.as_dict()} for n={bits}")
            ok &= good
            notes.append(f"{n:#x} {engine}: {r.factor} after {r.curves_tried} curves")
    return ok, "; ".join(notes)


# 10


def check_parabola_identity(samples: int = 1000) -> tuple[bool, str]:
    E, _ = _secp160r1()
    rng = random.Random(10)
    done = bad = 0
    while done < samples:
        P, Q, T = (curve.random_point(E, rng) for _ in range(3))
        _, par, _ = curve.double_add(E, P, Q)
        S, l1 = curve.add_with_line(E, P, Q)
        _, l2 = curve.add_with_line(E, S, P)
        if par.kind != "generic" or T.x == S.x:
            continue
        done += 1
        lhs = curve.eval_parabola(par, T) * (T.x - S.x)
        rhs = curve.eval_parabola(l1, T) * curve.eval_parabola(l2, T)
        bad += lhs != rhs
    return bad == 0, f"{samples} random (P, Q, T), {bad} mismatches"


@dataclass(frozen=True)
class Check:
    number: int
    title: str
    fn: Callable[[], tuple[bool, str]]
    budget: float | None = None


CHECKS = [
    Check(1, "group-operation costs", check_table_costs, 1.0),
    Check(2, "1133044 chain replay", check_chain_replay),
    Check(3, "savings formula", check_savings_formula),
    Check(4, "scalar multiplication vs model", check_scalar_model, 30.0),
    Check(5, "Miller step costs", check_pairing_steps),
    Check(6, "Miller totals vs model", check_pairing_totals),
    Check(7, "pairing properties", check_pairing_properties, 60.0),
    Check(8, "group law vs oracle", check_group_law, 10.0),
    Check(9, "ECM stage 1", check_ecm, 5.0),
    Check(10, "parabola identity", check_parabola_identity),
]


def run_check(check: Check) -> CheckResult:
    t0 = time.perf_counter()
    passed, detail = check.fn()
    elapsed = time.perf_counter() - t0
    if check.budget is not None and elapsed > check.budget:
        passed = False
        detail += f"; over the {check.budget:g}s budget"
    return CheckResult(check.number, check.title, passed, detail, elapsed)


def run_all(numbers: list[int] | None = None) -> list[CheckResult]:
    return [run_check(c) for c in CHECKS if numbers is None or c.number in numbers]
