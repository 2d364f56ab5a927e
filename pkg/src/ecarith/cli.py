"""Command-line front end: ``ecarith {mul,multimul,ecm,pair,model,selftest}``.

Exit codes: 0 success, 1 selftest failure, 2 usage or malformed input,
3 math-domain error, 4 no factor found or evaluation retries exhausted.
"""

from __future__ import annotations

import argparse
import random
import sys
from collections.abc import Sequence
from typing import Any

from . import checks, codec, costmodel, pairing
from .curve import CurveParams, CurvePoint
from .ecm import ENGINES as ECM_ENGINES
from .ecm import EcmParams, ecm_cost_compare, ecm_stage1, stage1_multiplier
from .errors import DomainError, RetriesExhausted
from .scalarmul import (
    MODES,
    MulReport,
    elliptic_op_count,
    exec_chain,
    mul_naf,
    mul_window,
    multi_mul,
    separate_mul,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN, EXIT_NOT_FOUND = 0, 1, 2, 3, 4

STRATEGIES = ("window1", "window2", "window4", "naf", "chain")


class NoFactorFound(Exception):
    pass


def _emit(report: dict, as_json: bool, text: str) -> None:
    print(codec.dumps(report) if as_json else text)


def _counts(c) -> dict:
    return c.as_dict()


def _curve_and_base(args) -> tuple[CurveParams, dict, CurvePoint | None]:
    E, obj = codec.load_curve(args.curve)
    base = codec.point_from_json(E, obj["base"]) if "base" in obj else None
    return E, obj, base


def _point_arg(E: CurveParams, text: str | None, default: CurvePoint | None, what: str) -> CurvePoint:
    if text is None:
        if default is None:
            raise ValueError(f"--{what} is required for this curve")
        return default
    return codec.point_from_json(E, text)


def _mul_once(E, k, P, strategy, mode, chain_fx) -> MulReport:
    if strategy == "naf":
        return mul_naf(E, k, P, mode)
    if strategy == "chain":
        steps = codec.chain_from_json(chain_fx["steps"])
        table = [mul_naf(E, q, P).result for q in chain_fx.get("precomputed_multiples", [])]
        return exec_chain(E, steps, P, table, mode)
    return mul_window(E, k, P, int(strategy[len("window") :]), mode)


def cmd_mul(args) -> int:
    E, _, base = _curve_and_base(args)
    P = _point_arg(E, args.p, base, "p")
    chain_fx = None
    if args.chain:
        chain_fx = codec.load_source(args.chain)
        args.strategy = "chain"
        if args.k is None:
            args.k = hex(chain_fx["k"])
    if args.strategy == "chain" and chain_fx is None:
        raise ValueError("strategy 'chain' needs --chain")
    if args.k is None:
        raise ValueError("--k is required")
    k = codec.from_hex(args.k)
    divcost = args.divcost
    if divcost is None:
        divcost = chain_fx.get("divcost", args.alpha + 1) if chain_fx else args.alpha + 1
    modes = ("standard", "fused") if args.compare else (args.mode,)
    runs = {m: _mul_once(E, k, P, args.strategy, m, chain_fx) for m in modes}
    if args.compare and runs["standard"].result != runs["fused"].result:
        raise RuntimeError("standard and fused results differ")
    main = runs[modes[-1]]
    report: dict[str, Any] = {
        "command": "mul",
        "inputs": {"k": codec.to_hex(k), "strategy": args.strategy, "modes": list(modes), "P": codec.point_to_json(P)},
        "result": codec.point_to_json(main.result),
        "runs": {
            m: {
                "counts": _counts(r.counts),
                "precomp_counts": _counts(r.precomp_counts),
                "ops": dict(sorted(r.ops.items())),
                "elliptic_ops": r.elliptic_ops,
                "cost": r.counts.mults + divcost * r.counts.div,
            }
            for m, r in runs.items()
        },
        "divcost": divcost,
    }
    lines = [f"kP = {codec.dumps(report['result'], pretty=False)}"]
    for m, r in runs.items():
        lines.append(f"{m}: {_counts(r.counts)} ops {dict(sorted(r.ops.items()))}")
    if args.compare:
        std, new = report["runs"]["standard"]["cost"], report["runs"]["fused"]["cost"]
        savings = (std - new) / std if std else 0.0
        eps = costmodel.EPSILON.get(args.strategy)
        predicted = costmodel.scalar_savings(eps, args.alpha) if eps is not None else None
        report["savings"] = savings
        report["predicted_savings"] = predicted
        line = f"savings {savings:.2%} at div={divcost:g}"
        if predicted is not None:
            line += f" (model {predicted:.2%} at alpha={args.alpha:g})"
        lines.append(line)
    _emit(report, args.json, "\n".join(lines))
    return EXIT_OK


def cmd_multimul(args) -> int:
    E, _, base = _curve_and_base(args)
    ks = [codec.from_hex(k) for k in args.k]
    if args.p:
        points = [codec.point_from_json(E, p) for p in args.p]
    else:
        if base is None:
            raise ValueError("--p is required for this curve")
        points = [mul_naf(E, i + 1, base).result for i in range(len(ks))]
    if len(ks) != len(points):
        raise ValueError("need as many --p as --k")
    if not 1 <= len(ks) <= 3:
        raise ValueError("multimul takes one to three scalar/point pairs")
    joint = multi_mul(E, ks, points, args.mode)
    sep = separate_mul(E, ks, points, args.mode)
    if joint.result != sep.result:
        raise RuntimeError("joint and separate results differ")
    joint_ops = joint.total_elliptic_ops
    sep_ops = elliptic_op_count(sep.ops)
    report = {
        "command": "multimul",
        "inputs": {
            "k": [codec.to_hex(k) for k in ks],
            "P": [codec.point_to_json(P) for P in points],
            "mode": args.mode,
        },
        "result": codec.point_to_json(joint.result),
        "trace": joint.trace,
        "joint": {
            "counts": _counts(joint.counts),
            "precomp_counts": _counts(joint.precomp_counts),
            "elliptic_ops": joint_ops,
        },
        "separate": {"counts": _counts(sep.counts), "elliptic_ops": sep_ops},
    }
    text = "\n".join(
        [
            f"sum = {codec.dumps(report['result'], pretty=False)}",
            "trace: " + ", ".join(joint.trace),
            f"joint: {joint_ops} elliptic operations (table included)",
            f"separate: {sep_ops} elliptic operations",
        ]
    )
    _emit(report, args.json, text)
    return EXIT_OK


def cmd_ecm(args) -> int:
    N = codec.from_hex(args.n)
    params = EcmParams(N, args.b1, args.seed, args.curves, args.engine, args.batch, args.workers)
    result = ecm_stage1(params)
    report = {
        "command": "ecm",
        "inputs": {
            "n": codec.to_hex(N),
            "b1": args.b1,
            "curves": args.curves,
            "engine": args.engine,
            "seed": args.seed,
            "batch": args.batch,
        },
        "factor": codec.to_hex(result.factor) if result.factor else None,
        "curves_tried": result.curves_tried,
        "counts": [
            {
                "curve": r.index,
                "counts": _counts(r.counts),
                "ladder_counts": _counts(r.ladder_counts) if r.ladder_counts else None,
                "factor": codec.to_hex(r.factor) if r.factor else None,
            }
            for r in result.runs
        ],
        "multiplier_bits": stage1_multiplier(args.b1).bit_length(),
    }
    text = (
        f"factor {result.factor} after {result.curves_tried} curves"
        if result.factor
        else f"no factor after {result.curves_tried} curves"
    )
    _emit(report, args.json, text)
    if result.factor is None:
        raise NoFactorFound(text)
    return EXIT_OK


def cmd_pair(args) -> int:
    E, obj, _ = _curve_and_base(args)
    P = _point_arg(E, args.p, codec.point_from_json(E, obj["P"]) if "P" in obj else None, "p")
    Q = _point_arg(E, args.q, codec.point_from_json(E, obj["Q"]) if "Q" in obj else None, "q")
    if args.m is None and "m" not in obj:
        raise ValueError("--m is required for this curve")
    m = codec.from_hex(args.m if args.m is not None else obj["m"])
    if args.weil:
        rep = pairing.weil_report(E, P, Q, m, args.engine, args.seed, args.recoding)
    else:
        rep = pairing.tate_report(E, P, Q, m, args.engine, args.seed, args.reduce, args.recoding)
    steps = {
        "double": rep.steps.get("double", 0),
        "double_add": rep.steps.get("double_add", 0),
        "sub": rep.steps.get("double_sub", 0),
    }
    report = {
        "command": "pair",
        "inputs": {
            "P": codec.point_to_json(P),
            "Q": codec.point_to_json(Q),
            "m": codec.to_hex(m),
            "engine": args.engine,
            "kind": "weil" if args.weil else "tate",
            "reduce": bool(args.reduce),
            "seed": args.seed,
        },
        "value": codec.to_hex(rep.value.value),
        "counts": _counts(rep.counts),
        "steps": steps,
        "attempts": rep.attempts,
    }
    _emit(report, args.json, f"value {report['value']} counts {report['counts']} steps {steps}")
    return EXIT_OK


def _model_scalar(args) -> tuple[dict, list[str]]:
    rows = []
    for name, eps in costmodel.EPSILON.items():
        for alpha in args.alpha:
            rows.append(
                {"recoding": name, "epsilon": eps, "alpha": alpha, "savings": costmodel.scalar_savings(eps, alpha)}
            )
    lines = [f"{'recoding':<10} {'epsilon':>8} {'alpha':>6} {'savings':>8}"]
    lines += [f"{r['recoding']:<10} {r['epsilon']:>8.4f} {r['alpha']:>6.2f} {r['savings']:>8.2%}" for r in rows]
    out: dict[str, Any] = {"scalar": rows}
    if args.measure:
        out["measured"] = _measure_scalar(args.measure, args.seed, args.alpha[0], args.n)
        mm = out["measured"]
        lines.append(
            f"measured over {args.measure} NAF scalars of {args.n} bits at alpha={args.alpha[0]:g}: "
            f"fused {mm['fused']:.1f} (model {mm['fused_model']:.1f}), standard {mm['standard']:.1f} "
            f"(model {mm['standard_model']:.1f}), savings {mm['savings']:.2%}"
        )
    return out, lines


def _measure_scalar(samples: int, seed: int, alpha: float, n: int) -> dict:
    E, obj = codec.load_curve("secp160r1")
    G = codec.point_from_json(E, obj["base"])
    rng = random.Random(seed)
    tot = {"standard": 0.0, "fused": 0.0}
    for _ in range(samples):
        k = rng.getrandbits(n) | 1 << (n - 1)
        for mode in tot:
            c = mul_naf(E, k, G, mode).counts
            tot[mode] += c.mults + (alpha + 1) * c.div
    mean = {m: v / samples for m, v in tot.items()}
    fm = costmodel.scalar_cost(costmodel.CostParams(n, 1 / 3, alpha), "fused").total_mul_equiv
    sm = costmodel.scalar_cost(costmodel.CostParams(n, 1 / 3, alpha), "conventional").total_mul_equiv
    return {
        "fused": mean["fused"],
        "standard": mean["standard"],
        "fused_model": fm,
        "standard_model": sm,
        "fused_deviation": costmodel.relative_deviation(mean["fused"], fm),
        "standard_deviation": costmodel.relative_deviation(mean["standard"], sm),
        "savings": (mean["standard"] - mean["fused"]) / mean["standard"],
    }


def _model_pairing(args) -> tuple[dict, list[str]]:
    d = args.divcost
    per = {mode: costmodel.pairing_cost(1, d, mode) for mode in costmodel.PAIRING_MODES}
    out = {
        "pairing": {
            "n": args.n,
            "divcost": d,
            "per_bit": per,
            "totals": {mode: v * args.n for mode, v in per.items()},
            "improvement": costmodel.pairing_savings(d),
            "trace_improvement": costmodel.pairing_savings(d, trace=True),
        }
    }
    p = out["pairing"]
    lines = [
        f"Miller loop, n={args.n}, divcost={d:g}",
        f"standard {per['standard']:.2f}n = {p['totals']['standard']:.1f}",
        f"parabola {per['parabola']:.2f}n = {p['totals']['parabola']:.1f}",
        f"improvement {p['improvement']:.1%}",
        f"trace: lines {per['trace_standard']:.2f}n, parabolas {per['trace_parabola']:.2f}n, improvement {p['trace_improvement']:.1%}",
    ]
    return out, lines


def _model_ecm(args) -> tuple[dict, list[str]]:
    rows = [ecm_cost_compare(args.n, a) for a in args.alpha]
    out = {
        "ecm": [
            {
                "n": r.n,
                "alpha": r.alpha,
                "ladder": r.ladder,
                "fused": r.fused,
                "breakeven_inversion": r.breakeven_inversion,
                "fused_superior": r.fused_superior,
            }
            for r in rows
        ]
    }
    lines = [f"ECM stage 1, n={args.n}: ladder 4n S + 7n M vs fused 2n S + n M + 4n/3 D"]
    lines += [
        f"alpha={r.alpha:g}: ladder {r.ladder:.1f}, fused {r.fused:.1f}, fused wins: {r.fused_superior} "
        f"(break-even inversion {r.breakeven_inversion:g} M)"
        for r in rows
    ]
    return out, lines


def cmd_model(args) -> int:
    if args.alpha is None:
        args.alpha = [4.18, 6.23]
    report: dict[str, Any] = {"command": "model"}
    lines: list[str] = []
    sections = [s for s in ("scalar", "pairing", "ecm") if getattr(args, s)] or ["scalar"]
    for s in sections:
        part, text = {"scalar": _model_scalar, "pairing": _model_pairing, "ecm": _model_ecm}[s](args)
        report.update(part)
        lines += text
    _emit(report, args.json, "\n".join(lines))
    return EXIT_OK


def cmd_selftest(args) -> int:
    numbers = [int(x) for x in args.only.split(",")] if args.only else None
    results = checks.run_all(numbers)
    report = {
        "command": "selftest",
        "results": [{"number": r.number, "title": r.title, "passed": r.passed, "detail": r.detail} for r in results],
        "passed": all(r.passed for r in results),
    }
    _emit(report, args.json, "\n".join(r.line() for r in results))
    return EXIT_OK if report["passed"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ecarith", description="Instrumented elliptic-curve arithmetic.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    p = add("mul", "scalar multiplication with operation counts")
    p.add_argument("--curve", default="secp160r1", help="curve JSON file or packaged fixture name")
    p.add_argument("--k", help="scalar (hex or decimal)")
    p.add_argument("--p", help='point JSON {"x": hex, "y": hex}; defaults to the curve base point')
    p.add_argument("--strategy", choices=STRATEGIES, default="naf")
    p.add_argument("--chain", help="chain JSON file or packaged fixture name (implies --strategy chain)")
    p.add_argument("--mode", choices=MODES, default="fused")
    p.add_argument("--compare", action="store_true", help="run both modes and report the savings")
    p.add_argument("--alpha", type=float, default=4.18, help="inversion/multiplication cost ratio")
    p.add_argument("--divcost", type=float, help="multiplications per division (default alpha + 1)")
    p.set_defaults(func=cmd_mul)

    p = add("multimul", "joint multi-scalar multiplication")
    p.add_argument("--curve", default="secp160r1")
    p.add_argument("--k", action="append", required=True, help="scalar; repeat for each pair")
    p.add_argument("--p", action="append", help="point JSON; repeat for each pair (default: P_i = i * base)")
    p.add_argument("--mode", choices=MODES, default="fused")
    p.set_defaults(func=cmd_multimul)

    p = add("ecm", "ECM stage 1")
    p.add_argument("--n", required=True, help="number to factor (hex or decimal)")
    p.add_argument("--b1", type=int, default=300)
    p.add_argument("--curves", type=int, default=30)
    p.add_argument("--engine", choices=ECM_ENGINES, default="montgomery")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batch", action="store_true", help="fused engine: run all curves in lockstep")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_ecm)

    p = add("pair", "Tate or Weil pairing")
    p.add_argument("--curve", default="pairing_m13")
    p.add_argument("--p", help="m-torsion point P (default from the curve file)")
    p.add_argument("--q", help="point Q (default from the curve file)")
    p.add_argument("--m", help="torsion order (hex or decimal)")
    p.add_argument("--engine", choices=pairing.PAIRING_ENGINES, default="parabola")
    p.add_argument("--recoding", choices=pairing.RECODINGS, default="naf")
    p.add_argument("--reduce", action="store_true", help="raise the Tate value to (p - 1) / m")
    p.add_argument("--weil", action="store_true", help="Weil instead of Tate")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_pair)

    p = add("model", "analytic cost tables")
    p.add_argument("--scalar", action="store_true", help="scalar multiplication savings grid")
    p.add_argument("--pairing", action="store_true", help="Miller loop costs")
    p.add_argument("--ecm", action="store_true", help="ladder vs fused stage 1")
    p.add_argument("--n", type=int, default=160, help="bit length")
    p.add_argument("--alpha", type=float, action="append", help="inversion ratio; repeatable")
    p.add_argument("--divcost", type=float, default=costmodel.PAIRING_DIVCOST)
    p.add_argument("--measure", type=int, default=0, help="also measure this many random NAF scalars")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_model)

    p = add("selftest", "run the acceptance checks")
    p.add_argument("--only", help="comma-separated check numbers")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (NoFactorFound, RetriesExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
