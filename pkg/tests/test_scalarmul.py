import itertools
import random

import pytest
from conftest import affine_points, as_tuple
from hypothesis import given
from hypothesis import strategies as st
from oracle import oracle_add, oracle_mul

from ecarith import codec, curve
from ecarith.curve import INFINITY, CurveParams
from ecarith.scalarmul import (
    ChainStep,
    chain_value,
    exec_chain,
    mul_naf,
    mul_window,
    multi_mul,
    recode_naf,
    repeated_addition,
    separate_mul,
    window_digits,
)


@pytest.fixture
def f17():
    return CurveParams.short(17, 2, 2)


def test_naf_examples():
    assert recode_naf(29) == [1, 0, 0, -1, 0, 1]
    assert recode_naf(1) == [1]
    for t in range(1, 10):
        assert recode_naf(1 << t) == [1] + [0] * t
    with pytest.raises(ValueError):
        recode_naf(0)


@given(st.integers(min_value=1, max_value=1 << 300))
def test_naf_is_valid(k):
    d = recode_naf(k)
    assert sum(v << i for i, v in enumerate(reversed(d))) == k
    assert all(not (a and b) for a, b in itertools.pairwise(d))
    assert d[0] == 1


@given(st.integers(min_value=1, max_value=1 << 200), st.sampled_from([1, 2, 4]))
def test_window_digits_value(k, w):
    d = window_digits(k, w)
    v = 0
    for x in d:
        v = (v << w) + x
    assert v == k and d[0] != 0


def test_naf_density():
    rng = random.Random(1)
    digits = nonzero = 0
    for _ in range(2000):
        d = recode_naf(rng.getrandbits(256) | 1 << 255)
        digits += len(d)
        nonzero += sum(1 for x in d if x)
    assert abs(nonzero / digits - 1 / 3) <= 0.02


@pytest.mark.parametrize("w,eps", [(1, 1 / 2), (2, 3 / 8), (4, 15 / 64)])
def test_window_epsilon_emerges(w, eps):
    rng = random.Random(w)
    adds = bits = 0
    for _ in range(10_000):
        k = rng.getrandbits(256) | 1 << 255
        adds += sum(1 for d in window_digits(k, w)[1:] if d)
        bits += 256
    assert abs(adds / bits - eps) <= 0.005


def test_window_epsilon_in_reports(secp160r1):
    E, G, _ = secp160r1
    rng = random.Random(9)
    for w, eps in [(1, 1 / 2), (2, 3 / 8), (4, 15 / 64)]:
        adds = 0
        for _ in range(20):
            adds += mul_window(E, rng.getrandbits(160) | 1 << 159, G, w, "fused").additions
        assert abs(adds / (20 * 160) - eps) < 0.04


def test_window_small_examples(f17):
    P = affine_points(f17)[1]
    for w in (1, 2, 4):
        r = mul_window(f17, 1, P, w)
        assert r.result == P and r.elliptic_ops == 0 and r.counts.mults == 0
    r = mul_window(f17, 2, P, 1)
    before = f17.ctx.snapshot()
    curve.double(f17, P)
    assert r.counts == f17.ctx.snapshot() - before
    assert r.result == curve.double(f17, P)
    assert mul_window(f17, 0, P).result == INFINITY
    assert mul_naf(f17, -5, P).result == curve.negate(f17, mul_naf(f17, 5, P).result)


def test_modes_agree_small_curve(f17):
    rng = random.Random(2)
    pts = affine_points(f17)
    for _ in range(1000):
        k = rng.randrange(1, 1 << 40)
        P = rng.choice(pts)
        ref = mul_naf(f17, k, P, "standard").result
        assert mul_naf(f17, k, P, "fused").result == ref
        for w in (1, 2, 4):
            assert mul_window(f17, k, P, w, "standard").result == ref
            assert mul_window(f17, k, P, w, "fused").result == ref


def test_modes_agree_160_bit(secp160r1):
    E, G, n = secp160r1
    rng = random.Random(3)
    for _ in range(30):
        k = rng.getrandbits(160)
        ref = mul_naf(E, k, G, "standard").result
        assert mul_naf(E, k, G, "fused").result == ref
        for w in (1, 2, 4):
            assert mul_window(E, k, G, w, "fused").result == ref
    assert mul_naf(E, n, G).result == INFINITY


def test_oracle_equivalence_all_strategies(f17):
    c = f17.as_ints()
    for P in affine_points(f17):
        for k in range(1, 201):
            want = oracle_mul(17, c, k, as_tuple(P))
            assert as_tuple(mul_naf(f17, k, P, "fused").result) == want
            assert as_tuple(mul_naf(f17, k, P, "standard").result) == want
            for w in (1, 2, 4):
                assert as_tuple(mul_window(f17, k, P, w, "fused").result) == want
            if k % 20 == 0:
                assert as_tuple(repeated_addition(f17, k, P)) == want


def test_fused_saves_one_sqr_and_one_mul_per_fusion(secp160r1):
    E, G, _ = secp160r1
    rng = random.Random(4)
    for _ in range(10):
        k = rng.getrandbits(160)
        s = mul_naf(E, k, G, "standard")
        f = mul_naf(E, k, G, "fused")
        fusions = f.ops["double_add"] + f.ops["double_sub"]
        assert s.counts.div == f.counts.div
        assert s.counts.sqr - f.counts.sqr == fusions
        assert s.counts.mul - f.counts.mul == fusions


def test_fused_naf_counts_256_bit(secp160r1):
    E, G, _ = secp160r1
    rng = random.Random(5)
    n = 256
    tot = [0, 0, 0]
    runs = 10
    for _ in range(runs):
        c = mul_naf(E, rng.getrandbits(n) | 1 << (n - 1), G, "fused").counts
        tot[0] += c.sqr
        tot[1] += c.mul
        tot[2] += c.div
    for got, want in zip(tot, (2 * n, n, 4 * n / 3)):
        assert abs(got / runs - want) / want <= 0.05


def test_chain_examples(f17, secp160r1):
    P = affine_points(f17)[2]
    assert exec_chain(f17, [], P).result == P
    assert exec_chain(f17, [ChainStep("d"), ChainStep("d")], P).result == mul_naf(f17, 4, P).result
    with pytest.raises(ValueError):
        exec_chain(f17, [ChainStep("da", 1)], P, [])
    with pytest.raises(ValueError):
        ChainStep("x")

    fx = codec.load_fixture("chain_1133044.json")
    E, G, _ = secp160r1
    steps = codec.chain_from_json(fx["steps"])
    assert chain_value(steps, fx["precomputed_multiples"]) == fx["k"] == 1133044
    table = [mul_naf(E, 3, G).result]
    for mode in ("standard", "fused"):
        r = exec_chain(E, steps, G, table, mode)
        assert r.result == mul_naf(E, fx["k"], G).result
        c = r.counts.as_dict()
        assert {k: c[k] for k in ("div", "sqr", "mul")} == fx["expected"][mode]


def test_chain_json_round_trip():
    steps = [ChainStep("a", 1), ChainStep("d"), ChainStep("ta", 2), ChainStep("t")]
    assert codec.chain_from_json(codec.chain_to_json(steps)) == steps


def test_triple_chain_ops(f17):
    P = affine_points(f17)[4]
    steps = [ChainStep("t"), ChainStep("ta", 1), ChainStep("ds", 1)]
    want = chain_value(steps, [1])
    for mode in ("standard", "fused"):
        assert exec_chain(f17, steps, P, [P], mode).result == mul_naf(f17, want, P).result


def test_multi_mul_29_44(secp160r1):
    fx = codec.load_fixture("multimul_29_44.json")
    E, G, _ = secp160r1
    P1, P2 = G, mul_naf(E, 2, G).result
    joint = multi_mul(E, fx["scalars"], [P1, P2], "fused")
    assert joint.trace == fx["trace"]
    assert joint.total_elliptic_ops == fx["joint_elliptic_ops"] == 10
    assert joint.precomp_ops["add"] == 1
    assert joint.ops["double_add"] == 4 and joint.ops["double"] == 1
    sep = separate_mul(E, fx["scalars"], [P1, P2], "standard")
    from ecarith.scalarmul import elliptic_op_count

    assert elliptic_op_count(sep.ops) == fx["separate_elliptic_ops"] == 15
    assert joint.result == sep.result == mul_naf(E, 29 + 88, G).result


def test_multi_mul_single_pair_matches_window1(f17):
    P = affine_points(f17)[5]
    for k in range(1, 60):
        a = multi_mul(f17, [k], [P], "standard")
        b = mul_window(f17, k, P, 1, "standard")
        assert a.result == b.result and a.counts == b.counts


def test_multi_mul_random_triples(f17):
    rng = random.Random(6)
    pts = affine_points(f17)
    c = f17.as_ints()
    for _ in range(200):
        ks = [rng.randrange(-50, 300) for _ in range(3)]
        Ps = [rng.choice(pts) for _ in range(3)]
        want = None
        for k, P in zip(ks, Ps):
            want = oracle_add(17, c, want, oracle_mul(17, c, k, as_tuple(P)))
        for mode in ("standard", "fused"):
            assert as_tuple(multi_mul(f17, ks, Ps, mode).result) == want
    with pytest.raises(ValueError):
        multi_mul(f17, [1, 2], [pts[1]])
