import pytest

from ecarith.costmodel import (
    EPSILON,
    CostParams,
    ecm_breakeven,
    pairing_cost,
    pairing_savings,
    pairing_step_costs,
    scalar_cost,
    scalar_savings,
)

VARIANTS = ("conventional", "save_sqr", "fused")


def test_no_additions_means_no_difference():
    p = CostParams(160, 0.0, 4.18)
    totals = {v: scalar_cost(p, v).total_mul_equiv for v in VARIANTS}
    assert all(t == pytest.approx((4 + 4.18) * 160) for t in totals.values())


def test_closed_forms_by_substitution():
    n, e, a = 160, 0.5, 4.18
    p = CostParams(n, e, a)
    conv = scalar_cost(p, "conventional")
    assert (conv.squarings, conv.multiplications, conv.divisions) == (2 * n + e * n, n + e * n, n + e * n)
    assert conv.total_mul_equiv == pytest.approx((4 + a) * n + (3 + a) * e * n, rel=1e-15)
    assert scalar_cost(p, "save_sqr").total_mul_equiv == pytest.approx((4 + a) * n + (2 + a) * e * n, rel=1e-15)
    assert scalar_cost(p, "fused").total_mul_equiv == pytest.approx((4 + a) * n + (1 + a) * e * n, rel=1e-15)


@pytest.mark.parametrize("eps", [0.1, 1 / 3, 0.5, 0.9])
def test_conventional_minus_fused(eps):
    p = CostParams(256, eps, 6.23)
    diff = scalar_cost(p, "conventional").total_mul_equiv - scalar_cost(p, "fused").total_mul_equiv
    assert diff == pytest.approx(2 * eps * 256)


@pytest.mark.parametrize(
    "eps,alpha,want",
    [(1 / 2, 4.18, 0.085), (1 / 2, 6.23, 0.067), (3 / 8, 4.18, 0.069), (3 / 8, 6.23, 0.055), (1 / 3, 4.18, 0.063)],
)
def test_savings_pairs(eps, alpha, want):
    assert abs(scalar_savings(eps, alpha) - want) <= 0.0005


def test_savings_floor_at_eps_point_two():
    # the exact value is 0.04160; the claimed 4.2% holds to its printed precision
    s = scalar_savings(0.2, 4.18)
    assert s >= 0.042 - 0.0005
    assert f"{s:.1%}" == "4.2%"
    assert all(scalar_savings(e, 4.18) > s for e in (0.21, 0.3, 0.5, 0.9))


def test_savings_identity_over_grid():
    for eps in [i / 20 for i in range(1, 20)]:
        for alpha in (1.0, 3.0, 4.18, 6.23, 10.0):
            p = CostParams(100, eps, alpha)
            conv = scalar_cost(p, "conventional").total_mul_equiv
            fused = scalar_cost(p, "fused").total_mul_equiv
            assert scalar_savings(eps, alpha) == pytest.approx((conv - fused) / conv, rel=1e-12)


def test_epsilon_table():
    assert EPSILON == {"window1": 1 / 2, "window2": 3 / 8, "window4": 15 / 64, "naf": 1 / 3}


def test_divcost_default_and_override():
    assert CostParams(1, 0.5, 4.18).division == pytest.approx(5.18)
    assert CostParams(1, 0.5, 4.18, divcost=7).division == 7
    for bad in (
        {"n": -1, "epsilon": 0.1, "alpha": 4},
        {"n": 1, "epsilon": 1.0, "alpha": 4},
        {"n": 1, "epsilon": 0.1, "alpha": 0},
    ):
        with pytest.raises(ValueError):
            CostParams(**bad)
    with pytest.raises(ValueError):
        scalar_cost(CostParams(1, 0.1, 4), "other")


def test_pairing_totals():
    assert pairing_cost(1, 5.18, "standard") == pytest.approx(21.24)
    assert pairing_cost(1, 5.18, "parabola") == pytest.approx(19.57, abs=0.005)
    assert pairing_savings(5.18) == pytest.approx(5 / 63.72)
    assert f"{pairing_savings(5.18):.1%}" == "7.8%"
    assert pairing_cost(1, mode="trace_standard") == pytest.approx(32 / 3)
    assert pairing_cost(1, mode="trace_parabola") == pytest.approx(28 / 3)
    assert pairing_savings(trace=True) == pytest.approx(0.125)
    with pytest.raises(ValueError):
        pairing_cost(1, mode="other")


def test_pairing_three_steps_by_hand():
    # two doublings at 16.18 and one double-add at 31.36 (standard) or 26.36 (parabola)
    assert pairing_cost(3, 5.18, "standard") == pytest.approx(2 * 16.18 + 31.36)
    assert pairing_cost(3, 5.18, "parabola") == pytest.approx(2 * 16.18 + 26.36)
    c = pairing_step_costs(5.18)
    assert c["double"] == pytest.approx(16.18) and c["trace_parabola"] == 12


def test_ecm_breakeven():
    assert ecm_breakeven(3.0).fused_superior
    slow = ecm_breakeven(10.0)
    assert not slow.fused_superior and slow.fused_cost > slow.ladder_cost
    edge = ecm_breakeven(1.5 + 3.5, n=30)
    assert edge.breakeven_inversion == 5.0
    assert edge.fused_cost == pytest.approx(edge.ladder_cost)
    assert ecm_breakeven(4.0, sqr=0.8, mul=1.0).breakeven_inversion == pytest.approx(1.2 + 3.5)
