import numpy as np
import pytest

from conftest import random_params
from hetnet import duopoly, welfare
from hetnet.core import MarketParams
from hetnet.welfare import (
    REVENUE_MAX,
    WELFARE_MAX,
    NewBandScenario,
    binary_game_welfare,
    loss_condition,
    new_band_threshold,
    optimal_window,
    ratio_bound,
    sweep_split,
    three_scenario_welfare,
)

LEGACY = (1.0, 1.2)
LAM = 4.0


@pytest.fixture
def newband():
    return MarketParams(0.5, 50.0, 50.0, 50.0)


def test_loss_condition(newband):
    assert not loss_condition(newband, (1, 1), (0, 0), LAM)
    assert loss_condition(newband, (1, 1), (1, 1), LAM)
    for b1n in np.linspace(0, 10, 11):
        sc = NewBandScenario.from_share(LEGACY, 10.0, b1n)
        assert loss_condition(newband, sc.totals, sc.floors, LAM)


def test_ratio_bound_value(newband):
    assert ratio_bound(newband, LAM) == pytest.approx((200 / 250) ** 0.5)
    tiny = MarketParams(0.5, 50.0, 1e-9, 50.0)
    assert ratio_bound(tiny, LAM) == pytest.approx(1.0, abs=1e-9)


def test_threshold(newband):
    assert new_band_threshold(newband, LEGACY, LAM) == pytest.approx(8.8)
    assert new_band_threshold(newband, (2.0, 2.4), LAM) == pytest.approx(17.6)
    few = MarketParams(0.5, 50.0, 50.0, 1e-9)
    assert new_band_threshold(few, LEGACY, LAM) == pytest.approx(0.0, abs=1e-9)


def test_window(newband):
    assert optimal_window(newband, LEGACY, 6.0, LAM) == pytest.approx((1.2, 4.0))
    assert optimal_window(newband, LEGACY, 10.0, LAM) is None


def test_scenario_validation():
    with pytest.raises(ValueError):
        NewBandScenario(LEGACY, 6.0, (4.0, 1.0))
    with pytest.raises(ValueError):
        NewBandScenario.from_share(LEGACY, 6.0, 7.0)
    with pytest.raises(ValueError):
        NewBandScenario(LEGACY, 6.0, (-1.0, 7.0))
    sc = NewBandScenario.from_share(LEGACY, 6.0, 2.0)
    assert sc.totals == pytest.approx((3.0, 5.2))
    assert sc.floors == (2.0, 4.0)


def test_plateau_inside_window(newband):
    for b1n in (1.2, 2.0, 3.0, 4.0):
        cmp = three_scenario_welfare(newband, NewBandScenario.from_share(LEGACY, 6.0, b1n), LAM)
        ref = cmp.sw_unrestricted_opt
        assert cmp.sw_restricted_opt == pytest.approx(ref, rel=1e-9)
        assert cmp.sw_restricted_ne == pytest.approx(ref, rel=1e-9)


def test_window_edges_are_sharp(newband):
    for b1n in (1.2 - 1e-3, 4.0 + 1e-3):
        cmp = three_scenario_welfare(newband, NewBandScenario.from_share(LEGACY, 6.0, b1n), LAM)
        # the loss is second order in the distance to the window, so compare strictly
        assert cmp.sw_restricted_ne < cmp.sw_unrestricted_opt
        assert cmp.region != duopoly.REGION_A
        assert cmp.sw_restricted_opt == pytest.approx(cmp.sw_unrestricted_opt, rel=1e-9)


def test_large_band_always_loses(newband):
    for pt in sweep_split(newband, LEGACY, 10.0, LAM, steps=51):
        assert pt.sw_restricted_ne <= pt.sw_restricted_opt * (1 + 1e-9)
        assert pt.sw_restricted_opt < pt.sw_unrestricted_opt


def test_equality_in_loss_case_iff_both_at_floor(newband):
    for b1n in np.linspace(0, 10, 41):
        cmp = three_scenario_welfare(newband, NewBandScenario.from_share(LEGACY, 10.0, b1n), LAM)
        equal = abs(cmp.sw_restricted_ne - cmp.sw_restricted_opt) <= 1e-9 * cmp.sw_restricted_opt
        assert equal == (cmp.region in (duopoly.REGION_B_I, duopoly.REGION_C_I))


def test_chain_and_ratio_bound_random(rng):
    for _ in range(100):
        p = random_params(rng)
        lam = rng.uniform(1.1, 6)
        legacy = tuple(rng.uniform(0.2, 3, size=2))
        b = rng.uniform(0, 10)
        sc = NewBandScenario.from_share(legacy, b, rng.uniform(0, b))
        cmp = three_scenario_welfare(p, sc, lam)
        assert cmp.sw_restricted_ne <= cmp.sw_restricted_opt * (1 + 1e-9)
        assert cmp.sw_restricted_opt <= cmp.sw_unrestricted_opt * (1 + 1e-9)
        assert cmp.sw_restricted_ne / cmp.sw_unrestricted_opt >= ratio_bound(p, lam) - 1e-9
        t = cmp.threshold_t
        if b <= t:
            assert cmp.sw_restricted_opt == pytest.approx(cmp.sw_unrestricted_opt, rel=1e-9)
        else:
            assert cmp.sw_restricted_opt < cmp.sw_unrestricted_opt


def test_ratio_bound_tight_when_everything_forced(rng):
    for _ in range(20):
        p = random_params(rng)
        lam = rng.uniform(1.1, 6)
        legacy = tuple(rng.uniform(0.2, 3, size=2))
        # all legacy spectrum vanishes relative to the band: floors equal totals
        sc = NewBandScenario((1e-300, 1e-300), sum(legacy), legacy)
        cmp = three_scenario_welfare(p, sc, lam)
        assert cmp.sw_restricted_ne / cmp.sw_unrestricted_opt == pytest.approx(ratio_bound(p, lam), rel=1e-6)


def test_split_symmetry(newband):
    a = sweep_split(newband, (1.0, 1.2), 6.0, LAM, steps=13)
    b = sweep_split(newband, (1.2, 1.0), 6.0, LAM, steps=13)
    for pa, pb in zip(a, reversed(b)):
        assert pa.sw_restricted_ne == pytest.approx(pb.sw_restricted_ne, rel=1e-9)
        assert pa.sw_restricted_opt == pytest.approx(pb.sw_restricted_opt, rel=1e-9)


def test_game_welfare_strategies(game_market):
    for c in (0.0, 10.0, 17.0):
        rev = binary_game_welfare(game_market, 1.0, 2.0, c, REVENUE_MAX)
        sw = binary_game_welfare(game_market, 1.0, 2.0, c, WELFARE_MAX)
        assert rev.sw["II"] == sw.sw["II"]
        assert rev.sw["NN"] == sw.sw["NN"]
        assert sw.sw["IN"] >= rev.sw["IN"]
        assert sw.investor_small_bw >= rev.investor_small_bw


def test_one_investor_can_beat_both_in_region_one(game_market):
    from hetnet import investment_game as ig

    c_ii, _ = ig.boundary_costs(game_market, 1.0, 2.0, 0.0, 40.0)
    found = []
    for c in np.linspace(0.0, c_ii, 200, endpoint=False):
        _, eq = ig.solve_binary_game(game_market, 1.0, 2.0, float(c))
        assert eq.pure_ne == {"II"}
        g = binary_game_welfare(game_market, 1.0, 2.0, float(c), REVENUE_MAX)
        if g.sw["IN"] > g.sw["II"]:
            found.append(c)
    assert found


def test_welfare_max_split_beats_grid(game_market):
    x = welfare.welfare_max_investor_split(game_market, 1.0, 2.0)
    best = max(welfare.one_investor_welfare(game_market, 1.0, 2.0, float(g)) for g in np.linspace(0, 1, 2001))
    assert welfare.one_investor_welfare(game_market, 1.0, 2.0, x) >= best - 1e-9


def test_bad_strategy(game_market):
    with pytest.raises(ValueError):
        binary_game_welfare(game_market, 1.0, 2.0, 0.0, "greedy")
