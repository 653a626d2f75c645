import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hetnet.core import (
    MIXED,
    SEPARATE,
    Allocation,
    MarketParams,
    ProviderConfig,
    demand,
    market_clearing_price,
    marginal_utility,
    net_payoff,
    profile_outcome,
    utility,
)

alphas = st.floats(min_value=0.05, max_value=0.95)
prices = st.floats(min_value=0.01, max_value=100.0)


def test_utility_values():
    assert utility(0.0, 0.3) == 0.0
    assert utility(1.0, 0.3) == pytest.approx(1 / 0.7)
    assert utility(4.0, 0.5) == pytest.approx(4.0)


def test_demand_values():
    assert demand(1.0, 0.4) == pytest.approx(1.0)
    assert demand(0.25, 0.5) == pytest.approx(16.0)
    with pytest.raises(ValueError, match="price must be positive"):
        demand(0.0, 0.5)
    with pytest.raises(ValueError):
        demand(-1.0, 0.5)


def test_net_payoff_values():
    assert net_payoff(1.0, 0.5) == pytest.approx(1.0)
    assert net_payoff(4.0, 0.5) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        net_payoff(0.0, 0.5)


def test_clearing_price_values():
    assert market_clearing_price(7.0, 7.0, 0.6) == pytest.approx(1.0)
    assert market_clearing_price(100.0, 50.0, 0.5) == pytest.approx(2 ** -0.5)
    with pytest.raises(ValueError, match="no supply"):
        market_clearing_price(0.0, 10.0, 0.5)


@given(p=prices, a=alphas)
def test_net_payoff_identity(p, a):
    d = demand(p, a)
    assert net_payoff(p, a) == pytest.approx(utility(d, a) - p * d, rel=1e-9)


@given(c=st.floats(min_value=1e-3, max_value=1e4), k=st.floats(min_value=1e-2, max_value=1e3), a=alphas)
def test_clearing_round_trip(c, k, a):
    p = market_clearing_price(c, k, a)
    assert k * demand(p, a) == pytest.approx(c, rel=1e-8)


@given(r=st.floats(min_value=0.05, max_value=50.0), a=alphas)
def test_marginal_utility_matches_finite_difference(r, a):
    h = 1e-6 * r
    fd = (utility(r + h, a) - utility(r - h, a)) / (2 * h)
    assert fd == pytest.approx(r ** -a, rel=1e-6)
    assert marginal_utility(r, a) == pytest.approx(r ** -a)


def test_params_validation():
    with pytest.raises(ValueError, match="alpha"):
        MarketParams(1.0, 1, 1, 1)
    with pytest.raises(ValueError, match="alpha"):
        MarketParams(0.0, 1, 1, 1)
    with pytest.raises(ValueError, match="n_f"):
        MarketParams(0.5, 1, 1, 0)
    with pytest.raises(ValueError):
        ProviderConfig(total_bw=1.0, small_floor=2.0)
    with pytest.raises(ValueError):
        ProviderConfig(total_bw=1.0, density=-1)
    with pytest.raises(ValueError):
        Allocation(-0.1, 0.5)


def test_allocation_capacity_and_bounds():
    a = Allocation(0.4, 0.6)
    assert a.macro_capacity(50) == pytest.approx(20)
    assert a.small_capacity(3, 50) == pytest.approx(90)
    a.check_within(1.0)
    with pytest.raises(ValueError):
        a.check_within(0.9)


def test_single_provider_macro_only(duo_market):
    B = 1.0
    out = profile_outcome(duo_market, [ProviderConfig(B)], [Allocation(B, 0.0)], service_mode=MIXED)
    n = duo_market.n_total
    assert out.welfare == pytest.approx(n * utility(B * duo_market.r0 / n, duo_market.alpha))
    assert out.price_small == (None,)


def test_proportional_providers_scale_revenue(duo_market):
    share = duo_market.small_share(2.0)
    provs = [ProviderConfig(2.0, 0, 2.0), ProviderConfig(1.0, 0, 2.0)]
    allocs = [Allocation.from_small(2.0, 2.0 * share), Allocation.from_small(1.0, share)]
    out = profile_outcome(duo_market, provs, allocs, service_mode=SEPARATE)
    assert out.revenue[0] / 2.0 == pytest.approx(out.revenue[1] / 1.0, rel=1e-12)
    assert out.revenue == pytest.approx((100.0, 50.0))


def _random_profile(rng, mode):
    params = MarketParams(rng.uniform(0.05, 0.95), rng.uniform(1, 80), rng.uniform(1, 100), rng.uniform(1, 100))
    dens = rng.uniform(1.1, 6.0)
    provs, allocs = [], []
    for _ in range(2):
        b = rng.uniform(0.2, 3.0)
        provs.append(ProviderConfig(b, 0.0, dens))
        allocs.append(Allocation.from_small(b, rng.uniform(0.05, 0.95) * b))
    return params, provs, allocs


@pytest.mark.parametrize("mode", [SEPARATE, MIXED])
def test_clearing_residual_and_revenue_identity(rng, mode):
    for _ in range(200):
        params, provs, allocs = _random_profile(rng, mode)
        out = profile_outcome(params, provs, allocs, service_mode=mode)
        a = params.alpha
        # every served tier clears its capacity
        if mode == SEPARATE:
            cap_s = sum(p.density * x.bw_small * params.r0 for p, x in zip(provs, allocs))
            cap_m = sum(x.bw_macro * params.r0 for x in allocs)
            tiers = [(cap_s, params.n_f, out.price_small[0]), (cap_m, params.n_m, out.price_macro[0])]
        else:
            cap = sum(p.density * x.bw_small * params.r0 + x.bw_macro * params.r0 for p, x in zip(provs, allocs))
            tiers = [(cap, params.n_total, out.price_macro[0])]
        util = 0.0
        for cap, mass, price in tiers:
            d = demand(price, a)
            assert abs(mass * d - cap) / cap < 1e-8
            util += mass * utility(d, a)
            assert price * d == pytest.approx((1 - a) * utility(d, a), rel=1e-9)
        assert out.total_revenue == pytest.approx((1 - a) * util, rel=1e-9)
        assert out.welfare == pytest.approx(util, rel=1e-9)
        assert sum(out.mass_macro) + sum(out.mass_small) <= params.n_total * (1 + 1e-12)


def test_investment_cost_is_subtracted(duo_market):
    prov = ProviderConfig(1.0, 0.0, 3.0)
    alloc = Allocation.from_small(1.0, 0.7)
    base = profile_outcome(duo_market, [prov], [alloc])
    net = profile_outcome(duo_market, [prov], [alloc], invest_costs=[2.0])
    assert base.revenue[0] - net.revenue[0] == pytest.approx(6.0)
    assert base.welfare - net.welfare == pytest.approx(6.0)


@settings(max_examples=50)
@given(c=st.floats(min_value=0.1, max_value=20.0), seed=st.integers(0, 10_000))
def test_scaling_bandwidth_and_users(c, seed):
    rng = np.random.default_rng(seed)
    params, provs, allocs = _random_profile(rng, SEPARATE)
    out = profile_outcome(params, provs, allocs)
    scaled_params = MarketParams(params.alpha, params.r0, params.n_m * c, params.n_f * c)
    scaled_provs = [ProviderConfig(p.total_bw * c, 0.0, p.density) for p in provs]
    scaled_allocs = [Allocation(x.bw_macro * c, x.bw_small * c) for x in allocs]
    big = profile_outcome(scaled_params, scaled_provs, scaled_allocs)
    assert big.rate_small == pytest.approx(out.rate_small, rel=1e-9)
    assert big.rate_macro == pytest.approx(out.rate_macro, rel=1e-9)
    assert big.welfare == pytest.approx(c * out.welfare, rel=1e-9)


def test_separate_mode_without_small_supply_errors(duo_market):
    prov = ProviderConfig(1.0, 0.0, 2.0)
    with pytest.raises(ValueError, match="no supply"):
        profile_outcome(duo_market, [prov], [Allocation(1.0, 0.0)], service_mode=SEPARATE)


def test_macro_tier_empty_leaves_mobile_unserved(duo_market):
    prov = ProviderConfig(1.0, 1.0, 2.0)
    out = profile_outcome(duo_market, [prov], [Allocation(0.0, 1.0)], service_mode=SEPARATE)
    assert out.price_macro == (None,)
    assert out.mass_macro == (0.0,)
    r_s = 2.0 * 1.0 * duo_market.r0 / duo_market.n_f
    assert out.welfare == pytest.approx(duo_market.n_f * utility(r_s, duo_market.alpha))
    assert not math.isnan(out.welfare)
