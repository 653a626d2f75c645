"""Social welfare under small-cell floors and in the binary investment game."""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from typing import Optional

import numpy as np

from .core import (
    MIXED,
    SEPARATE,
    Allocation,
    MarketParams,
    ProviderConfig,
    profile_outcome,
    tier_welfare,
)
from . import duopoly, investment_game
from .numerics import golden_max
from .parallel import pmap

REVENUE_MAX = "revenue_max"
WELFARE_MAX = "welfare_max"
STRATEGIES = (REVENUE_MAX, WELFARE_MAX)

SPLIT_RTOL = 1e-12


def _require_density(density: float) -> None:
    if density <= 1:
        raise ValueError(f"density must exceed 1, got {density}")


def loss_condition(params: MarketParams, totals, floors, density: float) -> bool:
    """True when the floors force more small-cell bandwidth than the free optimum uses."""
    _require_density(density)
    return params.small_share(density) * sum(totals) < sum(floors)


def ratio_bound(params: MarketParams, density: float) -> float:
    """Worst-case ratio of constrained equilibrium welfare to unconstrained optimum."""
    _require_density(density)
    return params.small_share(density) ** params.alpha


def new_band_threshold(params: MarketParams, legacy_bw, density: float) -> float:
    """Amount of small-cell-only spectrum beyond which welfare loss is unavoidable."""
    _require_density(density)
    return sum(legacy_bw) * params.n_f * params.epsilon(density) / params.n_m


def optimal_window(params: MarketParams, legacy_bw, new_bw_total: float, density: float):
    """Interval of first-provider shares of the new band that keep welfare optimal, or None."""
    if new_bw_total > new_band_threshold(params, legacy_bw, density):
        return None
    k = params.n_f * params.epsilon(density) / params.n_m
    lo = max(0.0, new_bw_total - legacy_bw[1] * k)
    hi = min(new_bw_total, legacy_bw[0] * k)
    return (lo, hi)


@dataclass(frozen=True)
class NewBandScenario:
    """Legacy (unrestricted) bandwidths plus a split of a small-cell-only band."""

    legacy_bw: tuple
    new_bw_total: float
    split: tuple

    def __post_init__(self):
        if len(self.legacy_bw) != 2 or len(self.split) != 2:
            raise ValueError("exactly two providers are supported")
        if any(b <= 0 for b in self.legacy_bw):
            raise ValueError("legacy bandwidths must be positive")
        if self.new_bw_total < 0 or any(s < 0 for s in self.split):
            raise ValueError("new-band amounts must be non-negative")
        tol = SPLIT_RTOL * max(self.new_bw_total, 1.0)
        if abs(sum(self.split) - self.new_bw_total) > tol:
            raise ValueError(
                f"split {self.split} must sum to new_bw_total={self.new_bw_total}"
            )

    @classmethod
    def from_share(cls, legacy_bw, new_bw_total: float, b1_new: float) -> "NewBandScenario":
        if not 0 <= b1_new <= new_bw_total * (1 + SPLIT_RTOL):
            raise ValueError(f"b1_new={b1_new} must lie in [0, {new_bw_total}]")
        b1_new = min(b1_new, new_bw_total)
        return cls(tuple(legacy_bw), new_bw_total, (b1_new, new_bw_total - b1_new))

    @property
    def totals(self) -> tuple:
        return tuple(o + n for o, n in zip(self.legacy_bw, self.split))

    @property
    def floors(self) -> tuple:
        return tuple(self.split)


@dataclass(frozen=True)
class WelfareComparison:
    sw_unrestricted_opt: float
    sw_restricted_opt: float
    sw_restricted_ne: float
    threshold_t: float
    optimal_window: Optional[tuple]
    region: str
    ne_report: duopoly.EquilibriumReport


def _separate_welfare(params, density, small_total, macro_total):
    r0 = params.r0
    return tier_welfare(density * small_total * r0, params.n_f, params.alpha) + tier_welfare(
        macro_total * r0, params.n_m, params.alpha
    )


def three_scenario_welfare(params: MarketParams, scenario: NewBandScenario, density: float):
    """Unrestricted optimum, restricted optimum and restricted equilibrium welfare.

    Welfare in separate service depends only on total small-cell bandwidth
    and is concave in it, so the restricted optimum puts
    ``max(free optimum, sum of floors)`` in small cells.
    """
    _require_density(density)
    totals = scenario.totals
    floors = scenario.floors
    total = sum(totals)

    free_small = params.small_share(density) * total
    sw_wo = _separate_welfare(params, density, free_small, total - free_small)
    small_opt = max(free_small, sum(floors))
    sw_opt = _separate_welfare(params, density, small_opt, total - small_opt)

    rep = duopoly.constrained_ne(params, totals[0], totals[1], floors[0], floors[1], density)
    return WelfareComparison(
        sw_unrestricted_opt=sw_wo,
        sw_restricted_opt=sw_opt,
        sw_restricted_ne=rep.outcome.welfare,
        threshold_t=new_band_threshold(params, scenario.legacy_bw, density),
        optimal_window=optimal_window(params, scenario.legacy_bw, scenario.new_bw_total, density),
        region=rep.region,
        ne_report=rep,
    )


@dataclass(frozen=True)
class SplitPoint:
    b1_new: float
    sw_unrestricted_opt: float
    sw_restricted_opt: float
    sw_restricted_ne: float
    region: str


def sweep_split(params: MarketParams, legacy_bw, new_bw_total: float, density: float, steps: int = 200):
    """Three welfare curves as the first provider's share of the new band runs over [0, B]."""
    if steps < 2:
        raise ValueError("steps must be at least 2")
    point = partial(_split_point, params, tuple(legacy_bw), new_bw_total, density)
    return pmap(point, [float(b) for b in np.linspace(0.0, new_bw_total, steps)])


def _split_point(params, legacy_bw, new_bw_total, density, b1n):
    sc = NewBandScenario.from_share(legacy_bw, new_bw_total, b1n)
    cmp = three_scenario_welfare(params, sc, density)
    return SplitPoint(b1n, cmp.sw_unrestricted_opt, cmp.sw_restricted_opt,
                      cmp.sw_restricted_ne, cmp.region)


def one_investor_mode(params: MarketParams, B: float, density0: float, bw_small: float) -> str:
    """Separate service iff the lone investor's small-cell rate reaches the macro rate."""
    r_s = density0 * bw_small / params.n_f
    r_m = (2 * B - bw_small) / params.n_m
    return SEPARATE if r_s >= r_m else MIXED


def one_investor_welfare(params: MarketParams, B: float, density0: float, bw_small: float,
                         invest_cost: float = 0.0, service_mode: Optional[str] = None) -> float:
    """Welfare when only provider 1 invests and puts ``bw_small`` into small cells."""
    if service_mode is None:
        service_mode = one_investor_mode(params, B, density0, bw_small)
    providers = [ProviderConfig(B, 0.0, density0), ProviderConfig(B, 0.0, 0.0)]
    allocs = [Allocation.from_small(B, bw_small), Allocation(B, 0.0)]
    out = profile_outcome(params, providers, allocs, [invest_cost, invest_cost], service_mode)
    return out.welfare


@dataclass(frozen=True)
class GameWelfare:
    sw: dict  # profile -> social welfare
    investor_small_bw: float
    strategy: str


def welfare_max_investor_split(params: MarketParams, B: float, density0: float) -> float:
    """Lone investor's small-cell bandwidth maximizing welfare, by golden-section search."""
    x, _ = golden_max(lambda x: one_investor_welfare(params, B, density0, x), 0.0, B, 1e-10 * B)
    return x


def binary_game_welfare(params: MarketParams, B: float, density0: float, invest_cost: float,
                        strategy: str = REVENUE_MAX) -> GameWelfare:
    """Social welfare of each investment profile when providers follow ``strategy``.

    Both-invest and none-invest allocations do not depend on the strategy.
    With one investor, revenue maximizers use the first-order split and
    welfare maximizers the welfare-maximizing split.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")
    if density0 <= 1:
        raise ValueError(f"density0 must exceed 1, got {density0}")

    shared = investment_game.both_invest_allocation(params, B, density0)
    inv = ProviderConfig(B, 0.0, density0)
    sw_both = profile_outcome(params, [inv, inv], [shared, shared], [invest_cost] * 2, SEPARATE).welfare
    none = ProviderConfig(B, 0.0, 0.0)
    macro = Allocation(B, 0.0)
    sw_none = profile_outcome(params, [none, none], [macro, macro], None, MIXED).welfare

    if strategy == REVENUE_MAX:
        split = investment_game.one_investor_split(params, B, density0)
        x = split.alloc.bw_small
        sw_one = one_investor_welfare(params, B, density0, x, invest_cost, split.service_mode)
    else:
        x = welfare_max_investor_split(params, B, density0)
        sw_one = one_investor_welfare(params, B, density0, x, invest_cost)

    return GameWelfare({"II": sw_both, "IN": sw_one, "NI": sw_one, "NN": sw_none}, x, strategy)
