"""Demand system, market clearing, and revenue/welfare accounting.

Everything here is a pure function of its inputs.  Scalar helpers accept
numpy arrays as well so the brute-force oracles can evaluate whole grids
at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

ALPHA_MARGIN = 1e-6
ALLOC_RTOL = 1e-9

SEPARATE = "separate"
MIXED = "mixed"
SERVICE_MODES = (SEPARATE, MIXED)


class SolverError(RuntimeError):
    """A solver failed in a way that should not happen for valid inputs."""


@dataclass(frozen=True)
class MarketParams:
    """Market environment shared by all providers.

    Attributes:
        alpha: curvature of the alpha-fair utility, in (0, 1).
        r0: spectral efficiency (rate per unit bandwidth).
        n_m: density of mobile users (macro-cell only).
        n_f: density of fixed users (macro- or small-cell).
    """

    alpha: float
    r0: float
    n_m: float
    n_f: float

    def __post_init__(self):
        if not (ALPHA_MARGIN <= self.alpha <= 1.0 - ALPHA_MARGIN):
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        for name in ("r0", "n_m", "n_f"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def n_total(self) -> float:
        return self.n_m + self.n_f

    def epsilon(self, density: float) -> float:
        """Small-cell weight ``density ** (1/alpha - 1)`` that drives every split."""
        return density ** (1.0 / self.alpha - 1.0)

    def small_share(self, density: float) -> float:
        """Fraction of bandwidth placed in small cells at the unconstrained optimum."""
        w = self.n_f * self.epsilon(density)
        return w / (w + self.n_m)


@dataclass(frozen=True)
class ProviderConfig:
    total_bw: float
    small_floor: float = 0.0
    density: float = 0.0

    def __post_init__(self):
        if not self.total_bw > 0:
            raise ValueError(f"total_bw must be positive, got {self.total_bw}")
        if not 0 <= self.small_floor <= self.total_bw:
            raise ValueError(
                f"small_floor must lie in [0, total_bw={self.total_bw}], got {self.small_floor}"
            )
        if self.density < 0:
            raise ValueError(f"density must be non-negative, got {self.density}")


@dataclass(frozen=True)
class Allocation:
    """A provider's macro/small bandwidth split."""

    bw_macro: float
    bw_small: float

    def __post_init__(self):
        if self.bw_macro < 0 or self.bw_small < 0:
            raise ValueError(f"bandwidths must be non-negative, got {self}")

    @property
    def total(self) -> float:
        return self.bw_macro + self.bw_small

    def macro_capacity(self, r0: float) -> float:
        return self.bw_macro * r0

    def small_capacity(self, density: float, r0: float) -> float:
        return density * self.bw_small * r0

    def check_within(self, total_bw: float) -> None:
        if self.total > total_bw * (1.0 + ALLOC_RTOL):
            raise ValueError(f"allocation {self} exceeds total bandwidth {total_bw}")

    @classmethod
    def from_small(cls, total_bw: float, bw_small: float) -> "Allocation":
        bw_small = min(max(bw_small, 0.0), total_bw)
        return cls(bw_macro=total_bw - bw_small, bw_small=bw_small)


@dataclass(frozen=True)
class MarketOutcome:
    """Prices, rates, served masses and money flows for a full profile.

    Per-provider fields are tuples indexed like the provider list.  A price
    of ``None`` means the provider does not offer that tier (zero capacity).
    """

    price_macro: tuple
    price_small: tuple
    rate_macro: float
    rate_small: float
    mass_macro: tuple
    mass_small: tuple
    revenue: tuple
    welfare: float
    service_mode: str

    @property
    def total_revenue(self) -> float:
        return float(sum(self.revenue))


def utility(r, alpha):
    """Alpha-fair utility ``r**(1-alpha) / (1-alpha)``."""
    return np.power(r, 1.0 - alpha) / (1.0 - alpha)


def marginal_utility(r, alpha):
    return np.power(r, -alpha)


def utility_second_derivative(r, alpha):
    return -alpha * np.power(r, -alpha - 1.0)


def demand(p, alpha):
    """Rate a user requests at unit price ``p``."""
    if np.any(np.asarray(p) <= 0):
        raise ValueError("price must be positive")
    return np.power(1.0 / np.asarray(p, dtype=float), 1.0 / alpha)


def net_payoff(p, alpha):
    """Best achievable ``u(r) - p r`` for a user facing price ``p``."""
    if np.any(np.asarray(p) <= 0):
        raise ValueError("price must be positive")
    return alpha / (1.0 - alpha) * np.power(p, 1.0 - 1.0 / alpha)


def market_clearing_price(capacity, user_mass, alpha):
    """Price at which ``user_mass * demand(price)`` equals ``capacity``."""
    capacity = np.asarray(capacity, dtype=float)
    if np.any(np.asarray(user_mass) <= 0):
        raise ValueError("user_mass must be positive")
    if np.any(capacity <= 0):
        raise ValueError("no supply: capacity must be positive")
    out = np.power(capacity / user_mass, -alpha)
    return float(out) if out.ndim == 0 else out


def tier_income(own_capacity, tier_capacity, user_mass, alpha):
    """Money one provider collects in a cleared tier: own capacity times the tier price.

    Returns 0 where the tier is empty, which is the limit of
    ``C * (C/K)**-alpha`` as ``C -> 0``.
    """
    own = np.asarray(own_capacity, dtype=float)
    tot = np.asarray(tier_capacity, dtype=float)
    safe = np.where(tot > 0, tot, 1.0)
    out = np.where(tot > 0, own * np.power(safe / user_mass, -alpha), 0.0)
    return float(out) if out.ndim == 0 else out


def tier_welfare(tier_capacity, user_mass, alpha):
    """Aggregate utility of ``user_mass`` users sharing ``tier_capacity`` equally."""
    tot = np.asarray(tier_capacity, dtype=float)
    out = user_mass * utility(np.maximum(tot, 0.0) / user_mass, alpha)
    return float(out) if np.ndim(out) == 0 else out


def pooled_capacities(params: MarketParams, providers, allocs):
    """Aggregate macro and small capacities over all providers."""
    c_macro = sum(a.macro_capacity(params.r0) for a in allocs)
    c_small = sum(a.small_capacity(p.density, params.r0) for p, a in zip(providers, allocs))
    return c_macro, c_small


def profile_outcome(
    params: MarketParams,
    providers: Sequence[ProviderConfig],
    allocs: Sequence[Allocation],
    invest_costs: Optional[Sequence[float]] = None,
    service_mode: str = SEPARATE,
) -> MarketOutcome:
    """Clear every tier of a bandwidth profile and do the accounting.

    In separate service mobile users share the pooled macro capacity and
    fixed users share the pooled small-cell capacity.  In mixed service all
    users share the total capacity at one common rate.  Revenue is net of
    ``density * invest_cost`` per provider, and so is welfare.

    A macro tier with no capacity leaves mobile users unserved (zero rate,
    zero utility). Fixed users assigned to an empty small tier in separate
    mode is an inconsistent profile and raises.
    """
    if service_mode not in SERVICE_MODES:
        raise ValueError(f"service_mode must be one of {SERVICE_MODES}, got {service_mode!r}")
    if len(providers) != len(allocs):
        raise ValueError("providers and allocs must have the same length")
    if invest_costs is None:
        invest_costs = [0.0] * len(providers)
    for p, a in zip(providers, allocs):
        a.check_within(p.total_bw)

    alpha, r0 = params.alpha, params.r0
    cm = [a.macro_capacity(r0) for a in allocs]
    cs = [a.small_capacity(p.density, r0) for p, a in zip(providers, allocs)]
    c_macro, c_small = sum(cm), sum(cs)
    costs = [p.density * c for p, c in zip(providers, invest_costs)]

    if service_mode == SEPARATE:
        if c_small <= 0:
            raise ValueError("no supply: fixed users are assigned to small cells with zero capacity")
        rate_m = c_macro / params.n_m
        rate_s = c_small / params.n_f
        p_m = market_clearing_price(c_macro, params.n_m, alpha) if c_macro > 0 else None
        p_s = market_clearing_price(c_small, params.n_f, alpha)
        mass_m = tuple(params.n_m * c / c_macro if c_macro > 0 else 0.0 for c in cm)
        mass_s = tuple(params.n_f * c / c_small for c in cs)
        gross = [
            tier_income(m, c_macro, params.n_m, alpha) + tier_income(s, c_small, params.n_f, alpha)
            for m, s in zip(cm, cs)
        ]
        welfare = tier_welfare(c_macro, params.n_m, alpha) + tier_welfare(c_small, params.n_f, alpha)
    else:
        c_tot = c_macro + c_small
        if c_tot <= 0:
            raise ValueError("no supply: total capacity is zero")
        rate_m = rate_s = c_tot / params.n_total
        p_m = p_s = market_clearing_price(c_tot, params.n_total, alpha)
        mass_m = tuple(params.n_total * c / c_tot for c in cm)
        mass_s = tuple(params.n_total * c / c_tot for c in cs)
        gross = [tier_income(m + s, c_tot, params.n_total, alpha) for m, s in zip(cm, cs)]
        welfare = tier_welfare(c_tot, params.n_total, alpha)

    return MarketOutcome(
        price_macro=tuple(p_m if c > 0 else None for c in cm),
        price_small=tuple(p_s if c > 0 else None for c in cs),
        rate_macro=rate_m,
        rate_small=rate_s,
        mass_macro=mass_m,
        mass_small=mass_s,
        revenue=tuple(g - k for g, k in zip(gross, costs)),
        welfare=welfare - sum(costs),
        service_mode=service_mode,
    )
