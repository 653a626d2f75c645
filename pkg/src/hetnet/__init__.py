"""Pricing, bandwidth partition and small-cell investment in a two-tier wireless market."""

from .core import (
    MIXED,
    SEPARATE,
    Allocation,
    MarketOutcome,
    MarketParams,
    ProviderConfig,
    SolverError,
    demand,
    market_clearing_price,
    net_payoff,
    profile_outcome,
    utility,
)
from .duopoly import EquilibriumReport, constrained_ne, region_map, unconstrained_ne
from .investment_game import solve_binary_game, sweep_regions
from .monopoly import (
    allocation_given_density,
    constrained_allocation,
    no_invest_threshold,
    optimal_investment,
)
from .welfare import NewBandScenario, binary_game_welfare, sweep_split, three_scenario_welfare

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "EquilibriumReport",
    "MIXED",
    "MarketOutcome",
    "MarketParams",
    "NewBandScenario",
    "ProviderConfig",
    "SEPARATE",
    "SolverError",
    "allocation_given_density",
    "binary_game_welfare",
    "constrained_allocation",
    "constrained_ne",
    "demand",
    "market_clearing_price",
    "net_payoff",
    "no_invest_threshold",
    "optimal_investment",
    "profile_outcome",
    "region_map",
    "solve_binary_game",
    "sweep_regions",
    "sweep_split",
    "three_scenario_welfare",
    "unconstrained_ne",
    "utility",
]
