"""Brute-force checks that share nothing with the solvers but the core model.

Grid searches evaluate the market accounting of :mod:`hetnet.core` directly
over every candidate split; no closed form or first-order condition is used.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .core import Allocation, MarketParams, tier_income, tier_welfare

DEFAULT_GRID = 100_000
DEVIATION_RTOL = 1e-6


def _check_points(grid_points: int) -> None:
    if grid_points < 100:
        raise ValueError("grid_points must be at least 100")


def monopoly_objective(params: MarketParams, B: float, density: float, bw_small, objective: str):
    """Separate-service revenue or welfare of a monopolist for each candidate ``bw_small``."""
    x = np.asarray(bw_small, dtype=float)
    c_s = density * x * params.r0
    c_m = (B - x) * params.r0
    if objective == "revenue":
        return tier_income(c_s, c_s, params.n_f, params.alpha) + tier_income(
            c_m, c_m, params.n_m, params.alpha
        )
    return tier_welfare(c_s, params.n_f, params.alpha) + tier_welfare(c_m, params.n_m, params.alpha)


def grid_argmax(fn: Callable, lo: float, hi: float, grid_points: int = DEFAULT_GRID):
    """Best point of a vectorized ``fn`` on a uniform grid; returns ``(x, fn(x), step)``."""
    _check_points(grid_points)
    grid = np.linspace(lo, hi, grid_points)
    vals = np.asarray(fn(grid))
    k = int(np.argmax(vals))
    step = (hi - lo) / (grid_points - 1) if hi > lo else 0.0
    return float(grid[k]), float(vals[k]), step


def grid_argmax_monopoly(params: MarketParams, B: float, floor: float, density: float,
                         objective: str = "revenue", grid_points: int = DEFAULT_GRID) -> float:
    """Small-cell bandwidth maximizing the monopolist's objective over a grid on [floor, B]."""
    x, _, _ = grid_argmax(
        lambda g: monopoly_objective(params, B, density, g, objective), floor, B, grid_points
    )
    return x


def density_objective(params: MarketParams, B: float, density, invest_cost: float, objective: str):
    """Net objective at each candidate density > 1 with the fixed-proportion split.

    The split share comes from the core model; the value itself is summed
    tier by tier from the clearing accounting.
    """
    lam = np.asarray(density, dtype=float)
    eps = lam ** (1.0 / params.alpha - 1.0)
    x = B * params.n_f * eps / (params.n_f * eps + params.n_m)
    return monopoly_objective(params, B, lam, x, objective) - invest_cost * lam


def grid_argmax_density(params: MarketParams, B: float, invest_cost: float, objective: str,
                        hi: float, grid_points: int = DEFAULT_GRID):
    """Best density over {0} and a uniform grid on (1, hi]; returns ``(density, value, step)``."""
    lam, val, step = grid_argmax(
        lambda g: density_objective(params, B, g, invest_cost, objective), 1.0, hi, grid_points
    )
    base = params.r0 * B
    none = float(tier_welfare(base, params.n_total, params.alpha))
    if objective == "revenue":
        none = float(tier_income(base, base, params.n_total, params.alpha))
    if lam <= 1.0 or none >= val:
        return 0.0, none, step
    return lam, val, step


def one_investor_revenue(params: MarketParams, B: float, density0: float, bw_small):
    """Separate-service revenue of the lone investor against a macro-only rival."""
    x = np.asarray(bw_small, dtype=float)
    r0 = params.r0
    c_s = density0 * x * r0
    return tier_income(c_s, c_s, params.n_f, params.alpha) + tier_income(
        (B - x) * r0, (2 * B - x) * r0, params.n_m, params.alpha
    )


def grid_argmax_one_investor(params: MarketParams, B: float, density0: float,
                             grid_points: int = DEFAULT_GRID):
    """Lone investor's revenue-maximizing small-cell bandwidth on a grid over [0, B]."""
    x, _, _ = grid_argmax(lambda g: one_investor_revenue(params, B, density0, g), 0.0, B, grid_points)
    return x


def _duopoly_revenue(params, density, own_small, own_total, rival_small, rival_total):
    r0 = params.r0
    own_small = np.asarray(own_small, dtype=float)
    c_s = density * (own_small + rival_small) * r0
    c_m = (own_total - own_small + rival_total - rival_small) * r0
    return tier_income(density * own_small * r0, c_s, params.n_f, params.alpha) + tier_income(
        (own_total - own_small) * r0, c_m, params.n_m, params.alpha
    )


def no_deviation_check(
    params: MarketParams,
    totals: Sequence[float],
    allocs: Sequence[Allocation],
    floors: Sequence[float],
    density: float,
    grid_points: int = 2000,
    rtol: float = DEVIATION_RTOL,
):
    """Scan unilateral small-cell deviations of each provider on [floor_i, B_i].

    Returns ``(holds, worst_gain)`` with ``worst_gain`` the largest revenue
    improvement relative to the provider's current revenue.
    """
    _check_points(grid_points)
    worst = -np.inf
    for i in (0, 1):
        j = 1 - i
        own_total, rival_total = totals[i], totals[j]
        rival_small = allocs[j].bw_small
        current = float(_duopoly_revenue(params, density, allocs[i].bw_small, own_total,
                                         rival_small, rival_total))
        grid = np.linspace(floors[i], own_total, grid_points)
        vals = _duopoly_revenue(params, density, grid, own_total, rival_small, rival_total)
        gain = (float(np.max(vals)) - current) / max(abs(current), 1e-300)
        worst = max(worst, gain)
    return worst <= rtol, worst


def central_difference(fn: Callable[[float], float], x: float, h: float) -> float:
    return (fn(x + h) - fn(x - h)) / (2.0 * h)


def fd_derivative_check(fn: Callable[[float], float], x: float, analytic: float, h: float = 1e-6) -> float:
    """Relative error between a central difference of ``fn`` at ``x`` and ``analytic``."""
    if h <= 0:
        raise ValueError("h must be positive")
    approx = central_difference(fn, x, h)
    scale = max(abs(analytic), abs(approx), 1e-300)
    return abs(approx - analytic) / scale
