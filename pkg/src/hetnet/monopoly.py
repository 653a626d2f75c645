"""Single-provider solvers: bandwidth split, pricing and small-cell investment."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    SEPARATE,
    MIXED,
    Allocation,
    MarketParams,
    ProviderConfig,
    profile_outcome,
)
from .numerics import bracketed_root, scan_roots

REVENUE = "revenue"
WELFARE = "welfare"
OBJECTIVES = (REVENUE, WELFARE)

MACRO_ONLY = "macro_only"

DEFAULT_DENSITY_CAP = 1e6
SCAN_POINTS = 512
FLOOR_SLACK = 1e-12


def _check_objective(objective: str) -> None:
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}, got {objective!r}")


@dataclass(frozen=True)
class MonopolySolution:
    alloc: Allocation
    prices: tuple  # (p_macro, p_small); None marks a tier that is not offered
    density: float
    objective_value: float
    service_structure: str
    binding_floor: bool = False
    objective: str = REVENUE


@dataclass(frozen=True)
class InvestmentSolution:
    density_opt: float
    objective_value: float
    stationary_candidates: list = field(default_factory=list)
    no_invest_threshold: float = float("nan")
    objective: str = REVENUE
    allocation: Optional[MonopolySolution] = None


def _solution(params, B, alloc, density, invest_cost, objective, mode, binding=False):
    provider = ProviderConfig(total_bw=B, density=density)
    out = profile_outcome(params, [provider], [alloc], [invest_cost], service_mode=mode)
    value = out.revenue[0] if objective == REVENUE else out.welfare
    structure = mode
    if mode == MIXED and density == 0:
        structure = MACRO_ONLY
    return MonopolySolution(
        alloc=alloc,
        prices=(out.price_macro[0], out.price_small[0]),
        density=density,
        objective_value=value,
        service_structure=structure,
        binding_floor=binding,
        objective=objective,
    )


def unconstrained_small_bw(params: MarketParams, B: float, density: float) -> float:
    """Optimal small-cell bandwidth ``N_f eps B / (N_f eps + N_m)``."""
    return params.small_share(density) * B


def constrained_allocation(
    params: MarketParams, B: float, floor: float, density: float, objective: str = REVENUE
) -> MonopolySolution:
    """Optimal split for a monopolist that must keep ``floor`` bandwidth in small cells.

    The revenue- and welfare-maximizing splits coincide; ``objective`` only
    selects which value is reported.  When the free optimum already meets the
    floor it is kept, otherwise the floor binds exactly.
    """
    _check_objective(objective)
    if density <= 1:
        raise ValueError("density must exceed 1 here; use allocation_given_density")
    if not 0 <= floor <= B:
        raise ValueError(f"floor must lie in [0, B={B}], got {floor}")
    free = unconstrained_small_bw(params, B, density)
    binding = floor > free + FLOOR_SLACK * B
    alloc = Allocation.from_small(B, floor if binding else free)
    return _solution(params, B, alloc, density, 0.0, objective, SEPARATE, binding)


def allocation_given_density(
    params: MarketParams, B: float, density: float, invest_cost: float = 0.0,
    objective: str = REVENUE,
) -> MonopolySolution:
    """Optimal split and clearing prices once the small-cell density is fixed.

    Above density 1 the provider runs separate service with the closed-form
    split; at or below 1 every unit of bandwidth goes to macro cells and the
    small tier is not offered.
    """
    _check_objective(objective)
    if density < 0:
        raise ValueError(f"density must be non-negative, got {density}")
    if density > 1:
        alloc = Allocation.from_small(B, unconstrained_small_bw(params, B, density))
        return _solution(params, B, alloc, density, invest_cost, objective, SEPARATE)
    alloc = Allocation(bw_macro=B, bw_small=0.0)
    return _solution(params, B, alloc, density, invest_cost, objective, MIXED)


def gross_value(params: MarketParams, B: float, density, objective: str = REVENUE):
    """Revenue (or welfare) before investment cost as a function of density > 1.

    ``(B R0)**(1-alpha) * (N_m + eps N_f)**alpha``, divided by ``1 - alpha``
    for welfare.  Vectorized over ``density``.
    """
    a = params.alpha
    eps = np.power(density, 1.0 / a - 1.0)
    val = (B * params.r0) ** (1.0 - a) * np.power(params.n_m + eps * params.n_f, a)
    return val / (1.0 - a) if objective == WELFARE else val


def no_invest_value(params: MarketParams, B: float, objective: str = REVENUE) -> float:
    """Value with no small cells: all users share the macro capacity."""
    return float(gross_value(params, B, 1.0, objective))


def marginal_value(params: MarketParams, B: float, density, objective: str = REVENUE):
    """Derivative of :func:`gross_value` in density (left side of the stationarity condition)."""
    a = params.alpha
    lam = np.asarray(density, dtype=float)
    val = (
        params.n_f
        * (B * params.r0) ** (1.0 - a)
        * np.power(lam, 1.0 / a - 2.0)
        * np.power(params.n_f * np.power(lam, 1.0 / a - 1.0) + params.n_m, a - 1.0)
    )
    if objective == REVENUE:
        val = (1.0 - a) * val
    return float(val) if val.ndim == 0 else val


def curvature_alpha0(params: MarketParams) -> float:
    """alpha0 solving ``(N_f + N_m)(1 - 2a) = N_f (1 - a)**2`` on (0, 1/2)."""
    nf, n = params.n_f, params.n_total
    return bracketed_root(lambda a: n * (1 - 2 * a) - nf * (1 - a) ** 2, 0.0, 0.5)


def inflection_density(params: MarketParams, density_cap: float = DEFAULT_DENSITY_CAP) -> float:
    """Density where the revenue curve switches from convex to concave (alpha < alpha0).

    Solves ``(N_f + N_m lam**(1 - 1/a))(1 - 2a) = N_f (1 - a)**2`` for lam > 1.
    """
    a, nf, nm = params.alpha, params.n_f, params.n_m

    def h(lam):
        return (nf + nm * lam ** (1.0 - 1.0 / a)) * (1 - 2 * a) - nf * (1 - a) ** 2

    return bracketed_root(h, 1.0, density_cap, rtol=1e-13)


def no_invest_threshold(params: MarketParams, B: float, density_cap: float = DEFAULT_DENSITY_CAP):
    """Deployment cost at or above which a revenue maximizer never invests.

    Returns ``(alpha0, threshold)``.  For alpha >= alpha0 revenue is concave in
    density and the threshold is the marginal value at density 1; otherwise it
    is the marginal value at the inflection density.
    """
    alpha0 = curvature_alpha0(params)
    if params.alpha >= alpha0:
        return alpha0, marginal_value(params, B, 1.0, REVENUE)
    lam0 = inflection_density(params, density_cap)
    return alpha0, marginal_value(params, B, lam0, REVENUE)


def optimal_investment(
    params: MarketParams,
    B: float,
    invest_cost: float,
    objective: str = REVENUE,
    density_cap: float = DEFAULT_DENSITY_CAP,
) -> InvestmentSolution:
    """Best small-cell density for a monopolist paying ``invest_cost`` per unit density.

    All stationary points above density 1 are located by a log-spaced sign
    scan plus bracketed refinement, then compared against not investing at all.  The
    scan top ``density_cap`` is itself a candidate when the objective is
    still rising there (e.g. zero cost).
    """
    _check_objective(objective)
    if invest_cost < 0:
        raise ValueError(f"invest_cost must be non-negative, got {invest_cost}")

    def value(lam):
        if lam == 0:
            return no_invest_value(params, B, objective)
        return float(gross_value(params, B, lam, objective)) - invest_cost * lam

    def excess(lam):
        return marginal_value(params, B, lam, objective) - invest_cost

    lo = 1.0 + 1e-9
    roots = scan_roots(excess, lo, density_cap, points=SCAN_POINTS, rtol=1e-10)
    candidates = [(0.0, value(0.0))]
    candidates += [(r, value(r)) for r in roots if r > 1.0]
    if excess(density_cap) > 0:
        candidates.append((density_cap, value(density_cap)))

    best_lam, best_val = candidates[0]
    for lam, val in candidates[1:]:
        if val > best_val:
            best_lam, best_val = lam, val

    threshold = no_invest_threshold(params, B, density_cap)[1]
    if objective == WELFARE:
        threshold = threshold / (1.0 - params.alpha)

    return InvestmentSolution(
        density_opt=best_lam,
        objective_value=best_val,
        stationary_candidates=candidates,
        no_invest_threshold=threshold,
        objective=objective,
        allocation=allocation_given_density(params, B, best_lam, invest_cost, objective),
    )
