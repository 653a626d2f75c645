"""Two-provider bandwidth game with small-cell floors.

Both providers run separate service with the same small-cell density.
Pooled per-user rates are ``R_S = density (x1 + x2) R0 / N_f`` and
``R_M = (B1 - x1 + B2 - x2) R0 / N_m`` where ``x_i`` is provider i's small-cell
bandwidth.  Each provider's revenue is concave in its own ``x_i``, so its
best response is pinned down by the sign of the marginal revenue.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from typing import Optional, Sequence

import numpy as np

from .core import (
    SEPARATE,
    Allocation,
    MarketOutcome,
    MarketParams,
    ProviderConfig,
    SolverError,
    profile_outcome,
    tier_income,
)
from .numerics import bracketed_root
from .parallel import pmap

REGION_A = "A"
REGION_B_I = "B_I"
REGION_B_II = "B_II"
REGION_C_I = "C_I"
REGION_C_II = "C_II"
REGIONS = (REGION_A, REGION_B_I, REGION_B_II, REGION_C_I, REGION_C_II)

KKT_TOL = 1e-8
FLOOR_SLACK = 1e-12
BR_DAMPING = 0.5
BR_MAX_ITER = 10_000
BR_TOL = 1e-9
CROSS_CHECK_TOL = 1e-6


@dataclass(frozen=True)
class EquilibriumReport:
    allocs: tuple
    prices: tuple  # pooled (p_macro, p_small)
    region: str
    kkt_residuals: tuple
    total_small_bw: float
    unconstrained_small_bw: tuple
    floors: tuple
    outcome: MarketOutcome


def _require_density(density: float) -> None:
    if density <= 1:
        raise ValueError(f"density must exceed 1 for separate service, got {density}")


def unconstrained_ne(params: MarketParams, B1: float, B2: float, density: float):
    """Equilibrium split without floors: each provider keeps the same small-cell share."""
    _require_density(density)
    share = params.small_share(density)
    return Allocation.from_small(B1, share * B1), Allocation.from_small(B2, share * B2)


def _marginal(params, density, own_small, own_macro, rival_small, rival_macro):
    """D_i from raw bandwidths; returns the signed infinite limit at an empty tier."""
    a, r0 = params.alpha, params.r0
    tot_s = own_small + rival_small
    tot_m = own_macro + rival_macro
    if tot_s <= 0 and tot_m <= 0:
        raise ValueError("no supply: both tiers are empty")
    if tot_s > 0:
        r_s = density * tot_s * r0 / params.n_f
        small = density * r_s ** -a * (1.0 - a * own_small / tot_s)
    else:
        small = np.inf
    if tot_m > 0:
        r_m = tot_m * r0 / params.n_m
        macro = r_m ** -a * (1.0 - a * own_macro / tot_m)
    else:
        macro = np.inf
    if np.isinf(small) and np.isinf(macro):
        raise ValueError("no supply: both tiers are empty")
    return small - macro


def marginal_revenue(params: MarketParams, allocs: Sequence[Allocation], i: int, density: float) -> float:
    """Marginal revenue of provider ``i`` per unit of small-cell bandwidth, in units of R0.

    ``lam u'(R_S) + lam**2 (B_iS R0 / N_f) u''(R_S) - u'(R_M) - (B_iM R0 / N_m) u''(R_M)``.
    Multiply by R0 to get ``dS_i/dB_iS``.  An empty macro tier gives ``-inf``
    and an empty small tier ``+inf``.
    """
    own, rival = allocs[i], allocs[1 - i]
    return _marginal(params, density, own.bw_small, own.bw_macro, rival.bw_small, rival.bw_macro)


def provider_revenue(params, density, own_small, own_total, rival_small, rival_total):
    """Separate-service revenue of one provider; vectorized over ``own_small``."""
    r0 = params.r0
    own_small = np.asarray(own_small, dtype=float)
    own_macro = own_total - own_small
    c_s = density * (own_small + rival_small) * r0
    c_m = (own_macro + rival_total - rival_small) * r0
    return tier_income(density * own_small * r0, c_s, params.n_f, params.alpha) + tier_income(
        own_macro * r0, c_m, params.n_m, params.alpha
    )


def best_response(
    params: MarketParams,
    rival_small: float,
    rival_total: float,
    own_total: float,
    own_floor: float,
    density: float,
) -> float:
    """Revenue-maximizing own small-cell bandwidth on ``[own_floor, own_total]``."""
    _require_density(density)
    rival_macro = rival_total - rival_small

    def d(x):
        return _marginal(params, density, x, own_total - x, rival_small, rival_macro)

    if d(own_floor) <= 0:
        return own_floor
    if d(own_total) >= 0:
        return own_total
    return bracketed_root(d, own_floor, own_total)


def _br_iteration(params, totals, floors, density, start=None):
    """Damped simultaneous best-response dynamics; returns small-cell bandwidths."""
    x = np.array(floors if start is None else start, dtype=float)
    tol = BR_TOL * max(totals)
    for it in range(BR_MAX_ITER):
        br = np.array(
            [
                best_response(params, x[1], totals[1], totals[0], floors[0], density),
                best_response(params, x[0], totals[0], totals[1], floors[1], density),
            ]
        )
        if np.max(np.abs(br - x)) <= tol:
            return br, it + 1
        x = x + BR_DAMPING * (br - x)
    raise SolverError(f"best-response iteration did not converge in {BR_MAX_ITER} steps")


def best_response_dynamics(params, B1, B2, floor1, floor2, density, start=None):
    """Run damped best-response dynamics from ``start`` (default: the floors)."""
    _require_density(density)
    x, iters = _br_iteration(params, (B1, B2), (floor1, floor2), density, start)
    return (Allocation.from_small(B1, x[0]), Allocation.from_small(B2, x[1])), iters


def constrained_ne(
    params: MarketParams,
    B1: float,
    B2: float,
    floor1: float,
    floor2: float,
    density: float,
    cross_check: bool = True,
) -> EquilibriumReport:
    """Unique equilibrium of the floored bandwidth game and its region label.

    The equilibrium is built by case analysis on which floors the
    unconstrained equilibrium violates: none (A), both (B) or one (C).  The
    suffix I means both providers sit at their floors, II means exactly one
    does.  With ``cross_check`` the answer is confirmed by damped
    best-response dynamics.
    """
    _require_density(density)
    totals = (B1, B2)
    floors = (floor1, floor2)
    for b, f in zip(totals, floors):
        if not 0 <= f <= b:
            raise ValueError(f"floor {f} must lie in [0, {b}]")

    free = [a.bw_small for a in unconstrained_ne(params, B1, B2, density)]
    slack = [FLOOR_SLACK * b for b in totals]
    violated = [floors[i] > free[i] + slack[i] for i in (0, 1)]

    def d_at(x, i):
        j = 1 - i
        return _marginal(params, density, x[i], totals[i] - x[i], x[j], totals[j] - x[j])

    def respond(k, rival_small):
        j = 1 - k
        return best_response(params, rival_small, totals[j], totals[k], floors[k], density)

    x = None
    region = None
    if not any(violated):
        x, region = list(free), REGION_A
    elif all(violated):
        at_floor = list(floors)
        if d_at(at_floor, 0) <= KKT_TOL and d_at(at_floor, 1) <= KKT_TOL:
            x, region = at_floor, REGION_B_I
        else:
            for k in (0, 1):
                j = 1 - k
                xk = respond(k, floors[j])
                cand = [0.0, 0.0]
                cand[k], cand[j] = xk, floors[j]
                if xk > floors[k] + slack[k] and d_at(cand, j) <= KKT_TOL:
                    x, region = cand, REGION_B_II
                    break
    else:
        j = 0 if violated[0] else 1
        k = 1 - j
        xk = respond(k, floors[j])
        cand = [0.0, 0.0]
        cand[k], cand[j] = xk, floors[j]
        if d_at(cand, j) <= KKT_TOL:
            x = cand
            region = REGION_C_I if xk <= floors[k] + slack[k] else REGION_C_II

    if x is None:
        raise SolverError(f"case analysis found no equilibrium for floors {floors}")

    if cross_check:
        y, _ = _br_iteration(params, totals, floors, density)
        if np.max(np.abs(y - np.array(x))) > CROSS_CHECK_TOL * max(totals):
            raise SolverError(
                f"case analysis {x} disagrees with best-response dynamics {y.tolist()}"
            )

    allocs = (Allocation.from_small(B1, x[0]), Allocation.from_small(B2, x[1]))
    providers = [ProviderConfig(B1, floor1, density), ProviderConfig(B2, floor2, density)]
    outcome = profile_outcome(params, providers, allocs, service_mode=SEPARATE)
    p_m = next((p for p in outcome.price_macro if p is not None), None)
    p_s = next((p for p in outcome.price_small if p is not None), None)
    return EquilibriumReport(
        allocs=allocs,
        prices=(p_m, p_s),
        region=region,
        kkt_residuals=(d_at(x, 0), d_at(x, 1)),
        total_small_bw=x[0] + x[1],
        unconstrained_small_bw=tuple(free),
        floors=floors,
        outcome=outcome,
    )


def kkt_satisfied(report: EquilibriumReport, totals, tol: float = KKT_TOL) -> bool:
    """Per-provider KKT sign conditions for the reported equilibrium."""
    for a, d, f, b in zip(report.allocs, report.kkt_residuals, report.floors, totals):
        slack = FLOOR_SLACK * b
        at_floor = a.bw_small <= f + slack
        at_top = a.bw_small >= b - slack
        if at_floor and at_top:
            continue
        if at_floor:
            if d > tol:
                return False
        elif at_top:
            if d < -tol:
                return False
        elif abs(d) > tol:
            return False
    return True


@dataclass(frozen=True)
class RegionMap:
    floor1: np.ndarray
    floor2: np.ndarray
    labels: list  # labels[i][j] for (floor1[i], floor2[j])

    def rows(self):
        for i, f1 in enumerate(self.floor1):
            for j, f2 in enumerate(self.floor2):
                yield float(f1), float(f2), self.labels[i][j]


def region_map(
    params: MarketParams,
    B1: float,
    B2: float,
    density: float,
    floor_grid: int = 21,
    cross_check: bool = False,
    reports: Optional[list] = None,
) -> RegionMap:
    """Region label of the constrained equilibrium over a floor grid on [0,B1] x [0,B2].

    Pass a list as ``reports`` to collect every :class:`EquilibriumReport`.
    """
    if floor_grid < 2:
        raise ValueError("floor_grid needs at least 2 points per axis")
    f1s = np.linspace(0.0, B1, floor_grid)
    f2s = np.linspace(0.0, B2, floor_grid)
    cell = partial(_region_cell, params, B1, B2, density, cross_check)
    flat = pmap(cell, [(float(f1), float(f2)) for f1 in f1s for f2 in f2s])
    if reports is not None:
        reports.extend(flat)
    n = len(f2s)
    labels = [[rep.region for rep in flat[i * n:(i + 1) * n]] for i in range(len(f1s))]
    return RegionMap(f1s, f2s, labels)


def _region_cell(params, B1, B2, density, cross_check, floors):
    return constrained_ne(params, B1, B2, floors[0], floors[1], density, cross_check)
