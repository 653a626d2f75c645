"""Binary small-cell investment game between two symmetric providers.

Each provider either deploys small cells at a fixed density ``density0`` or
does not.  Payoffs are the revenues induced by the bandwidth and price
equilibria of the later stages, net of ``density0 * invest_cost`` for
investors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .core import MIXED, SEPARATE, Allocation, MarketParams, SolverError
from .numerics import bracketed_root
from .parallel import pmap

INVEST = "I"
NOT_INVEST = "N"
PROFILES = ("II", "IN", "NI", "NN")

BOTH_INVEST = "both_invest"
ONE_INVESTS = "one_invests"
NONE_INVEST = "none_invest"
MULTIPLE = "multiple"
NO_PURE_NE = "no_pure_ne"

DEVIATION_SLACK = 1e-9


def _require_density(density0: float) -> None:
    if density0 <= 1:
        raise ValueError(f"density0 must exceed 1, got {density0}")


@dataclass(frozen=True)
class OneInvestorSplit:
    alloc: Allocation
    service_mode: str
    interior_root: float  # first-order root before clipping to B; nan in the mixed branch


@dataclass(frozen=True)
class BinaryGame:
    payoffs: dict  # profile -> (S1, S2)
    profile_details: dict  # profile -> (Allocation, Allocation, service_mode)
    invest_density: float
    invest_cost: float


@dataclass(frozen=True)
class GameEquilibria:
    pure_ne: frozenset
    region_label: str


def payoff_both_invest(params: MarketParams, B: float, density0: float, invest_cost: float):
    """Revenues when both invest: ``2**-a (B R0)**(1-a) (eps0 N_f + N_m)**a - density0 I_S``."""
    _require_density(density0)
    a = params.alpha
    eps0 = params.epsilon(density0)
    s = 2.0 ** -a * (B * params.r0) ** (1 - a) * (eps0 * params.n_f + params.n_m) ** a
    s -= density0 * invest_cost
    return s, s


def both_invest_allocation(params: MarketParams, B: float, density0: float) -> Allocation:
    return Allocation.from_small(B, params.small_share(density0) * B)


def payoff_none_invest(params: MarketParams, B: float):
    """Revenues when neither invests: both split the pooled macro market evenly."""
    a = params.alpha
    s = 2.0 ** -a * (B * params.r0) ** (1 - a) * params.n_total ** a
    return s, s


def one_investor_split(params: MarketParams, B: float, density0: float) -> OneInvestorSplit:
    """Revenue-maximizing split of the lone investor.

    With ``N_f > density0 * N_m`` the investor solves its first-order
    condition (macro marginal revenue, including the price effect on the
    rival's macro tier, equals small-cell marginal revenue) and clips the root
    to ``B``.  Otherwise it puts all bandwidth in small cells.
    """
    _require_density(density0)
    a, r0, nm, nf = params.alpha, params.r0, params.n_m, params.n_f
    if nf <= density0 * nm:
        return OneInvestorSplit(Allocation(0.0, B), MIXED, float("nan"))

    def foc(x):
        r_m = (2 * B - x) * r0 / nm
        lhs = r_m ** -a + a * B * r0 / ((1 - a) * nm) * r_m ** (-a - 1)
        return lhs - density0 * (density0 * x * r0 / nf) ** -a

    eps_x = 1e-9 * B
    lo, hi = eps_x, 2 * B - eps_x
    if not foc(lo) < 0 < foc(hi):
        raise SolverError(f"one-investor first-order condition not bracketed on [{lo}, {hi}]")
    root = bracketed_root(foc, lo, hi)
    return OneInvestorSplit(Allocation.from_small(B, min(root, B)), SEPARATE, root)


def investor_revenue(params: MarketParams, B: float, density0: float, bw_small, service_mode: str):
    """Gross revenues (investor, bystander) for a given investor split; vectorized over ``bw_small``."""
    a, r0 = params.alpha, params.r0
    x = np.asarray(bw_small, dtype=float)
    bm = B - x
    if service_mode == SEPARATE:
        r_s = density0 * x * r0 / params.n_f
        r_m = (B + bm) * r0 / params.n_m
        small = np.where(x > 0, density0 * x * r0 * np.power(np.where(x > 0, r_s, 1.0), -a), 0.0)
        inv = small + bm * r0 * np.power(r_m, -a)
        by = B * r0 * np.power(r_m, -a)
    else:
        r = (B + bm + density0 * x) * r0 / params.n_total
        inv = (bm + density0 * x) * r0 * np.power(r, -a)
        by = B * r0 * np.power(r, -a)
    if inv.ndim == 0:
        return float(inv), float(by)
    return inv, by


def payoff_one_invests(params: MarketParams, B: float, density0: float, invest_cost: float):
    """``(S_investor, S_bystander, investor_alloc)`` when exactly one provider invests."""
    split = one_investor_split(params, B, density0)
    inv, by = investor_revenue(params, B, density0, split.alloc.bw_small, split.service_mode)
    return inv - density0 * invest_cost, by, split.alloc


def _pure_equilibria(payoffs) -> frozenset:
    s_b1, _ = payoffs["II"]
    s_inv, s_by = payoffs["IN"]
    s_n1, _ = payoffs["NN"]
    ne = set()
    # symmetric game: each check covers both providers
    if s_b1 - s_by >= -DEVIATION_SLACK:
        ne.add("II")
    if s_n1 - s_inv >= -DEVIATION_SLACK:
        ne.add("NN")
    if s_inv - s_n1 >= -DEVIATION_SLACK and s_by - s_b1 >= -DEVIATION_SLACK:
        ne.update(("IN", "NI"))
    return frozenset(ne)


def deviation_gains(payoffs, profile: str):
    """Gain each provider would get by switching its own action in ``profile``."""
    flip = {INVEST: NOT_INVEST, NOT_INVEST: INVEST}
    gains = []
    for k in (0, 1):
        dev = list(profile)
        dev[k] = flip[dev[k]]
        gains.append(payoffs["".join(dev)][k] - payoffs[profile][k])
    return tuple(gains)


def label_for(ne: frozenset) -> str:
    if ne == {"II"}:
        return BOTH_INVEST
    if ne == {"IN", "NI"}:
        return ONE_INVESTS
    if ne == {"NN"}:
        return NONE_INVEST
    return MULTIPLE if ne else NO_PURE_NE


def solve_binary_game(params: MarketParams, B: float, density0: float, invest_cost: float):
    """Payoff matrix and pure Nash equilibria of the invest / not-invest game."""
    both = payoff_both_invest(params, B, density0, invest_cost)
    none = payoff_none_invest(params, B)
    split = one_investor_split(params, B, density0)
    inv_alloc = split.alloc
    s_inv, s_by = investor_revenue(params, B, density0, inv_alloc.bw_small, split.service_mode)
    s_inv -= density0 * invest_cost
    payoffs = {"II": both, "IN": (s_inv, s_by), "NI": (s_by, s_inv), "NN": none}
    shared = both_invest_allocation(params, B, density0)
    macro = Allocation(B, 0.0)
    details = {
        "II": (shared, shared, SEPARATE),
        "IN": (inv_alloc, macro, split.service_mode),
        "NI": (macro, inv_alloc, split.service_mode),
        "NN": (macro, macro, MIXED),
    }
    game = BinaryGame(payoffs, details, density0, invest_cost)
    ne = _pure_equilibria(payoffs)
    for prof in ne:
        if max(deviation_gains(payoffs, prof)) > DEVIATION_SLACK:
            raise SolverError(f"profile {prof} fails its deviation check")
    return game, GameEquilibria(ne, label_for(ne))


@dataclass(frozen=True)
class SweepRow:
    invest_cost: float
    region_label: str
    pure_ne: frozenset
    payoffs: dict


@dataclass(frozen=True)
class RegionSweep:
    rows: list
    boundaries: list = field(default_factory=list)  # cost values where the NE set changes


def boundary_costs(params: MarketParams, B: float, density0: float, lo: float, hi: float):
    """Costs where investing stops being a best response, located by a bracketed root search.

    Returns ``(cost_II, cost_NN)``: above the first, a lone deviation away from
    both-invest pays; above the second, entering as the only investor no
    longer pays.  ``None`` for a crossing outside ``[lo, hi]``.
    """

    def stay_both(c):
        return payoff_both_invest(params, B, density0, c)[0] - payoff_one_invests(params, B, density0, c)[1]

    def enter_alone(c):
        return payoff_one_invests(params, B, density0, c)[0] - payoff_none_invest(params, B)[0]

    out = []
    for g in (stay_both, enter_alone):
        if np.sign(g(lo)) != np.sign(g(hi)):
            out.append(bracketed_root(g, lo, hi))
        else:
            out.append(None)
    return tuple(out)


def sweep_regions(
    params: MarketParams, B: float, density0: float, cost_range=(0.0, 40.0), steps: int = 401
) -> RegionSweep:
    """Equilibrium region along a uniform grid of deployment costs."""
    if steps < 2:
        raise ValueError("steps must be at least 2")
    lo, hi = cost_range
    row = partial(_sweep_row, params, B, density0)
    rows = pmap(row, [float(c) for c in np.linspace(lo, hi, steps)])
    bounds = [c for c in boundary_costs(params, B, density0, lo, hi) if c is not None]
    return RegionSweep(rows, sorted(bounds))


def _sweep_row(params, B, density0, c):
    game, eq = solve_binary_game(params, B, density0, c)
    return SweepRow(c, eq.region_label, eq.pure_ne, game.payoffs)


def region_segments(sweep: RegionSweep):
    """Collapse consecutive rows with equal labels into ``(label, first_cost, last_cost)``."""
    segs = []
    for row in sweep.rows:
        if segs and segs[-1][0] == row.region_label:
            segs[-1][2] = row.invest_cost
        else:
            segs.append([row.region_label, row.invest_cost, row.invest_cost])
    return [tuple(s) for s in segs]
