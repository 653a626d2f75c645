"""Command-line front end: one subcommand per experiment, scenario YAML in, CSV out.

Exit status is 0 on success, 1 when a solver reports a diagnostic failure
and 2 when the scenario or flags fail validation.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from . import duopoly, investment_game, monopoly, oracle, welfare
from .core import SolverError
from .scenario import ScenarioError, load_scenario

EXIT_OK = 0
EXIT_SOLVER = 1
EXIT_VALIDATION = 2

FLOAT_FMT = ".12g"


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), FLOAT_FMT)
    return str(v)


def _write_csv(path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    Path(path).write_text(buf.getvalue())


def _fmt(v) -> str:
    return _cell(v) if v is not None else "n/a"


def parse_cost_sweep(text: str):
    """``start:stop:step`` into an inclusive list of costs."""
    try:
        a, b, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise ScenarioError(f"--sweep-cost: expected start:stop:step, got {text!r}") from None
    if step <= 0 or b < a or a < 0:
        raise ScenarioError(f"--sweep-cost: need 0 <= start <= stop and step > 0, got {text!r}")
    n = int(np.floor((b - a) / step + 1e-9)) + 1
    return [a + k * step for k in range(n)]


def _out_path(args, scenario):
    return args.out or scenario.output.path


def _symmetric_bw(scenario) -> float:
    provs = scenario.provider_configs(1)
    bws = {p.total_bw for p in scenario.provider_configs(len(scenario.providers))}
    if len(bws) > 1:
        raise ScenarioError("providers: the investment game needs equal total_bw for both providers")
    return provs[0].total_bw


def _lambda0(scenario) -> float:
    inv = scenario.require_investment()
    if inv.lambda0 is None:
        raise ScenarioError("investment.lambda0: required for this command")
    return inv.lambda0


# --- subcommands -----------------------------------------------------------

def cmd_monopoly_alloc(args, scenario):
    params = scenario.market_params()
    (prov,) = scenario.provider_configs(1)
    i_s = scenario.investment.i_s if scenario.investment else 0.0
    rows = []
    for obj in monopoly.OBJECTIVES:
        if prov.density > 1:
            sol = monopoly.constrained_allocation(params, prov.total_bw, prov.small_floor, prov.density, obj)
        else:
            if prov.small_floor > 0:
                raise ScenarioError("providers[0].small_floor: a floor needs density > 1")
            sol = monopoly.allocation_given_density(params, prov.total_bw, prov.density, i_s, obj)
        rows.append([obj, sol.density, sol.alloc.bw_macro, sol.alloc.bw_small, sol.prices[0],
                     sol.prices[1], sol.objective_value, sol.service_structure, sol.binding_floor])
    for r in rows:
        print(f"{r[0]:>8}: bw_macro={_fmt(r[2])} bw_small={_fmt(r[3])} p_M={_fmt(r[4])} "
              f"p_S={_fmt(r[5])} value={_fmt(r[6])} [{r[7]}{', floor binds' if r[8] else ''}]")
    return ["objective", "density", "bw_macro", "bw_small", "price_macro", "price_small",
            "objective_value", "service_structure", "binding_floor"], rows


def cmd_monopoly_invest(args, scenario):
    params = scenario.market_params()
    (prov,) = scenario.provider_configs(1)
    if args.sweep_cost:
        costs = parse_cost_sweep(args.sweep_cost)
    else:
        costs = [scenario.investment.i_s if scenario.investment else 0.0]
    alpha0, thr = monopoly.no_invest_threshold(params, prov.total_bw, args.density_cap)
    rows = []
    for c in costs:
        rev = monopoly.optimal_investment(params, prov.total_bw, c, monopoly.REVENUE, args.density_cap)
        sw = monopoly.optimal_investment(params, prov.total_bw, c, monopoly.WELFARE, args.density_cap)
        rows.append([c, rev.density_opt, rev.objective_value, sw.density_opt, sw.objective_value])
    print(f"alpha0={_fmt(alpha0)}  revenue no-invest threshold I_S >= {_fmt(thr)}  "
          f"welfare threshold I_S >= {_fmt(thr / (1 - params.alpha))}")
    if len(rows) == 1:
        c, dr, r, dw, w = rows[0]
        print(f"I_S={_fmt(c)}: revenue-max density={_fmt(dr)} (revenue {_fmt(r)}), "
              f"welfare-max density={_fmt(dw)} (welfare {_fmt(w)})")
    else:
        zero = next((r[0] for r in rows if r[1] == 0), None)
        print(f"{len(rows)} costs; revenue-max density first hits 0 at I_S={_fmt(zero)}")
    return ["i_s", "density_rev", "revenue", "density_sw", "welfare"], rows


def _duopoly_inputs(scenario):
    params = scenario.market_params()
    p1, p2 = scenario.provider_configs(2)
    if p1.density != p2.density:
        raise ScenarioError("providers: both providers must use the same density")
    return params, p1, p2


def cmd_duopoly_ne(args, scenario):
    params, p1, p2 = _duopoly_inputs(scenario)
    rep = duopoly.constrained_ne(params, p1.total_bw, p2.total_bw, p1.small_floor, p2.small_floor, p1.density)
    rows = []
    for i, (prov, a) in enumerate(zip((p1, p2), rep.allocs)):
        rows.append([i + 1, prov.total_bw, prov.small_floor, a.bw_macro, a.bw_small,
                     rep.kkt_residuals[i], rep.outcome.revenue[i], rep.region])
    print(f"region {rep.region}; total small-cell bandwidth {_fmt(rep.total_small_bw)} "
          f"(unconstrained {_fmt(sum(rep.unconstrained_small_bw))})")
    for r in rows:
        print(f"  provider {r[0]}: bw_small={_fmt(r[4])} bw_macro={_fmt(r[3])} D={_fmt(r[5])} revenue={_fmt(r[6])}")
    print(f"  prices: p_M={_fmt(rep.prices[0])} p_S={_fmt(rep.prices[1])}; welfare={_fmt(rep.outcome.welfare)}")
    return ["provider", "total_bw", "floor", "bw_macro", "bw_small", "kkt_residual", "revenue", "region"], rows


def cmd_region_map(args, scenario):
    params, p1, p2 = _duopoly_inputs(scenario)
    if args.grid < 2:
        raise ScenarioError("--grid: need at least 2 points per axis")
    rmap = duopoly.region_map(params, p1.total_bw, p2.total_bw, p1.density, args.grid)
    rows = [list(r) for r in rmap.rows()]
    counts = {}
    for r in rows:
        counts[r[2]] = counts.get(r[2], 0) + 1
    print(f"{args.grid}x{args.grid} floor grid: " + ", ".join(f"{k}={counts[k]}" for k in sorted(counts)))
    return ["floor1", "floor2", "region_label"], rows


def cmd_invest_game(args, scenario):
    params = scenario.market_params()
    B = _symmetric_bw(scenario)
    lam0 = _lambda0(scenario)
    costs = parse_cost_sweep(args.sweep_cost) if args.sweep_cost else [scenario.investment.i_s]
    rows = []
    for c in costs:
        game, eq = investment_game.solve_binary_game(params, B, lam0, c)
        ne = "|".join(sorted(eq.pure_ne))
        rows.append([c, game.payoffs["II"][0], game.payoffs["NN"][0], game.payoffs["IN"][0],
                     game.payoffs["IN"][1], ne])
    if len(costs) > 1:
        bounds = investment_game.boundary_costs(params, B, lam0, costs[0], costs[-1])
        print("boundary costs: " + ", ".join(_fmt(b) for b in bounds))
        labels = []
        for r in rows:
            lab = investment_game.label_for(frozenset(r[5].split("|")) if r[5] else frozenset())
            if not labels or labels[-1][0] != lab:
                labels.append([lab, r[0], r[0]])
            labels[-1][2] = r[0]
        for lab, lo, hi in labels:
            print(f"  {lab}: I_S in [{_fmt(lo)}, {_fmt(hi)}]")
    else:
        print(f"I_S={_fmt(costs[0])}: pure NE = {{{rows[0][5]}}}")
    return ["i_s", "s_both", "s_none", "s_investor", "s_bystander", "ne_set"], rows


def cmd_welfare_newband(args, scenario):
    params = scenario.market_params()
    nb = scenario.require_new_band()
    legacy = (nb.b1_legacy, nb.b2_legacy)
    if nb.split is not None:
        sc = welfare.NewBandScenario(legacy, nb.b_new, tuple(nb.split))
        cmp = welfare.three_scenario_welfare(params, sc, nb.density)
        pts = [welfare.SplitPoint(sc.split[0], cmp.sw_unrestricted_opt, cmp.sw_restricted_opt,
                                  cmp.sw_restricted_ne, cmp.region)]
    else:
        pts = welfare.sweep_split(params, legacy, nb.b_new, nb.density, nb.sweep or 200)
    t = welfare.new_band_threshold(params, legacy, nb.density)
    win = welfare.optimal_window(params, legacy, nb.b_new, nb.density)
    print(f"threshold T={_fmt(t)}; new band B={_fmt(nb.b_new)}; optimal window for b1n: "
          + (f"[{_fmt(win[0])}, {_fmt(win[1])}]" if win else "none (B > T)"))
    gap = max(p.sw_unrestricted_opt - p.sw_restricted_ne for p in pts)
    print(f"{len(pts)} split(s); largest equilibrium welfare gap {_fmt(gap)}")
    rows = [[p.b1_new, p.sw_unrestricted_opt, p.sw_restricted_opt, p.sw_restricted_ne] for p in pts]
    return ["b1n", "sw_wo", "sw_w_opt", "sw_w_ne"], rows


def cmd_welfare_game(args, scenario):
    params = scenario.market_params()
    B = _symmetric_bw(scenario)
    lam0 = _lambda0(scenario)
    costs = parse_cost_sweep(args.sweep_cost) if args.sweep_cost else [scenario.investment.i_s]
    rows = []
    x = None
    for c in costs:
        g = welfare.binary_game_welfare(params, B, lam0, c, args.strategy)
        x = g.investor_small_bw
        rows.extend([c, prof, g.sw[prof]] for prof in investment_game.PROFILES)
    print(f"strategy {args.strategy}: lone investor puts {_fmt(x)} of {_fmt(B)} in small cells")
    if len(costs) == 1:
        print("  " + ", ".join(f"{r[1]}={_fmt(r[2])}" for r in rows))
    return ["i_s", "profile", "sw"], rows


def cmd_verify(args, scenario):
    params = scenario.market_params()
    checks = []

    def record(name, value, tol, ok):
        checks.append([name, value, tol, bool(ok)])

    provs = scenario.provider_configs(len(scenario.providers)) if scenario.providers else []
    if provs and provs[0].density > 1:
        p = provs[0]
        step = (p.total_bw - p.small_floor) / (args.grid - 1)
        for obj in monopoly.OBJECTIVES:
            sol = monopoly.constrained_allocation(params, p.total_bw, p.small_floor, p.density, obj)
            g = oracle.grid_argmax_monopoly(params, p.total_bw, p.small_floor, p.density, obj, args.grid)
            err = abs(g - sol.alloc.bw_small)
            record(f"monopoly_split_{obj}", err, step, err <= step * (1 + 1e-9))
    if provs:
        p = provs[0]
        i_s = scenario.investment.i_s if scenario.investment else 0.0
        if i_s > 0:
            for obj in monopoly.OBJECTIVES:
                sol = monopoly.optimal_investment(params, p.total_bw, i_s, obj)
                hi = max(4.0 * sol.density_opt, 50.0)
                lam, _, step = oracle.grid_argmax_density(params, p.total_bw, i_s, obj, hi, args.grid)
                err = abs(lam - sol.density_opt)
                record(f"investment_density_{obj}", err, step, err <= step * (1 + 1e-9))
    if len(provs) == 2 and provs[0].density == provs[1].density and provs[0].density > 1:
        p1, p2 = provs
        rep = duopoly.constrained_ne(params, p1.total_bw, p2.total_bw, p1.small_floor, p2.small_floor, p1.density)
        totals = (p1.total_bw, p2.total_bw)
        worst_kkt = max(abs(d) if np.isfinite(d) else 0.0 for d in rep.kkt_residuals)
        record("duopoly_kkt", worst_kkt, duopoly.KKT_TOL, duopoly.kkt_satisfied(rep, totals))
        ok, gain = oracle.no_deviation_check(params, totals, rep.allocs, rep.floors, p1.density)
        record("duopoly_no_deviation", gain, oracle.DEVIATION_RTOL, ok)
    inv = scenario.investment
    if inv is not None and inv.lambda0 is not None and provs:
        B = _symmetric_bw(scenario)
        split = investment_game.one_investor_split(params, B, inv.lambda0)
        if split.service_mode == "separate":
            g = oracle.grid_argmax_one_investor(params, B, inv.lambda0, args.grid)
            step = B / (args.grid - 1)
            err = abs(g - split.alloc.bw_small)
            record("one_investor_split", err, step, err <= step * (1 + 1e-9))
    if not checks:
        raise ScenarioError("scenario has nothing to verify: add providers or an investment section")
    for name, value, tol, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {_fmt(value)} (tolerance {_fmt(tol)})")
    failed = [c[0] for c in checks if not c[3]]
    if failed:
        args._failed = failed
    return ["check", "value", "tolerance", "passed"], checks


# --- argument parsing ------------------------------------------------------

_COMMANDS = {
    "monopoly-alloc": (
        cmd_monopoly_alloc,
        "Monopoly bandwidth split and prices for providers[0].",
        "objective,density,bw_macro,bw_small,price_macro,price_small,objective_value,"
        "service_structure,binding_floor (one row per objective; empty price = tier not offered)",
    ),
    "monopoly-invest": (
        cmd_monopoly_invest,
        "Revenue- and welfare-optimal small-cell density for providers[0].",
        "i_s,density_rev,revenue,density_sw,welfare",
    ),
    "duopoly-ne": (
        cmd_duopoly_ne,
        "Constrained two-provider equilibrium and its region label.",
        "provider,total_bw,floor,bw_macro,bw_small,kkt_residual,revenue,region",
    ),
    "region-map": (
        cmd_region_map,
        "Equilibrium region labels over a grid of floors on [0,B1]x[0,B2].",
        "floor1,floor2,region_label",
    ),
    "invest-game": (
        cmd_invest_game,
        "Binary investment game payoffs and pure equilibria over deployment costs.",
        "i_s,s_both,s_none,s_investor,s_bystander,ne_set (ne_set joins profiles with '|')",
    ),
    "welfare-newband": (
        cmd_welfare_newband,
        "Three welfare benchmarks as the small-cell-only band is split.",
        "b1n,sw_wo,sw_w_opt,sw_w_ne",
    ),
    "welfare-game": (
        cmd_welfare_game,
        "Social welfare of every investment profile.",
        "i_s,profile,sw (four rows per cost: II, IN, NI, NN)",
    ),
    "verify": (
        cmd_verify,
        "Compare solver output with brute-force oracles on this scenario.",
        "check,value,tolerance,passed",
    ),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetnet",
        description="Pricing, bandwidth and investment solvers for a two-tier wireless market.",
        epilog="Exit status: 0 success, 1 solver diagnostic, 2 validation error. "
               "HETNET_THREADS caps worker processes for sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text, schema) in _COMMANDS.items():
        sp = sub.add_parser(
            name, help=help_text, description=help_text,
            epilog=f"CSV columns: {schema}. Floats use 12 significant digits.",
        )
        sp.add_argument("scenario", help="scenario YAML file")
        sp.add_argument("--out", help="write CSV here (default: output.path from the scenario, if set)")
        if name in ("monopoly-invest", "invest-game", "welfare-game"):
            sp.add_argument("--sweep-cost", metavar="START:STOP:STEP",
                            help="sweep the per-unit deployment cost I_S over an inclusive grid")
        if name == "monopoly-invest":
            sp.add_argument("--density-cap", type=float, default=monopoly.DEFAULT_DENSITY_CAP,
                            help="largest density searched (default %(default)g)")
        if name == "region-map":
            sp.add_argument("--grid", type=int, default=21, help="points per floor axis (default %(default)s)")
        if name == "welfare-game":
            sp.add_argument("--strategy", choices=welfare.STRATEGIES, default=welfare.REVENUE_MAX)
        if name == "verify":
            sp.add_argument("--grid", type=int, default=oracle.DEFAULT_GRID,
                            help="oracle grid points (default %(default)s)")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = _COMMANDS[args.command][0]
    try:
        scenario = load_scenario(args.scenario)
        header, rows = handler(args, scenario)
        out = _out_path(args, scenario)
        if out:
            _write_csv(out, header, rows)
    except SolverError as exc:
        print(f"error: solver failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if getattr(args, "_failed", None):
        print(f"error: oracle checks failed: {', '.join(args._failed)}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
