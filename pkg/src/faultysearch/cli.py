"""Command-line interface.

    faultysearch eval --geometric 2 --p 0.5 --d 3
    faultysearch eval --optimal-monotone --p 0.5 --sup
    faultysearch optimize --p 0.5 --t 1 [--heuristic]
    faultysearch lower-bound --p 0.5 --ell 40
    faultysearch simulate --geometric 2 --p 0.5 --d 3 --trials 1000000 --seed 42
    faultysearch figures --out figures

Exit codes: 0 success, 2 bad arguments, 3 domain or numerical failure,
4 figures written with some empty cells.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from .errors import FaultySearchError
from .figures import FIGURES, p_grid, write_figures
from .monotone import lower_bound_threshold, optimal_base, optimal_monotone_cr
from .montecarlo import SimConfig, simulate_detection_time
from .submonotone import SubMonotoneParams, heuristic_t1, heuristic_t2, solve_optimal
from .trajectory import GeometricMonotone, SubMonotone, competitive_ratio_at, competitive_ratio_sup

EXIT_USAGE, EXIT_DOMAIN, EXIT_PARTIAL = 2, 3, 4


class UsageError(Exception):
    pass


def _prob(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError(f"p must lie in (0, 1), got {text}")
    return v


def _placement(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not (math.isfinite(v) and v >= 1):
        raise argparse.ArgumentTypeError(f"d must be >= 1, got {text}")
    return v


def _base(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not (math.isfinite(v) and v > 1):
        raise argparse.ArgumentTypeError(f"geometric base must exceed 1, got {text}")
    return v


def _int_at_least(lo):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be at least {lo}, got {v}")
        return v
    return conv


def _positive(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _keyvals(text):
    out = {}
    for part in text.split(","):
        if "=" not in part:
            raise UsageError(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_submonotone(text):
    """'t=1,beta=2,gammas=1.45' -> SubMonotoneParams."""
    kv = _keyvals(text)
    unknown = set(kv) - {"t", "beta", "gammas"}
    if unknown or "beta" not in kv:
        raise UsageError(f"--submonotone needs t=,beta=,gammas=; got {text!r}")
    try:
        beta = float(kv["beta"])
        gammas = tuple(float(g) for g in kv.get("gammas", "").split(":") if g)
        t = int(kv.get("t", len(gammas)))
        return SubMonotoneParams(t, beta, gammas)
    except (ValueError, FaultySearchError) as exc:
        raise UsageError(f"bad --submonotone {text!r}: {exc}")


def parse_optimize(text):
    kv = _keyvals(text)
    if set(kv) != {"t"}:
        raise UsageError(f"--optimize expects t=<t>, got {text!r}")
    try:
        return int(kv["t"])
    except ValueError:
        raise UsageError(f"bad t in --optimize {text!r}")


def build_strategy(args):
    if args.geometric is not None:
        return GeometricMonotone(args.geometric), {"kind": "geometric", "b": args.geometric}
    if args.optimal_monotone:
        b = optimal_base(args.p)
        return GeometricMonotone(b), {"kind": "optimal-monotone", "b": b}
    if args.submonotone is not None:
        params = parse_submonotone(args.submonotone)
        return SubMonotone(params), {"kind": "submonotone", "t": params.t,
                                     "beta": float(params.beta),
                                     "gammas": [float(g) for g in params.gammas]}
    t = parse_optimize(args.optimize)
    sol = solve_optimal(args.p, t)
    return SubMonotone(sol.params), {"kind": "optimized", "t": t, "R": sol.R, "beta": sol.beta}


def _emit(args, record, text):
    if args.json:
        print(json.dumps(record, sort_keys=True))
    else:
        print(text)


def _info(args, msg):
    if not args.quiet:
        print(msg, file=sys.stderr)


def cmd_eval(args):
    s, desc = build_strategy(args)
    if args.sup:
        tol = args.tol if args.tol is not None else 1e-9
        rep = competitive_ratio_sup(s, args.p, tol=tol)
        rec = {"strategy": desc, "p": args.p, "sup": rep.value, "d": rep.d,
               "round": rep.round, "interval": rep.interval, "rounds_used": rep.rounds_used}
        _emit(args, rec, f"{rep.value:.6f}" if args.quiet else
              f"sup={rep.value:.6f} d={rep.d:.6g} round={rep.round} interval={rep.interval}")
        return 0
    cr = competitive_ratio_at(s, args.p, args.d)
    rec = {"strategy": desc, "p": args.p, "d": args.d,
           "expected_time": cr.expected_time, "ratio": cr.ratio}
    text = f"expected_time={cr.expected_time:.6f} ratio={cr.ratio:.6f}"
    if args.mc:
        sim = simulate_detection_time(s, args.p, args.d, SimConfig(args.mc, args.seed))
        z = (sim.mean - cr.expected_time) / sim.std_error if sim.std_error > 0 else 0.0
        rec["mc"] = {"mean": sim.mean, "std_error": sim.std_error, "trials": sim.trials, "z": z}
        text += f" mc_mean={sim.mean:.6f} mc_se={sim.std_error:.6f} z={z:.2f}"
    _emit(args, rec, text)
    return 0


def cmd_optimize(args):
    if args.heuristic:
        fn = {1: heuristic_t1, 2: heuristic_t2}.get(args.t)
        if fn is None:
            raise UsageError("--heuristic is available for t=1 and t=2 only")
        h = fn(args.p)
        R, params, report = float(h.R), h.params, h.report
        extra = {"heuristic": True}
    else:
        kw = {} if args.tol is None else {"tol": args.tol}
        sol = solve_optimal(args.p, args.t, **kw)
        R, params, report = sol.R, sol.params, sol.report
        extra = {"heuristic": False, "digits": sol.digits,
                 "rejected_roots": [list(r) for r in sol.rejected]}
    gam = [float(g) for g in params.gammas]
    rec = {"p": args.p, "t": params.t, "R": R, "beta": float(params.beta), "gammas": gam,
           "per_interval": list(report.per_interval), "overall": report.overall,
           "feasible": report.feasible, "margin1": report.margin1,
           "margin2": report.margin2, "residual": report.residual13, **extra}
    lines = [f"R={R:.6f} beta={float(params.beta):.6f}"
             + "".join(f" gamma{j}={g:.6f}" for j, g in enumerate(gam, 1))]
    if not args.quiet:
        lines.append("per_interval=" + ",".join(f"{v:.6f}" for v in report.per_interval))
        lines.append(f"margin1={report.margin1:.6g} margin2={report.margin2:.6g} "
                     f"residual={report.residual13:.3g} feasible={report.feasible}")
    _emit(args, rec, "\n".join(lines))
    return 0


def cmd_lower_bound(args):
    tol = args.tol if args.tol is not None else 1e-4
    c = lower_bound_threshold(args.p, args.ell, tol=tol)
    target = optimal_monotone_cr(args.p)
    rec = {"p": args.p, "ell": args.ell, "threshold": c, "target": target, "gap": c - target}
    _emit(args, rec, f"threshold={c:.6f} target={target:.6f} gap={c - target:.6f}")
    return 0


def cmd_simulate(args):
    s, desc = build_strategy(args)
    sim = simulate_detection_time(s, args.p, args.d,
                                  SimConfig(args.trials, args.seed, args.max_crossings))
    rec = {"strategy": desc, "p": args.p, "d": args.d, "seed": args.seed,
           "mean": sim.mean, "std_error": sim.std_error, "trials": sim.trials,
           "mean_crossings": sim.mean_crossings}
    _emit(args, rec, f"mean={sim.mean:.6f} std_error={sim.std_error:.6f} trials={sim.trials} "
                     f"mean_crossings={sim.mean_crossings:.4f}")
    return 0


def cmd_figures(args):
    for f in args.fig or ():
        if f not in FIGURES:
            raise UsageError(f"unknown figure {f!r}; choose from {', '.join(FIGURES)}")
    grid = p_grid(args.p_min, args.p_max, args.p_step)
    if not grid or grid[0] <= 0 or grid[-1] >= 1:
        raise UsageError("p-grid must lie strictly inside (0, 1)")
    paths, failures = write_figures(args.out, args.fig, grid)
    rec = {"files": paths, "failures": len(failures)}
    if args.json:
        _emit(args, rec, "")
    elif not args.quiet:
        print("\n".join(paths))
    if failures:
        for fig_id, p, col, why in failures[:10]:
            _info(args, f"{fig_id} p={p} {col}: {why}")
        print(f"warning: {len(failures)} empty cells", file=sys.stderr)
        return EXIT_PARTIAL
    return 0


def _global_flags(suppress):
    par = argparse.ArgumentParser(add_help=False)
    dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    par.add_argument("--json", action="store_true", default=dflt(False),
                     help="machine-readable output")
    par.add_argument("--tol", type=_positive, default=dflt(None),
                     help="tolerance of the underlying solver")
    par.add_argument("--quiet", action="store_true", default=dflt(False),
                     help="print only the essential result")
    return par


def _strategy_flags(sub):
    g = sub.add_mutually_exclusive_group(required=True)
    g.add_argument("--geometric", type=_base, metavar="B", help="monotone, x_i = B^i")
    g.add_argument("--optimal-monotone", action="store_true", help="geometric with the optimal base")
    g.add_argument("--submonotone", metavar="PARAMS", help="t=<t>,beta=<b>,gammas=<g1:...:gt>")
    g.add_argument("--optimize", metavar="t=T", help="solve for the best t-sub-monotone strategy")


def make_parser():
    common = _global_flags(suppress=True)
    ap = argparse.ArgumentParser(prog="faultysearch", parents=[_global_flags(suppress=False)],
                                 description="p-faulty search on the half-line")
    sp = ap.add_subparsers(dest="cmd", required=True)

    e = sp.add_parser("eval", parents=[common], help="expected time and ratio of a strategy")
    _strategy_flags(e)
    e.add_argument("--p", type=_prob, required=True)
    where = e.add_mutually_exclusive_group(required=True)
    where.add_argument("--d", type=_placement, help="treasure distance")
    where.add_argument("--sup", action="store_true", help="worst case over all d >= 1")
    e.add_argument("--mc", type=_int_at_least(1), metavar="TRIALS", help="Monte Carlo cross-check")
    e.add_argument("--seed", type=_int_at_least(0), default=0)
    e.set_defaults(func=cmd_eval)

    o = sp.add_parser("optimize", parents=[common], help="best t-sub-monotone strategy")
    o.add_argument("--p", type=_prob, required=True)
    o.add_argument("--t", type=_int_at_least(0), required=True)
    o.add_argument("--heuristic", action="store_true", help="closed form with beta = 1/(1-p)")
    o.set_defaults(func=cmd_optimize)

    lb = sp.add_parser("lower-bound", parents=[common], help="numeric monotone lower bound")
    lb.add_argument("--p", type=_prob, required=True)
    lb.add_argument("--ell", type=_int_at_least(2), required=True)
    lb.set_defaults(func=cmd_lower_bound)

    s = sp.add_parser("simulate", parents=[common], help="Monte Carlo detection time")
    _strategy_flags(s)
    s.add_argument("--p", type=_prob, required=True)
    s.add_argument("--d", type=_placement, required=True)
    s.add_argument("--trials", type=_int_at_least(1), default=100_000)
    s.add_argument("--seed", type=_int_at_least(0), default=0)
    s.add_argument("--max-crossings", type=_int_at_least(1), default=None)
    s.set_defaults(func=cmd_simulate)

    f = sp.add_parser("figures", parents=[common], help="write figure data as CSV")
    f.add_argument("--out", default="figures")
    f.add_argument("--fig", action="append", help="figure id, repeatable (default: all)")
    f.add_argument("--p-min", type=_prob, default=0.01)
    f.add_argument("--p-max", type=_prob, default=0.99)
    f.add_argument("--p-step", type=_positive, default=0.005)
    f.set_defaults(func=cmd_figures)
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"faultysearch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FaultySearchError as exc:
        print(f"faultysearch: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
