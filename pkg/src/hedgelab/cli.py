"""hedgelab command line.

Exit codes: 0 success, 1 a checked quantity is out of tolerance, 2 usage
error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import acceptance, classical, coinflip, seqval
from .report import Report
from .sdpsolve import dual_feasible, solve_primal

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

# (mode, n, k) -> (expected, tolerance, reference)
KNOWN = {
    ("parallel", 1, 1): (coinflip.P_STAR, 1e-4, "single-flip cheating value cos^2(pi/8)"),
    ("parallel", 2, 1): (1.0, 1e-6, "perfect hedging: at least 1 of 2 with certainty"),
    ("parallel", 3, 2): (0.986, 2e-3, "at least 2 of 3 in parallel, numerically ~0.986"),
    ("independent", 2, 1): (0.97855, 1e-4, "independent cheating, at least 1 of 2 (~0.978)"),
    ("independent", 3, 2): (0.94201, 1e-4, "independent cheating, at least 2 of 3 (~0.94)"),
}


class UsageError(Exception):
    pass


def seed() -> int:
    return int(os.environ.get("HEDGELAB_SEED", "0"))


def cmd_coinflip(args) -> Report:
    start = time.perf_counter()
    n, k, mode = args.games, args.wins, args.mode
    if not 1 <= k <= n:
        raise UsageError("need 1 <= wins <= games")
    if mode == "parallel" and n > coinflip.MAX_PARALLEL:
        raise UsageError(f"parallel mode supports at most {coinflip.MAX_PARALLEL} games")
    r = Report("coinflip", {"games": n, "wins": k, "mode": mode})
    ref = f"Bob wins at least {k} of {n} flips ({mode})"
    known = KNOWN.get((mode, n, k))
    if mode == "parallel":
        sol = coinflip.parallel_cheat_value(n, k)
        value = sol.primal_value
        game = coinflip.parallel_game(n)
        feasible = dual_feasible(sol.Y, game.objective(coinflip.at_least(n, k)), game.layout, 1e-9, game.keep)
        r.add("dual", sol.dual_value, "dual certificate upper bound", ok=sol.converged and feasible)
        r.add("gap", sol.gap, "dual certificate gap", ok=sol.gap <= 5e-3)
        r.note("iterations", sol.iterations)
    elif mode == "independent":
        value = coinflip.independent_cheat_value(n, k)
    else:
        p = seqval.GameParams(coinflip.P_STAR, coinflip.P_STAR)
        value, _ = seqval.tval(seqval.at_least_ones(n, k), p)
        r.add("independent baseline", coinflip.independent_cheat_value(n, k),
              "sequential play gains nothing over independent cheating", value, 1e-9)
    if known:
        r.add("value", value, known[2], known[0], known[1])
    else:
        r.note("value", value, ref)
    return r.finish(start)


def cmd_tval(args) -> Report:
    start = time.perf_counter()
    try:
        target = seqval.TargetFn.load(args.target)
    except OSError as e:
        raise IOError(str(e)) from e
    except (ValueError, json.JSONDecodeError) as e:
        raise UsageError(f"malformed target file: {e}") from e
    try:
        p = seqval.GameParams(args.q0, args.q1)
    except ValueError as e:
        raise UsageError(str(e)) from e
    r = Report("tval", {"q0": args.q0, "q1": args.q1, "target": str(args.target), "n": target.n})
    value, tree = seqval.tval(target, p)
    r.note("value", value, "tree value by backward induction")
    if args.tree:
        r.note("tree", {node: {"label": tree.labels.get(node), "value": v} for node, v in tree.values.items()},
               "node values and S0/S1 choices")
    if args.oracle:
        if target.n > seqval.MAX_BRUTEFORCE:
            raise UsageError(f"--oracle supports n <= {seqval.MAX_BRUTEFORCE}")
        brute, _ = seqval.sval_bruteforce(target, p)
        r.add("oracle gap", abs(brute - value), "brute-force black-box enumeration", 0.0, 1e-12)
    r.finish(start)
    if args.tree and not args.json:
        print(tree.render())
    return r


def cmd_certify(args) -> Report:
    start = time.perf_counter()
    r = Report("certify", {"instance": args.instance})
    if args.instance == "bob1":
        cert = coinflip.bob_cheat_value(objective_scale=1.0 + args.perturb)
        ref = "printed dual matrix bounds Bob's single-flip value"
        r.add("primal", cert.solution.primal_value, ref)
        r.add("dual", cert.printed_dual, ref, coinflip.P_STAR, 1e-9)
        r.add("gap", cert.gap, ref, ok=abs(cert.gap) <= 2e-4 and cert.solution.converged)
        r.add("outcome-0 primal", cert.outcome0_value, ref, cert.printed_dual, 2e-4)
        r.add("printed Y feasible (outcome 0)", cert.printed_feasible_outcome0, ref, ok=cert.printed_feasible_outcome0)
        r.add("flipped Y feasible (outcome 1)", cert.flipped_feasible_outcome1, ref, ok=cert.flipped_feasible_outcome1)
        r.note("printed Y feasible (outcome 1)", cert.printed_feasible_outcome1, ref)
    else:
        game = coinflip.parallel_game(3)
        W = game.objective(coinflip.at_least(3, 2)) * (1.0 + args.perturb)
        sol = solve_primal(game.sdp(W))
        feasible = dual_feasible(sol.Y, W, game.layout, 1e-9, game.keep)
        ref = "at least 2 of 3 parallel flips"
        r.add("primal", sol.primal_value, ref, 0.986, 2e-3)
        r.add("dual", sol.dual_value, ref, ok=feasible)
        r.add("gap", sol.gap, ref, ok=0 <= sol.gap + 1e-9 and sol.gap <= 5e-3)
    return r.finish(start)


def _parse_p(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"invalid --p {text!r}") from e


def cmd_classical(args) -> Report:
    start = time.perf_counter()
    if args.game == 1:
        game = classical.ClassicalGame1()
        r = Report("classical", {"game": 1})
        vals = classical.values(game)
        ref = "game 1, win exactly one of two"
        r.add("sval", vals["sval"], ref, Fraction(3, 4), 0)
        r.add("pval", vals["pval"], ref, Fraction(1, 2), 0)
    else:
        if args.p is None:
            raise UsageError("--game 2 requires --p")
        p = _parse_p(args.p)
        if not 0 <= p < 1:
            raise UsageError("--p must lie in [0, 1)")
        game = classical.ClassicalGame2(p)
        r = Report("classical", {"game": 2, "p": args.p})
        vals = classical.values(game)
        claimed = classical.game2_claimed(p)
        ref = "game 2, win exactly one of two"
        r.add("sval", vals["sval"], ref, claimed["sval"], 1e-12)
        r.add("pval", vals["pval"], ref + ": stated 1/2 + 2p(1-p)", claimed["pval"], 1e-12)
        r.add("pval closed form", vals["pval"], ref + ": 1/2 + max(p, 2p(1-p))/2",
              classical.game2_closed_form(p)["pval"], 1e-12)
    direction = "sval > pval" if vals["sval"] > vals["pval"] else "pval > sval" if vals["pval"] > vals["sval"] else "equal"
    r.note("separation", direction)
    r.finish(start)
    if args.table and not args.json:
        for setting in ("parallel", "sequential"):
            print(f"{setting} strategies:")
            for strat, v in classical.enumerate_strategy_values(game, setting):
                print(f"  {float(v):.10g}  {strat}")
    return r


def cmd_reproduce(args) -> Report:
    start = time.perf_counter()
    out = Path(args.out) if args.out else None
    if out:
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise IOError(str(e)) from e

    def emit(rep):
        if out:
            try:
                (out / f"{rep.command}.json").write_text(rep.to_json(indent=2))
            except OSError as e:
                raise IOError(str(e)) from e
        if not args.json:
            mark = "PASS" if rep.ok else "FAIL"
            print(f"[{mark}] {rep.command}: {rep.inputs.get('title', '')} ({rep.wall_time_ms} ms)")

    reports = acceptance.run_all(sabotage=args.sabotage, on_report=emit)
    r = Report("reproduce", {"out": args.out, "seed": seed()})
    for rep in reports:
        r.add(rep.command, rep.status, rep.inputs.get("title", ""), ok=rep.ok)
    return r.finish(start)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hedgelab", description="Quantum coin-flip hedging checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coinflip", help="Bob's value for winning k of n flips")
    p.add_argument("--games", type=int, required=True)
    p.add_argument("--wins", type=int, required=True)
    p.add_argument("--mode", choices=["parallel", "sequential", "independent"], default="parallel")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_coinflip)

    p = sub.add_parser("tval", help="tree value of a target function")
    p.add_argument("--q0", type=float, required=True)
    p.add_argument("--q1", type=float, required=True)
    p.add_argument("--target", required=True, help='JSON file {"n": int, "t": [...], "order": "first-game-msb"}')
    p.add_argument("--tree", action="store_true", help="include node values and choices")
    p.add_argument("--oracle", action="store_true", help="compare with brute-force enumeration")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_tval)

    p = sub.add_parser("certify", help="solve an SDP instance and check its dual certificate")
    p.add_argument("--instance", choices=["bob1", "par3"], required=True)
    p.add_argument("--perturb", type=float, default=0.0, help=argparse.SUPPRESS)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("classical", help="classical sequential vs parallel games")
    p.add_argument("--game", type=int, choices=[1, 2], required=True)
    p.add_argument("--p")
    p.add_argument("--table", action="store_true", help="print every deterministic strategy")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_classical)

    p = sub.add_parser("reproduce", help="run every reproduction criterion")
    p.add_argument("--out", help="directory for one JSON report per criterion")
    p.add_argument("--sabotage", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except UsageError as e:
        print(f"hedgelab: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"hedgelab: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    if args.json:
        print(report.to_json(indent=2))
    else:
        print(report.table())
    return EXIT_OK if report.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
