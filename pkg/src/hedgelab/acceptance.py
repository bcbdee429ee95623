"""Reproduction criteria, each returning a :class:`Report`.

``run_all`` drives them in order; the last criterion is the aggregate run
itself (everything passed, within the time budget).
"""

from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np

from . import classical, coinflip, seqval
from .report import Report
from .sdpsolve import dual_feasible

TOTAL_BUDGET_S = 60.0
SEED = 20160615


def _best_time(fn, repeats=20):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def c01_honest(**_):
    start = time.perf_counter()
    r = Report("criterion-01", {"title": "honest protocol"})
    ref = "honest play: uniform outcome, parties always agree"
    dist = coinflip.honest_distribution()
    r.add("Pr(Alice wins)", dist["Alice"], ref, 0.5, 1e-12)
    r.add("Pr(Bob wins)", dist["Bob"], ref, 0.5, 1e-12)
    r.add("Pr(agree)", coinflip.honest_agreement(), ref, 1.0, 1e-12)
    t = _best_time(lambda: (coinflip.honest_distribution(), coinflip.honest_agreement()))
    r.add("time_s", t, ref, ok=t < 1e-3, limit=1e-3)
    return r.finish(start)


def c02_alice(sabotage=False, **_):
    start = time.perf_counter()
    r = Report("criterion-02", {"title": "Alice cheat value"})
    expected = (2 + math.sqrt(2)) / 4 + (1e-3 if sabotage else 0.0)
    r.add("P_A", coinflip.alice_cheat_value(), "largest eigenvalue of (|0><0| + |+><+|)/2",
          expected, 1e-10)
    return r.finish(start)


def c03_bob_sdp(**_):
    start = time.perf_counter()
    r = Report("criterion-03", {"title": "Bob cheat SDP with printed dual"})
    ref = "Bob's single-flip cheating SDP and its printed dual matrix"
    t0 = time.perf_counter()
    cert = coinflip.bob_cheat_value()
    elapsed = time.perf_counter() - t0
    primal = cert.solution.primal_value
    r.add("primal", primal, ref, ok=0.8534 <= primal <= 0.8538, interval=[0.8534, 0.8538])
    r.add("dual(2 Y_printed)", cert.printed_dual, ref, 0.8535533906, 1e-9)
    r.add("gap", cert.gap, ref, ok=abs(cert.gap) <= 2e-4, limit=2e-4)
    # soundness: the printed matrix certifies outcome 0; its flipped image certifies outcome 1
    r.add("2 Y_printed feasible for outcome 0", cert.printed_feasible_outcome0, ref, ok=cert.printed_feasible_outcome0)
    r.add("outcome-0 primal within gap", cert.outcome0_value, ref, cert.printed_dual, 2e-4)
    r.add("flipped 2 Y_printed feasible for outcome 1", cert.flipped_feasible_outcome1, ref,
          ok=cert.flipped_feasible_outcome1)
    r.note("2 Y_printed feasible for outcome 1", cert.printed_feasible_outcome1, ref)
    r.add("time_s", elapsed, ref, ok=elapsed < 1.0, limit=1.0)
    return r.finish(start)


def c04_explicit(**_):
    start = time.perf_counter()
    r = Report("criterion-04", {"title": "Bob explicit rotation"})
    ref = "Bob rotates his qubit by -3pi/8 and sends the measured bit"
    v = coinflip.bob_explicit_strategy_value()
    r.add("explicit value", v, ref, coinflip.P_STAR, 1e-12)
    sdp_v = coinflip.bob_cheat_value().solution.primal_value
    r.add("|explicit - SDP|", abs(v - sdp_v), ref, 0.0, 2e-4)
    return r.finish(start)


def c05_hedge(**_):
    start = time.perf_counter()
    r = Report("criterion-05", {"title": "perfect 1-of-2 hedging"})
    ref = "Bob wins exactly one of two parallel flips with certainty"
    attack = coinflip.build_hedge_attack()
    dist = coinflip.simulate_parallel_hedge(attack)
    r.add("Pr(exactly one Bob win)", dist[(0, 1)] + dist[(1, 0)], ref, 1.0, 1e-10)
    r.add("initial-state identity residual", attack.initial_identity_residual(), ref, 0.0, 1e-12)
    r.add("U unitarity residual", attack.unitarity_residual(), ref, 0.0, 1e-12)
    t = _best_time(lambda: coinflip.simulate_parallel_hedge(coinflip.build_hedge_attack()), 5)
    r.add("time_s", t, ref, ok=t < 1e-2, limit=1e-2)
    return r.finish(start)


def c06_independent(**_):
    start = time.perf_counter()
    r = Report("criterion-06", {"title": "independent cheating baselines"})
    ref = "binomial tail with per-flip success cos^2(pi/8)"
    r.add("independent(2,1)", coinflip.independent_cheat_value(2, 1), ref, 0.97855, 1e-4)
    r.add("independent(3,2)", coinflip.independent_cheat_value(3, 2), ref, 0.94201, 1e-4)
    return r.finish(start)


def c07_par3(**_):
    start = time.perf_counter()
    r = Report("criterion-07", {"title": "2-of-3 parallel SDP"})
    ref = "Bob wins at least 2 of 3 parallel flips"
    t0 = time.perf_counter()
    sol = coinflip.parallel_cheat_value(3, 2)
    elapsed = time.perf_counter() - t0
    game = coinflip.parallel_game(3)
    W = game.objective(coinflip.at_least(3, 2))
    feasible = dual_feasible(sol.Y, W, game.layout, 1e-9, game.keep)
    r.add("primal", sol.primal_value, ref, 0.986, 2e-3)
    r.add("dual", sol.dual_value, ref, ok=feasible and 0 <= sol.dual_value - sol.primal_value + 1e-9
          and sol.dual_value - sol.primal_value <= 5e-3, limit=5e-3)
    r.add("dual certificate feasible", feasible, ref, ok=feasible)
    r.add("time_s", elapsed, ref, ok=elapsed < 60.0, limit=60.0)
    return r.finish(start)


def c08_alice_no_hedge(**_):
    start = time.perf_counter()
    r = Report("criterion-08", {"title": "Alice cannot hedge"})
    ref = "min eigenvalue of a tensor product of measurement operators"
    for n in (1, 2, 3):
        r.add(f"m_par(n={n})", coinflip.alice_hedging_bound(n), ref, coinflip.SIN2**n, 1e-9)
    return r.finish(start)


def _random_params(rng):
    q0 = float(rng.uniform())
    q1 = float(rng.uniform(1 - q0, 1))
    return seqval.GameParams(q0, q1)


def c09_oracle(**_):
    start = time.perf_counter()
    r = Report("criterion-09", {"title": "tree value equals brute-force sequential value", "seed": SEED})
    ref = "sequential value equals tree value"
    rng = np.random.default_rng(SEED)
    for n in (1, 2, 3):
        worst = 0.0
        for _ in range(100):
            t = seqval.TargetFn(n, tuple(rng.uniform(-1, 1, 2**n)))
            p = _random_params(rng)
            worst = max(worst, abs(seqval.tval(t, p)[0] - seqval.sval_bruteforce(t, p)[0]))
        r.add(f"max |tval - sval| (n={n})", worst, ref, 0.0, 1e-12)
    elapsed = time.perf_counter() - start
    r.add("time_s", elapsed, ref, ok=elapsed < 10.0, limit=10.0)
    return r.finish(start)


def _random_fraction_params(rng):
    q0 = Fraction(int(rng.integers(0, 1001)), 1000)
    lo = int((1 - q0) * 1000)
    q1 = Fraction(int(rng.integers(lo, 1001)), 1000)
    return seqval.GameParams(q0, q1)


def c10_no_sequential_hedging(**_):
    start = time.perf_counter()
    r = Report("criterion-10", {"title": "no sequential hedging (exact arithmetic)", "seed": SEED})
    ref = "1 - tval(1 - delta_a) = prod m(a_i)"
    rng = np.random.default_rng(SEED + 1)
    mismatches = 0
    checked = 0
    for _ in range(50):
        p = _random_fraction_params(rng)
        for n in (1, 2, 3):
            for bits in range(2**n):
                a = format(bits, f"0{n}b")
                value, _ = seqval.tval(seqval.one_minus_delta(a), p)
                product = seqval.m_seq(p, [int(c) for c in a], check=False)
                mismatches += (1 - value) != product
                checked += 1
    r.add("mismatches", mismatches, ref, 0, 0, cases=checked)
    return r.finish(start)


def c11_fig1(**_):
    start = time.perf_counter()
    r = Report("criterion-11", {"title": "tree node values for t = 1 - delta_011", "seed": SEED})
    ref = "node values of the tree for t = 1 - delta_011"
    rng = np.random.default_rng(SEED + 2)
    worst01 = worst0 = 0.0
    for _ in range(20):
        p = _random_params(rng)
        _, tree = seqval.tval(seqval.one_minus_delta("011"), p)
        worst01 = max(worst01, abs(tree.values["01"] - p.q0))
        worst0 = max(worst0, abs(tree.values["0"] - (p.q0 + (1 - p.q0) * p.q0)))
    r.add("max |tval(01) - q0|", worst01, ref, 0.0, 1e-12)
    r.add("max |tval(0) - (q0 + (1-q0) q0)|", worst0, ref, 0.0, 1e-12)
    return r.finish(start)


def c12_sequential_kills_hedge(**_):
    start = time.perf_counter()
    r = Report("criterion-12", {"title": "sequential play removes the 1-of-2 hedge"})
    ref = "sequential 1-of-n: playing independently is optimal"
    p = seqval.GameParams(coinflip.P_STAR, coinflip.P_STAR)
    value, _ = seqval.tval(seqval.at_least_ones(2, 1), p)
    r.add("sequential value", value, ref, coinflip.independent_cheat_value(2, 1), 1e-9)
    r.add("strictly below 1", value, ref, ok=value < 1 - 1e-3)
    return r.finish(start)


def c13_classical_game1(**_):
    start = time.perf_counter()
    r = Report("criterion-13", {"title": "classical game 1, exact enumeration"})
    ref = "game 1: sequential beats parallel for exactly-one"
    vals = classical.game1_values()
    r.add("sval", vals["sval"], ref, Fraction(3, 4), 0)
    r.add("pval", vals["pval"], ref, Fraction(1, 2), 0)
    return r.finish(start)


def c14_classical_game2(**_):
    start = time.perf_counter()
    r = Report("criterion-14", {"title": "classical game 2, enumeration vs stated formulas"})
    ref = "game 2: stated pval = 1/2 + 2p(1-p), sval = 1/2 + p/2"
    for s in ("0", "0.25", "0.5", "0.7"):
        p = Fraction(s)
        vals = classical.game2_values(p)
        claimed = classical.game2_claimed(p)
        r.add(f"pval(p={s})", vals["pval"], ref, claimed["pval"], 1e-12)
        r.add(f"sval(p={s})", vals["sval"], ref, claimed["sval"], 1e-12)
        r.note(f"pval closed form (p={s})", classical.game2_closed_form(p)["pval"],
               "1/2 + max(p, 2p(1-p))/2")
    grid = [Fraction(k, 20) for k in range(1, 15)]
    failing = []
    for p in grid:
        vals = classical.game2_values(p)
        if not vals["pval"] > vals["sval"]:
            failing.append(p)
    r.add("p in (0, 3/4) with pval <= sval", len(failing), ref, 0, 0,
          first=float(failing[0]) if failing else None, sampled=len(grid))
    return r.finish(start)


CRITERIA = [
    c01_honest, c02_alice, c03_bob_sdp, c04_explicit, c05_hedge, c06_independent, c07_par3,
    c08_alice_no_hedge, c09_oracle, c10_no_sequential_hedging, c11_fig1, c12_sequential_kills_hedge,
    c13_classical_game1, c14_classical_game2,
]


def run_all(sabotage: bool = False, on_report=None) -> list[Report]:
    start = time.perf_counter()
    reports = []
    for crit in CRITERIA:
        rep = crit(sabotage=sabotage)
        reports.append(rep)
        if on_report:
            on_report(rep)
    total = Report("criterion-15", {"title": "full reproduction run"})
    elapsed = time.perf_counter() - start
    failed = [rep.command for rep in reports if not rep.ok]
    total.add("criteria failed", len(failed), "every criterion passes", 0, 0, names=", ".join(failed))
    total.add("time_s", elapsed, "every criterion passes", ok=elapsed <= TOTAL_BUDGET_S, limit=TOTAL_BUDGET_S)
    total.finish(start)
    reports.append(total)
    if on_report:
        on_report(total)
    return reports
