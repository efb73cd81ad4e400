"""Acceptance suite: one test per shipped guarantee, one pass line each.

Each criterion states its tolerance and, where relevant, its runtime
budget.  Oracles are computed independently inside this module: exact
rational arithmetic for the code tails, finite differences for the
derivative, plug-back evaluation for the rate threshold, exhaustive scans
for the payload optimum, and a dense constrained grid search for the
two-node solver comparison.
"""

from __future__ import annotations

import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from eecap import (
    ChannelParams,
    EnergyParams,
    Node,
    PhyConfig,
    SolverConfig,
    TimingParams,
    VARIANT_EE,
    VARIANT_LOGEE,
    VARIANT_LOGTHR,
    build_network,
    eecap,
    evaluate,
)
from eecap.access import linear_coeffs, state_probs
from eecap.cli import main
from eecap.costs import cost_model
from eecap.metrics import (
    aggregate_terms,
    nt_opt_for_throughput,
    tau_min_for_rate,
    throughput,
    throughput_derivative_tau,
)
from eecap.network import frame_success
from eecap.phy import SegmentProbs, _binomial_tail

PHY = PhyConfig()
GRID = list(PHY.nt_grid())

SOLVE_SCN = "scenarios/two_node_1m.ini"
FIXED_SCN = "scenarios/two_node_1m_fixed.ini"
NODES_SCN = "scenarios/nodes_sweep.ini"
DIST_SCN = "scenarios/distance_sweep.ini"


def random_metric_setup(rng: random.Random):
    """Random access vector, cost model and segment probabilities."""
    n = rng.randrange(1, 6)
    tau = [rng.uniform(0.02, 0.5) for _ in range(n)]
    k = rng.randrange(n)
    n_t = rng.choice(GRID)
    tp = TimingParams(t_sym=PHY.t_sym * rng.choice((1, 2, 4, 8)),
                      sigma=tuple(rng.uniform(1e-9, 3e-8) for _ in range(n)))
    cost = cost_model(k, n_t, tp, EnergyParams())
    seg = SegmentProbs(p_shr=rng.uniform(0.6, 1.0), p_phr=rng.uniform(0.6, 1.0),
                       p_cw=rng.uniform(0.9, 1.0))
    return tau, k, n_t, tp, cost, seg


def test_c1_state_probability_normalization():
    """1,000 random access vectors: states normalize and reconstruct affinely."""
    t0 = time.perf_counter()
    rng = random.Random(2024)
    worst = 0.0
    for _ in range(1000):
        n = rng.randrange(1, 11)
        tau = [rng.uniform(0.0, 0.9) for _ in range(n)]
        sp = state_probs(tau)
        worst = max(worst, abs(sp.p_success + sp.p_collision + sp.p_idle - 1.0))
        assert abs(sp.p_success + sp.p_collision + sp.p_idle - 1.0) <= 1e-12
        for k in range(n):
            if tau[k] == 1.0:
                continue
            lc = linear_coeffs(tau, k)
            t = tau[k]
            for got, want in ((lc.x_s * t + lc.y_s, sp.p_success),
                              (lc.x_c * t + lc.y_c, sp.p_collision),
                              (lc.x_i * t + lc.y_i, sp.p_idle)):
                worst = max(worst, abs(got - want))
                assert abs(got - want) <= 1e-12
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    print(f"\n[PASS] criterion 1: normalization and affine reconstruction "
          f"(max err {worst:.2e}, {elapsed:.2f} s < 1 s)")


def test_c2_binomial_tail_oracle():
    """Code tails match exact rational arithmetic at p in {1/2, 1/4, 1/8}."""

    def exact(n: int, t: int, p: Fraction) -> Fraction:
        return sum(Fraction(math.comb(n, i)) * p**i * (1 - p) ** (n - i)
                   for i in range(t + 1))

    # The three code geometries in use, at the three reference error rates.
    worst = 0.0
    for n, t in ((63, 6), (40, 2), (63, 2)):
        for p in (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)):
            want = exact(n, t, p)
            got = _binomial_tail(n, t, float(p))
            rel = abs(got - float(want)) / float(want)
            worst = max(worst, rel)
            assert rel <= 1e-12
    # The exact p = 1/2 sums reduce to known integer numerators.
    assert exact(63, 6, Fraction(1, 2)) == Fraction(75_611_761, 2**63)
    assert exact(40, 2, Fraction(1, 2)) == Fraction(821, 2**40)
    assert exact(63, 2, Fraction(1, 2)) == Fraction(2017, 2**63)
    print(f"\n[PASS] criterion 2: binomial tails vs exact rationals "
          f"(max rel err {worst:.2e} <= 1e-12)")


def test_c3_throughput_derivative():
    """Closed-form derivative: non-negative, matches finite differences."""
    rng = random.Random(77)
    checked = 0
    worst = 0.0
    while checked < 200:
        tau, k, n_t, tp, cost, seg = random_metric_setup(rng)
        if not 1e-3 < tau[k] < 0.999:
            continue
        node = Node(index=k, d=1.0, tau=tau[k], n_t=n_t, r_min=0.0)
        terms = aggregate_terms(tau, k, cost, n_t, tp.t_sym)
        assert terms.yt >= 0.0
        got = throughput_derivative_tau(node, tau, cost, seg)
        assert got >= 0.0
        h = 1e-6
        hi, lo = list(tau), list(tau)
        hi[k] += h
        lo[k] -= h
        r_hi = throughput(Node(k, 1.0, hi[k], n_t, 0.0), state_probs(hi), cost, seg)
        r_lo = throughput(Node(k, 1.0, lo[k], n_t, 0.0), state_probs(lo), cost, seg)
        fd = (r_hi - r_lo) / (2 * h)
        rel = abs(got - fd) / max(abs(fd), 1e-30)
        worst = max(worst, rel)
        assert rel <= 1e-4
        checked += 1
    print(f"\n[PASS] criterion 3: derivative >= 0, matches finite differences "
          f"on {checked} configs (max rel err {worst:.2e} <= 1e-4)")


def test_c4_rate_threshold_self_consistency():
    """Smallest rate-meeting access probability reproduces the target rate."""
    rng = random.Random(88)
    checked = 0
    worst = 0.0
    while checked < 200:
        tau, k, n_t, tp, cost, seg = random_metric_setup(rng)
        cap_tau = list(tau)
        cap_tau[k] = 1.0 - 1e-9
        cap = throughput(Node(k, 1.0, cap_tau[k], n_t, 0.0),
                         state_probs(cap_tau), cost, seg)
        r_target = rng.uniform(0.05, 0.95) * cap
        probe = Node(index=k, d=1.0, tau=tau[k], n_t=n_t, r_min=r_target)
        t_min = tau_min_for_rate(probe, tau, cost, seg)
        if t_min is None:
            continue
        back = list(tau)
        back[k] = t_min
        got = throughput(Node(k, 1.0, t_min, n_t, r_target),
                         state_probs(back), cost, seg)
        rel = abs(got - r_target) / r_target
        worst = max(worst, rel)
        assert rel <= 1e-9
        checked += 1
    print(f"\n[PASS] criterion 4: rate threshold plug-back on {checked} feasible "
          f"cases (max rel err {worst:.2e} <= 1e-9)")


def test_c5_payload_optimum_exactness():
    """Closed-form payload size equals the exhaustive 41-point argmax."""
    rng = random.Random(99)
    for _ in range(200):
        tau, k, n_t, tp, cost, seg = random_metric_setup(rng)
        terms = aggregate_terms(tau, k, cost, n_t, tp.t_sym)
        got = nt_opt_for_throughput(seg.p_cw, terms, GRID)

        def gain(size: int) -> float:
            return size * seg.p_cw ** (size // 63) / (terms.to + terms.tn * size)

        best = max(gain(size) for size in GRID)
        assert gain(got) == pytest.approx(best, rel=1e-12)
    terms = aggregate_terms((0.2, 0.2), 0, cost_model(0, 126, TimingParams(sigma=(0.0, 0.0)),
                                                      EnergyParams()), 126, PHY.t_sym)
    assert nt_opt_for_throughput(1.0, terms, GRID) == 2646
    print("\n[PASS] criterion 5: payload optimum equals exhaustive scan on 200 "
          "cases; perfect code picks 2646")


def grid_search_ee(net, step: float = 1e-3) -> float:
    """Best rate-constrained total efficiency on a dense two-node tau grid."""
    taus = np.arange(step, 1.0, step)
    t1 = taus[:, None]
    t2 = taus[None, :]
    p1s = t1 * (1.0 - t2)
    p2s = t2 * (1.0 - t1)
    p_idle = (1.0 - t1) * (1.0 - t2)
    p_coll = t1 * t2
    p_succ = p1s + p2s
    feasible = t1 + t2 <= 1.0
    total = np.zeros_like(p1s)
    for k in range(2):
        pks = p1s if k == 0 else p2s
        r_min = net.nodes[k].r_min
        best = np.full(p1s.shape, -np.inf)
        ok = np.zeros(p1s.shape, dtype=bool)
        for n_t in GRID:
            cost = net.cost(k, n_t)
            num = n_t * pks * frame_success(net, k, n_t)
            dur = p_succ * cost.t_success + p_coll * cost.t_collision + p_idle * cost.t_idle
            energy = p_succ * cost.e_success + p_coll * cost.e_collision
            rate = num / dur
            eta = num / energy
            sel = rate >= r_min * (1.0 - 1e-9)
            ok |= sel
            best = np.where(sel & (eta > best), eta, best)
        feasible &= ok
        total = total + np.where(ok, best, -np.inf)
    total = np.where(feasible, total, -np.inf)
    return float(total.max())


def test_c6_solver_vs_brute_force():
    """Ten random feasible two-node scenarios within 2% of the grid optimum."""
    t0 = time.perf_counter()
    rng = random.Random(123)
    worst = 0.0
    for case in range(10):
        ds = [rng.uniform(0.5, 6.0) for _ in range(2)]
        probe = build_network(ds, [0.0, 0.0])
        _, rates, _ = evaluate(probe, (0.3, 0.3), (2646, 2646))
        r_mins = [rng.uniform(0.2, 0.8) * r for r in rates]
        net = build_network(ds, r_mins)
        sol = eecap(net, SolverConfig(objective=VARIANT_EE))
        assert sol.feasible, f"case {case} unexpectedly infeasible"
        assert sol.variant_used == VARIANT_EE
        reference = grid_search_ee(net)
        rel = abs(sol.objective_value - reference) / reference
        worst = max(worst, rel)
        assert rel <= 0.02, f"case {case}: solver {sol.objective_value} vs grid {reference}"
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    print(f"\n[PASS] criterion 6: solver within 2% of dense grid search on 10 "
          f"scenarios (max rel gap {worst:.2e}, {elapsed:.1f} s < 60 s)")


def test_c7_monte_carlo_gate(capsys):
    """validate at one million slots keeps every |z| at or below 4."""
    t0 = time.perf_counter()
    rc = main(["validate", "--scenario", FIXED_SCN, "--slots", "1000000", "--seed", "0"])
    elapsed = time.perf_counter() - t0
    out = capsys.readouterr().out.strip().splitlines()
    assert rc == 0
    assert elapsed < 10.0
    zs = [abs(float(row.split(",")[5])) for row in out[1:]]
    assert zs and max(zs) <= 4.0
    print(f"\n[PASS] criterion 7: Monte Carlo gate at 1e6 slots "
          f"(max |z| = {max(zs):.2f} <= 4, {elapsed:.1f} s < 10 s)")


def test_c8a_nodes_sweep_trends(capsys):
    """Growing the network shrinks per-node access, grows the total."""
    rc = main(["sweep", "--scenario", NODES_SCN, "--axis", "nodes",
               "--from", "2", "--to", "10"])
    assert rc == 0
    rows = [r.split(",") for r in capsys.readouterr().out.strip().splitlines()[1:]]
    assert len(rows) == 9
    per_node = [float(r[11]) for r in rows]   # tau of node 0
    total = [float(r[6]) for r in rows]       # sum of tau
    assert all(a >= b - 1e-9 for a, b in zip(per_node, per_node[1:]))
    assert per_node[0] > per_node[-1]
    assert all(b >= a - 1e-9 for a, b in zip(total, total[1:]))
    print(f"\n[PASS] criterion 8a: nodes sweep 2..10, per-node access "
          f"{per_node[0]:.3f} -> {per_node[-1]:.3f} non-increasing, total non-decreasing")


def test_c8b_rate_sweep_trends(capsys):
    """Access grows with demand, then the fallback takes over past the ceiling."""
    rc = main(["sweep", "--scenario", SOLVE_SCN, "--axis", "rate",
               "--from", "2e5", "--to", "2.4e6", "--steps", "12"])
    assert rc == 0
    rows = [r.split(",") for r in capsys.readouterr().out.strip().splitlines()[1:]]
    variants = [r[3] for r in rows]
    tau0 = [float(r[11]) for r in rows]
    ee_taus = [t for t, v in zip(tau0, variants) if v == VARIANT_EE]
    assert len(ee_taus) >= 3
    assert all(a < b for a, b in zip(ee_taus, ee_taus[1:]))
    assert variants[-1] == VARIANT_LOGTHR
    flip = variants.index(VARIANT_LOGTHR)
    assert all(v == VARIANT_EE for v in variants[:flip])
    assert all(v == VARIANT_LOGTHR for v in variants[flip:])
    print(f"\n[PASS] criterion 8b: rate sweep, access increasing over {len(ee_taus)} "
          f"feasible points, fallback from point {flip}")


def test_c8c_distance_sweep_trends(capsys):
    """Longer links cost efficiency and collapse the optimal frame size."""
    rc = main(["sweep", "--scenario", DIST_SCN, "--axis", "distance",
               "--from", "1", "--to", "10", "--steps", "10"])
    assert rc == 0
    rows = [r.split(",") for r in capsys.readouterr().out.strip().splitlines()[1:]]
    sum_eta = [float(r[8]) for r in rows]
    max_nt = [int(r[13]) for r in rows]
    n_cpb = [int(r[5]) for r in rows]
    assert all(a >= b * (1.0 - 1e-9) for a, b in zip(sum_eta, sum_eta[1:]))
    assert sum_eta[0] > sum_eta[-1]
    assert all(a >= b for a, b in zip(max_nt, max_nt[1:]))
    assert max_nt[0] == 2646 and max_nt[-1] == 126
    assert all(a <= b for a, b in zip(n_cpb, n_cpb[1:]))
    print(f"\n[PASS] criterion 8c: distance sweep, total efficiency non-increasing "
          f"({sum_eta[0]:.3g} -> {sum_eta[-1]:.3g}), frame size 2646 -> 126")


def test_c8d_fairness_variant_comparison():
    """Log-efficiency spreads access more evenly than plain sum efficiency."""
    net = build_network([1.0, 1.0], [1e6, 5e5])
    sol_ee = eecap(net, SolverConfig(objective=VARIANT_EE))
    sol_log = eecap(net, SolverConfig(objective=VARIANT_LOGEE))
    assert sol_ee.feasible and sol_log.feasible
    for r, nm in zip(sol_ee.rates, net.nodes):
        assert r >= nm.r_min * (1.0 - 2e-4)
    # Reference access pairs under shipped calibration, checked to +-25%.
    for got, want in zip(sol_ee.tau_opt, (0.1430, 0.0770)):
        assert abs(got - want) <= 0.25 * want
    for got, want in zip(sol_log.tau_opt, (0.1610, 0.1410)):
        assert abs(got - want) <= 0.25 * want
    gap_ee = abs(sol_ee.tau_opt[0] - sol_ee.tau_opt[1])
    gap_log = abs(sol_log.tau_opt[0] - sol_log.tau_opt[1])
    assert gap_log < gap_ee
    print(f"\n[PASS] criterion 8d: access gap {gap_log:.4f} (log) < {gap_ee:.4f} (sum), "
          f"both within 25% of reference pairs, rates met")


def test_c9_byte_identical_output(capsys):
    """Every command is deterministic: identical inputs, identical CSV."""
    commands = (
        ["solve", "--scenario", SOLVE_SCN],
        ["solve", "--scenario", FIXED_SCN],
        ["sweep", "--scenario", SOLVE_SCN, "--axis", "rate",
         "--from", "5e5", "--to", "1e6", "--steps", "3"],
        ["validate", "--scenario", FIXED_SCN, "--slots", "100000", "--seed", "42"],
    )
    for argv in commands:
        assert main(list(argv)) == 0
        first = capsys.readouterr().out
        assert main(list(argv)) == 0
        second = capsys.readouterr().out
        assert first == second, f"non-deterministic output for {argv[0]}"
        assert first.encode("utf-8") == second.encode("utf-8")
    print("\n[PASS] criterion 9: byte-identical CSV across repeated runs of "
          "solve, sweep and validate")
