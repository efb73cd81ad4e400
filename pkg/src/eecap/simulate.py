"""Slot-level Monte Carlo simulation of the random-access network.

Every node transmits independently per slot with its access probability;
a lone transmitter's frame is delivered with its whole-frame decode
probability.  The simulator is the empirical oracle for the analytic
state probabilities, throughput and energy efficiency, so alongside the
physical accounting (energy charged to transmitters, elapsed time from
the involved nodes' durations) it exposes per-node ratio estimators that
mirror the analytic definitions, with delta-method standard errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .costs import CostModel
from .network import NetworkModel, frame_success


@dataclass(frozen=True)
class SimConfig:
    num_slots: int = 1_000_000
    seed: int = 0
    record_per_node: bool = True

    def __post_init__(self) -> None:
        if self.num_slots <= 0:
            raise ValueError("num_slots must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 bits")


@dataclass(frozen=True)
class SimReport:
    """Counts, empirical probabilities and accounting from one run."""

    num_slots: int
    seed: int
    n_success: int
    n_collision: int
    n_idle: int
    p_success: float
    p_collision: float
    p_idle: float
    se_success: float
    se_collision: float
    se_idle: float
    per_node_success: tuple[int, ...]
    per_node_delivered: tuple[int, ...]
    per_node_bits: tuple[int, ...]
    per_node_energy: tuple[float, ...]
    elapsed_time: float

    def __post_init__(self) -> None:
        if self.n_success + self.n_collision + self.n_idle != self.num_slots:
            raise ValueError("state counts must sum to num_slots")
        for p in (self.p_success, self.p_collision, self.p_idle):
            if not 0.0 <= p <= 1.0:
                raise ValueError("empirical probabilities must lie in [0, 1]")

    @staticmethod
    def csv_header() -> str:
        return ("num_slots,seed,n_success,n_collision,n_idle,"
                "p_success,p_collision,p_idle,elapsed_time")

    def csv_row(self) -> str:
        return ",".join([
            str(self.num_slots), str(self.seed),
            str(self.n_success), str(self.n_collision), str(self.n_idle),
            f"{self.p_success:.10g}", f"{self.p_collision:.10g}", f"{self.p_idle:.10g}",
            f"{self.elapsed_time:.10g}",
        ])


def simulate(net: NetworkModel, tau: Sequence[float], nts: Sequence[int],
             cfg: SimConfig) -> SimReport:
    """Run one seeded simulation; identical inputs give identical reports."""
    n = net.n_nodes
    if len(tau) != n or len(nts) != n:
        raise ValueError("tau and nts must have one entry per node")
    for t in tau:
        if not 0.0 <= t <= 1.0:
            raise ValueError("access probabilities must lie in [0, 1]")
    costs = [net.cost(k, nts[k]) for k in range(n)]
    p_frames = np.array([frame_success(net, k, nts[k]) for k in range(n)])
    t_succ = np.array([c.t_success for c in costs])
    t_coll = np.array([c.t_collision for c in costs])
    t_idle = costs[0].t_idle

    rng = np.random.default_rng(cfg.seed)
    m = cfg.num_slots
    tx = rng.random((m, n)) < np.asarray(tau, dtype=float)[None, :]
    u = rng.random(m)

    ntx = tx.sum(axis=1)
    success = ntx == 1
    collision = ntx >= 2
    idle = ntx == 0
    n_success = int(success.sum())
    n_collision = int(collision.sum())
    n_idle = int(idle.sum())

    succ_by_node = tx & success[:, None]
    per_node_success = succ_by_node.sum(axis=0)
    delivered = (succ_by_node & (u[:, None] < p_frames[None, :])).sum(axis=0)
    coll_tx = (tx & collision[:, None]).sum(axis=0)

    elapsed = float(per_node_success @ t_succ) + n_idle * t_idle
    if n_collision > 0:
        coll_rows = tx[collision]
        coll_durations = np.where(coll_rows, t_coll[None, :], -np.inf).max(axis=1)
        elapsed += float(coll_durations.sum())

    e_succ = np.array([c.e_success for c in costs])
    e_coll = np.array([c.e_collision for c in costs])
    energy = per_node_success * e_succ + coll_tx * e_coll

    if cfg.record_per_node:
        per_success = tuple(int(v) for v in per_node_success)
        per_delivered = tuple(int(v) for v in delivered)
        per_bits = tuple(int(v) * nts[k] for k, v in enumerate(delivered))
        per_energy = tuple(float(v) for v in energy)
    else:
        per_success = per_delivered = per_bits = ()
        per_energy = ()

    return SimReport(
        num_slots=m,
        seed=cfg.seed,
        n_success=n_success,
        n_collision=n_collision,
        n_idle=n_idle,
        p_success=n_success / m,
        p_collision=n_collision / m,
        p_idle=n_idle / m,
        se_success=math.sqrt(n_success / m * (1.0 - n_success / m) / m),
        se_collision=math.sqrt(n_collision / m * (1.0 - n_collision / m) / m),
        se_idle=math.sqrt(n_idle / m * (1.0 - n_idle / m) / m),
        per_node_success=per_success,
        per_node_delivered=per_delivered,
        per_node_bits=per_bits,
        per_node_energy=per_energy,
        elapsed_time=elapsed,
    )


def _ratio_estimate(report: SimReport, node_index: int, n_t: int,
                    w_success: float, w_collision: float, w_idle: float) -> tuple[float, float]:
    """Delta-method mean and standard error of delivered bits over state-weighted totals.

    Per slot, the numerator sample is n_t on delivery (only possible in the
    node's own success slots) and the denominator sample is the
    state-appropriate weight, so all moments follow from the counts.
    """
    m = report.num_slots
    deliv = report.per_node_delivered[node_index]
    b_mean = n_t * deliv / m
    d_mean = (report.n_success * w_success + report.n_collision * w_collision
              + report.n_idle * w_idle) / m
    ratio = b_mean / d_mean if d_mean > 0.0 else 0.0
    eb2 = n_t * n_t * deliv / m
    ebd = n_t * w_success * deliv / m
    ed2 = (report.n_success * w_success ** 2 + report.n_collision * w_collision ** 2
           + report.n_idle * w_idle ** 2) / m
    var_b = eb2 - b_mean * b_mean
    var_d = ed2 - d_mean * d_mean
    cov = ebd - b_mean * d_mean
    var_ratio = (var_b - 2.0 * ratio * cov + ratio * ratio * var_d)
    if d_mean > 0.0:
        var_ratio /= m * d_mean * d_mean
    se = math.sqrt(max(var_ratio, 0.0))
    return ratio, se


def rate_estimate(report: SimReport, node_index: int, n_t: int,
                  cost: CostModel) -> tuple[float, float]:
    """Empirical throughput of one node with its delta-method standard error."""
    return _ratio_estimate(report, node_index, n_t,
                           cost.t_success, cost.t_collision, cost.t_idle)


def efficiency_estimate(report: SimReport, node_index: int, n_t: int,
                        cost: CostModel) -> tuple[float, float]:
    """Empirical energy efficiency of one node with its standard error."""
    return _ratio_estimate(report, node_index, n_t,
                           cost.e_success, cost.e_collision, cost.e_idle)


def z_score(estimate: float, se: float, analytic: float) -> float:
    """Standardized difference; exact agreement at zero spread scores zero."""
    if se == 0.0:
        return 0.0 if estimate == analytic else math.inf
    return (estimate - analytic) / se
