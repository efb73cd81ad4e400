"""Per-node model assembly for a one-hop star network.

Combines the channel map, the PHY error chain and the state cost models
into one immutable network description the solver, the simulator and the
CLI all consume.  Each node gets its own link budget, segment decode
probabilities, payload symbol period (scaled by its pulses-per-burst
count) and propagation delay.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .access import StateProbs, state_probs
from .channel import ChannelParams, NcpbTable, link_budget
from .costs import SPEED_OF_LIGHT, CostModel, EnergyParams, TimingParams, cost_model
from .metrics import Node, energy_efficiency, frame_success_prob, throughput
from .phy import LinkBudget, PhyConfig, SegmentProbs, bit_error_prob, segment_probs


@dataclass(frozen=True)
class NodeModel:
    """One node's link, error probabilities and timing, all distance-derived."""

    index: int
    d: float
    r_min: float
    link: LinkBudget
    p_b: float
    seg: SegmentProbs
    t_sym: float              # payload symbol period at this node's burst length
    timing: TimingParams      # shared header/guard times with this node's t_sym


@dataclass(frozen=True)
class NetworkModel:
    """Immutable bundle of everything needed to evaluate one scenario."""

    phy: PhyConfig
    channel: ChannelParams
    table: NcpbTable
    energy: EnergyParams
    nodes: tuple[NodeModel, ...]

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def nt_grid(self) -> range:
        return self.phy.nt_grid()

    def cost(self, node_index: int, n_t: int) -> CostModel:
        """Per-state costs for one node at one payload size."""
        return cost_model(node_index, n_t, self.nodes[node_index].timing, self.energy)

    def make_node(self, node_index: int, tau: float, n_t: int) -> Node:
        nm = self.nodes[node_index]
        return Node(index=nm.index, d=nm.d, tau=tau, n_t=n_t, r_min=nm.r_min)


def build_network(distances: Sequence[float], r_mins: Sequence[float],
                  phy: Optional[PhyConfig] = None,
                  channel: Optional[ChannelParams] = None,
                  table: Optional[NcpbTable] = None,
                  timing: Optional[TimingParams] = None,
                  energy: Optional[EnergyParams] = None) -> NetworkModel:
    """Derive every per-node model from the node distances and rate targets.

    The payload symbol period of a node is the configured base period times
    its pulses-per-burst count, and its propagation delay is d / c.
    """
    if len(distances) == 0:
        raise ValueError("at least one node required")
    if len(r_mins) != len(distances):
        raise ValueError("r_mins and distances must have the same length")
    phy = phy if phy is not None else PhyConfig()
    channel = channel if channel is not None else ChannelParams()
    table = table if table is not None else NcpbTable()
    timing = timing if timing is not None else TimingParams()
    energy = energy if energy is not None else EnergyParams()
    sigma = tuple(d / SPEED_OF_LIGHT for d in distances)
    nodes = []
    for k, (d, r_min) in enumerate(zip(distances, r_mins)):
        if r_min < 0.0:
            raise ValueError(f"r_min[{k}] must be non-negative")
        lb = link_budget(d, channel, table, phy)
        p_b = bit_error_prob(lb, phy)
        seg = segment_probs(p_b, phy)
        t_sym = phy.t_sym * lb.n_cpb
        node_timing = replace(timing, t_sym=t_sym, sigma=sigma)
        nodes.append(NodeModel(index=k, d=d, r_min=r_min, link=lb, p_b=p_b,
                               seg=seg, t_sym=t_sym, timing=node_timing))
    return NetworkModel(phy=phy, channel=channel, table=table, energy=energy,
                        nodes=tuple(nodes))


def evaluate(net: NetworkModel, tau: Sequence[float], nts: Sequence[int],
             guard_zero_energy: bool = False) -> tuple[StateProbs, tuple[float, ...], tuple[float, ...]]:
    """Slot-state probabilities plus per-node throughput and efficiency.

    With guard_zero_energy, a zero average-energy denominator yields an
    efficiency of 0.0 instead of an error; the solver uses this to keep
    objective evaluations total during the search.
    """
    if len(tau) != net.n_nodes or len(nts) != net.n_nodes:
        raise ValueError("tau and nts must have one entry per node")
    sp = state_probs(tau)
    rates = []
    etas = []
    for k, nm in enumerate(net.nodes):
        node = net.make_node(k, tau[k], nts[k])
        cost = net.cost(k, nts[k])
        rates.append(throughput(node, sp, cost, nm.seg, net.phy.n))
        e_den = sp.p_success * cost.e_success + sp.p_collision * cost.e_collision
        if e_den <= 0.0 and guard_zero_energy:
            etas.append(0.0)
        else:
            etas.append(energy_efficiency(node, sp, cost, nm.seg, net.phy.n))
    return sp, tuple(rates), tuple(etas)


def frame_success(net: NetworkModel, node_index: int, n_t: int) -> float:
    """Whole-frame decode probability for one node at one payload size."""
    return frame_success_prob(net.nodes[node_index].seg, n_t, net.phy.n)
