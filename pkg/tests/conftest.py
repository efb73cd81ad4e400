"""Shared builders for the test suite.

Two stock networks cover the interesting regimes: a short-range pair whose
links are essentially error-free, and a lossy long link where every PHY
segment probability is strictly inside (0, 1).
"""

from __future__ import annotations

import pytest

from eecap import ChannelParams, NetworkModel, build_network


@pytest.fixture
def two_node_net() -> NetworkModel:
    """Two nodes at 1 m with 1 Mbit/s and 0.5 Mbit/s rate targets."""
    return build_network([1.0, 1.0], [1.0e6, 0.5e6])


@pytest.fixture
def lossy_net() -> NetworkModel:
    """Three nodes on a weak transmitter so frame losses actually happen.

    The far node sees a bit error probability around 3 percent: frames are
    lost often, yet deliveries stay frequent enough to estimate.
    """
    ch = ChannelParams(tx_eb_over_n0_at_d0=500.0)
    return build_network([1.0, 3.0, 4.45], [2.0e4, 1.0e4, 5.0e3], channel=ch)
