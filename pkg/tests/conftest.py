import numpy as np
import pytest

from d2d_ee.config import ScenarioConfig
from d2d_ee.topology import Topology


def make_topology(n=1, k=1, g_direct=None, g_cell2d2d=None, g_d2d2d2d=None,
                  g_cell2bs=None, g_d2d2bs=None):
    """Synthetic topology with hand-picked gains (positions are placeholders)."""

    def arr(value, shape, default):
        if value is None:
            return np.full(shape, default)
        return np.broadcast_to(np.asarray(value, dtype=float), shape).copy()

    cross = arr(g_d2d2d2d, (n, n, k), 0.0)
    cross[np.arange(n), np.arange(n), :] = 0.0  # self-interference unused

    return Topology(
        bs_position=np.zeros(2),
        cell_positions=np.zeros((k, 2)),
        d2d_tx_positions=np.zeros((n, 2)),
        d2d_rx_positions=np.zeros((n, 2)),
        g_direct=arr(g_direct, (n, k), 1e-4),
        g_cell2d2d=arr(g_cell2d2d, (k, n), 0.0),
        g_d2d2d2d=cross,
        g_cell2bs=arr(g_cell2bs, (k,), 4e-6),
        g_d2d2bs=arr(g_d2d2bs, (n, k), 0.0),
    )


@pytest.fixture
def default_cfg():
    return ScenarioConfig()
