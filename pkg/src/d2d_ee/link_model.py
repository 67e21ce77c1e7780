"""Physical-layer evaluation: SINR, rates, power consumption, EE utilities.

All functions are pure; powers are in watts throughout, rates in bit/s/Hz
and EE in bit/Hz/J.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig
from .topology import Topology

# absolute slack for power-budget feasibility checks; dual-ascent solutions
# meet the constraints only to numerical tolerance
EPS_FEAS = 1e-9

_LN2 = math.log(2.0)


def log2_1p(x):
    """log2(1 + x) without cancellation for tiny x."""
    return np.log1p(x) / _LN2


@dataclass
class PowerAllocation:
    """Full strategy profile: p_d2d[i, k] (N x K) and p_cell[k] (K,)."""

    p_d2d: np.ndarray
    p_cell: np.ndarray

    @classmethod
    def zeros(cls, num_d2d_pairs: int, num_cellular: int) -> "PowerAllocation":
        return cls(np.zeros((num_d2d_pairs, num_cellular)),
                   np.zeros(num_cellular))

    def copy(self) -> "PowerAllocation":
        return PowerAllocation(self.p_d2d.copy(), self.p_cell.copy())

    def validate(self, cfg: ScenarioConfig) -> None:
        if np.any(self.p_d2d < 0) or np.any(self.p_cell < 0):
            raise ValueError("power allocation entries must be nonnegative")
        if self.p_d2d.size and np.any(self.p_d2d.sum(axis=1) > cfg.p_d2d_max + EPS_FEAS):
            raise ValueError("D2D per-pair power budget exceeded")
        if np.any(self.p_cell > cfg.p_cell_max + EPS_FEAS):
            raise ValueError("cellular power budget exceeded")


@dataclass
class LinkMetrics:
    sinr_per_channel: np.ndarray
    rate: float
    power_total: float
    ee: float


def interference_d2d(i: int, alloc: PowerAllocation, topo: Topology,
                     n0: float) -> np.ndarray:
    """Interference-plus-noise at D2D receiver i, per channel (K,)."""
    cross = np.einsum("jk,jk->k", alloc.p_d2d, topo.g_d2d2d2d[:, i, :])
    return alloc.p_cell * topo.g_cell2d2d[:, i] + cross + n0


def interference_cellular(k: int, alloc: PowerAllocation, topo: Topology,
                          n0: float) -> float:
    """Interference-plus-noise at the BS on channel k."""
    return float(alloc.p_d2d[:, k] @ topo.g_d2d2bs[:, k] + n0)


def sinr_d2d_all(i: int, alloc: PowerAllocation, topo: Topology,
                 n0: float) -> np.ndarray:
    return alloc.p_d2d[i] * topo.g_direct[i] / interference_d2d(i, alloc, topo, n0)


def sinr_d2d(i: int, k: int, alloc: PowerAllocation, topo: Topology,
             n0: float) -> float:
    return float(sinr_d2d_all(i, alloc, topo, n0)[k])


def sinr_cellular(k: int, alloc: PowerAllocation, topo: Topology,
                  n0: float) -> float:
    return alloc.p_cell[k] * topo.g_cell2bs[k] / interference_cellular(
        k, alloc, topo, n0)


def rate_d2d(i: int, alloc: PowerAllocation, topo: Topology, n0: float) -> float:
    return float(np.sum(log2_1p(sinr_d2d_all(i, alloc, topo, n0))))


def rate_cellular(k: int, alloc: PowerAllocation, topo: Topology,
                  n0: float) -> float:
    return float(log2_1p(sinr_cellular(k, alloc, topo, n0)))


def power_total_d2d(i: int, alloc: PowerAllocation, eta: float,
                    p_cir: float) -> float:
    # circuit power counted at both ends of the pair
    return float(alloc.p_d2d[i].sum() / eta + 2.0 * p_cir)


def power_total_cellular(k: int, alloc: PowerAllocation, eta: float,
                         p_cir: float) -> float:
    return float(alloc.p_cell[k] / eta + p_cir)


def ee_d2d(i: int, alloc: PowerAllocation, topo: Topology,
           cfg: ScenarioConfig) -> float:
    return (rate_d2d(i, alloc, topo, cfg.noise_power)
            / power_total_d2d(i, alloc, cfg.pa_efficiency, cfg.p_cir))


def ee_cellular(k: int, alloc: PowerAllocation, topo: Topology,
                cfg: ScenarioConfig) -> float:
    return (rate_cellular(k, alloc, topo, cfg.noise_power)
            / power_total_cellular(k, alloc, cfg.pa_efficiency, cfg.p_cir))


def network_ee(alloc: PowerAllocation, topo: Topology,
               cfg: ScenarioConfig) -> float:
    """Sum of per-link EEs (not sum-rate over sum-power)."""
    total = 0.0
    for i in range(topo.num_d2d_pairs):
        total += ee_d2d(i, alloc, topo, cfg)
    for k in range(topo.num_cellular):
        total += ee_cellular(k, alloc, topo, cfg)
    return total


def metrics_d2d(i: int, alloc: PowerAllocation, topo: Topology,
                cfg: ScenarioConfig) -> LinkMetrics:
    sinr = sinr_d2d_all(i, alloc, topo, cfg.noise_power)
    rate = float(np.sum(log2_1p(sinr)))
    ptot = power_total_d2d(i, alloc, cfg.pa_efficiency, cfg.p_cir)
    return LinkMetrics(sinr, rate, ptot, rate / ptot)


def metrics_cellular(k: int, alloc: PowerAllocation, topo: Topology,
                     cfg: ScenarioConfig) -> LinkMetrics:
    sinr = sinr_cellular(k, alloc, topo, cfg.noise_power)
    rate = float(log2_1p(sinr))
    ptot = power_total_cellular(k, alloc, cfg.pa_efficiency, cfg.p_cir)
    return LinkMetrics(np.array([sinr]), rate, ptot, rate / ptot)
