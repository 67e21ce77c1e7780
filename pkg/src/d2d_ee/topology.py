"""Random scenario generation: UE placement, Rayleigh fading, channel gains.

The draw order from the generator stream is fixed and part of the scenario
file contract: cellular positions, D2D transmitter positions, D2D receiver
positions (rejection-sampled into the cell, pair by pair), then the five
fading tensors in the order g_direct, g_cell2d2d, g_d2d2d2d, g_cell2bs,
g_d2d2bs, each filled in C order.
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
import yaml

from .config import ScenarioConfig


@dataclass
class Topology:
    """UE positions and the five channel-gain tensors of one scenario draw.

    Gain index conventions (N D2D pairs, K cellular UEs / channels):
      g_direct[i, k]     D2D pair i on channel k
      g_cell2d2d[k, i]   cellular UE k into D2D receiver i
      g_d2d2d2d[j, i, k] D2D transmitter j into D2D receiver i on channel k
                         (diagonal j == i unused, stored as 0)
      g_cell2bs[k]       cellular UE k to the BS
      g_d2d2bs[i, k]     D2D transmitter i to the BS on channel k
    """

    bs_position: np.ndarray
    cell_positions: np.ndarray
    d2d_tx_positions: np.ndarray
    d2d_rx_positions: np.ndarray
    g_direct: np.ndarray
    g_cell2d2d: np.ndarray
    g_d2d2d2d: np.ndarray
    g_cell2bs: np.ndarray
    g_d2d2bs: np.ndarray

    @property
    def num_d2d_pairs(self) -> int:
        return self.d2d_tx_positions.shape[0]

    @property
    def num_cellular(self) -> int:
        return self.cell_positions.shape[0]

    def to_dict(self) -> dict:
        return {
            "bs_position": self.bs_position.tolist(),
            "cell_positions": self.cell_positions.tolist(),
            "d2d_tx_positions": self.d2d_tx_positions.tolist(),
            "d2d_rx_positions": self.d2d_rx_positions.tolist(),
            "g_direct": self.g_direct.tolist(),
            "g_cell2d2d": self.g_cell2d2d.tolist(),
            "g_d2d2d2d": self.g_d2d2d2d.tolist(),
            "g_cell2bs": self.g_cell2bs.tolist(),
            "g_d2d2bs": self.g_d2d2bs.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Topology":
        return cls(**{key: np.asarray(data[key], dtype=float) for key in data})


def channel_gain(distance: float, fading_power: float) -> float:
    """Channel power gain distance**-2 * |h|**2."""
    if distance <= 0:
        raise ValueError("distance must be strictly positive")
    if fading_power < 0:
        raise ValueError("fading_power must be nonnegative")
    return fading_power / distance**2


def rayleigh_fading_power(rng: np.random.Generator, size=None):
    """|h|^2 for h ~ CN(0, 1): unit-mean exponential."""
    return rng.exponential(1.0, size)


def _uniform_disk(rng: np.random.Generator, n: int, radius: float,
                  center: np.ndarray) -> np.ndarray:
    r = radius * np.sqrt(rng.random(n))
    theta = 2.0 * np.pi * rng.random(n)
    return center + np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def _pairwise_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # (len(a), len(b)) Euclidean distances
    diff = a[:, None, :] - b[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def generate_topology(config: ScenarioConfig,
                      rng: np.random.Generator | None = None) -> Topology:
    """Draw a scenario: uniform UE placement in the cell plus Rayleigh gains.

    Deterministic given (config, rng state); passing no rng seeds a fresh
    generator from config.seed.
    """
    config.validate()
    if rng is None:
        rng = np.random.default_rng(config.seed)

    n, k = config.num_d2d_pairs, config.num_cellular
    bs = np.zeros(2)
    cell = _uniform_disk(rng, k, config.cell_radius, bs)
    d2d_tx = _uniform_disk(rng, n, config.cell_radius, bs)
    d2d_rx = np.empty((n, 2))
    for i in range(n):
        while True:
            cand = _uniform_disk(rng, 1, config.d2d_max_distance, d2d_tx[i])[0]
            if np.hypot(cand[0], cand[1]) <= config.cell_radius:
                d2d_rx[i] = cand
                break

    d_direct = np.hypot(*(d2d_tx - d2d_rx).T)                  # (N,)
    d_cell_rx = _pairwise_distances(cell, d2d_rx)              # (K, N)
    d_tx_rx = _pairwise_distances(d2d_tx, d2d_rx)              # (N, N)
    d_cell_bs = np.hypot(*cell.T)                              # (K,)
    d_tx_bs = np.hypot(*d2d_tx.T)                              # (N,)

    g_direct = rayleigh_fading_power(rng, (n, k)) / d_direct[:, None] ** 2
    g_cell2d2d = rayleigh_fading_power(rng, (k, n)) / d_cell_rx**2
    with np.errstate(divide="ignore"):
        g_d2d2d2d = rayleigh_fading_power(rng, (n, n, k)) / d_tx_rx[:, :, None] ** 2
    idx = np.arange(n)
    g_d2d2d2d[idx, idx, :] = 0.0
    g_cell2bs = rayleigh_fading_power(rng, k) / d_cell_bs**2
    g_d2d2bs = rayleigh_fading_power(rng, (n, k)) / d_tx_bs[:, None] ** 2

    return Topology(
        bs_position=bs,
        cell_positions=cell,
        d2d_tx_positions=d2d_tx,
        d2d_rx_positions=d2d_rx,
        g_direct=g_direct,
        g_cell2d2d=g_cell2d2d,
        g_d2d2d2d=g_d2d2d2d,
        g_cell2bs=g_cell2bs,
        g_d2d2bs=g_d2d2bs,
    )


def scenario_to_yaml(config: ScenarioConfig, topo: Topology) -> str:
    """Serialize config + topology to a round-trippable YAML document.

    Floats are written with shortest round-trip repr, so load followed by
    dump reproduces the document byte for byte.
    """
    doc = {"scenario": config.to_dict(), "topology": topo.to_dict()}
    buf = io.StringIO()
    yaml.safe_dump(doc, buf, sort_keys=True, default_flow_style=None)
    return buf.getvalue()


def scenario_from_yaml(text: str) -> tuple[ScenarioConfig, Topology]:
    doc = yaml.safe_load(text)
    return (ScenarioConfig.from_dict(doc["scenario"]),
            Topology.from_dict(doc["topology"]))


def save_scenario(path, config: ScenarioConfig, topo: Topology) -> None:
    with open(path, "w") as fh:
        fh.write(scenario_to_yaml(config, topo))


def load_scenario(path) -> tuple[ScenarioConfig, Topology]:
    with open(path) as fh:
        return scenario_from_yaml(fh.read())
