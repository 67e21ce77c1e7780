"""Comparison power-allocation rules and dominance-regime analysis.

The spectral-efficient rule maximizes rate with the full power budget and
ignores the energy cost; the random rule draws its powers fresh every
round. The regime machinery classifies which term of the network EE
dominates and evaluates the matching approximate EE expression.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig
from .fp_solver import LOG2E, rate_waterfill
from .link_model import (PowerAllocation, interference_cellular,
                         interference_d2d, log2_1p, network_ee)
from .topology import Topology

# interpretation of "much greater than" when classifying dominance; two
# orders of magnitude keeps the approximation error around the 1% level
DOMINANCE_THRESHOLD = 100.0

REGIME_PRECEDENCE = (
    "circuit_dominated",
    "transmission_dominated",
    "noise_dominated",
    "interference_dominated",
    "cellular_dominated",
    "d2d_dominated",
)


@dataclass
class Regime:
    tag: str                 # one of REGIME_PRECEDENCE or "none"
    dominance_ratio: float


def spectral_efficient_d2d(i: int, alloc_others: PowerAllocation,
                           topo: Topology, cfg: ScenarioConfig):
    """Rate-maximizing response of D2D pair i: water-fill the full budget.

    Returns (power vector, feasible); feasible is False when even the full
    budget cannot meet the rate floor (outage, powers still returned).
    """
    others = alloc_others.copy()
    others.p_d2d[i, :] = 0.0
    ipn = interference_d2d(i, others, topo, cfg.noise_power)
    g = topo.g_direct[i]
    p = rate_waterfill(ipn, g, cfg.p_d2d_max)
    rate = float(np.sum(log2_1p(p * g / ipn)))
    return p, rate >= cfg.qos_d2d


def spectral_efficient_cellular(k: int, alloc_others: PowerAllocation,
                                topo: Topology, cfg: ScenarioConfig):
    """Rate-maximizing response of cellular UE k: transmit at full power."""
    ipn = interference_cellular(k, alloc_others, topo, cfg.noise_power)
    p = cfg.p_cell_max
    rate = float(log2_1p(p * topo.g_cell2bs[k] / ipn))
    return p, rate >= cfg.qos_cell


def random_response_d2d(cfg: ScenarioConfig,
                        rng: np.random.Generator) -> np.ndarray:
    """Uniform total power in [0, p_max], split by flat Dirichlet weights."""
    total = rng.uniform(0.0, cfg.p_d2d_max)
    weights = rng.dirichlet(np.ones(cfg.num_cellular))
    return total * weights


def random_response_cellular(cfg: ScenarioConfig,
                             rng: np.random.Generator) -> float:
    return float(rng.uniform(0.0, cfg.p_cell_max))


def _ratio(num: float, den: float) -> float:
    if den <= 0.0:
        return math.inf if num > 0.0 else 0.0
    return num / den


def classify_regime(topo: Topology, alloc: PowerAllocation,
                    cfg: ScenarioConfig) -> Regime:
    """Assign the first dominance regime (in precedence order) whose defining
    ratio reaches DOMINANCE_THRESHOLD, or "none"."""
    n0 = cfg.noise_power
    p_d = alloc.p_d2d.ravel()
    p_c = alloc.p_cell
    all_tx = np.concatenate((p_d, p_c))

    interf = [interference_d2d(i, alloc, topo, n0) - n0
              for i in range(topo.num_d2d_pairs)]
    interf += [np.atleast_1d(interference_cellular(k, alloc, topo, n0) - n0)
               for k in range(topo.num_cellular)]
    interf = np.concatenate(interf) if interf else np.array([0.0])

    ratios = {
        "circuit_dominated": _ratio(cfg.p_cir, float(all_tx.max(initial=0.0))),
        "transmission_dominated": _ratio(float(all_tx.min(initial=math.inf)),
                                         cfg.p_cir),
        "noise_dominated": _ratio(n0, float(interf.max())),
        "interference_dominated": _ratio(float(interf.min()), n0),
        "cellular_dominated": _ratio(float(p_c.min(initial=math.inf)),
                                     float(p_d.max(initial=0.0))),
        "d2d_dominated": _ratio(float(p_d.min(initial=math.inf)),
                                float(p_c.max(initial=0.0))),
    }
    for tag in REGIME_PRECEDENCE:
        if ratios[tag] >= DOMINANCE_THRESHOLD:
            return Regime(tag, ratios[tag])
    return Regime("none", 0.0)


def _sinr_terms(topo: Topology, alloc: PowerAllocation, cfg: ScenarioConfig,
                noise: bool = True, cell_interf: bool = True,
                d2d_interf: bool = True):
    """Per-link rates keeping only the selected denominator terms."""
    d2d_rates = []
    for i in range(topo.num_d2d_pairs):
        ipn = np.zeros(topo.num_cellular)
        if noise:
            ipn += cfg.noise_power
        if cell_interf:
            ipn += alloc.p_cell * topo.g_cell2d2d[:, i]
        if d2d_interf:
            ipn += np.einsum("jk,jk->k", alloc.p_d2d, topo.g_d2d2d2d[:, i, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            sinr = np.where(alloc.p_d2d[i] > 0,
                            alloc.p_d2d[i] * topo.g_direct[i] / ipn, 0.0)
        sinr = np.nan_to_num(sinr, nan=0.0, posinf=np.inf)
        d2d_rates.append(float(np.sum(log2_1p(sinr))))
    cell_rates = []
    for k in range(topo.num_cellular):
        ipn = cfg.noise_power if noise else 0.0
        if d2d_interf:
            ipn += float(alloc.p_d2d[:, k] @ topo.g_d2d2bs[:, k])
        if ipn > 0:
            sinr = alloc.p_cell[k] * topo.g_cell2bs[k] / ipn
        else:
            sinr = math.inf if alloc.p_cell[k] > 0 else 0.0
        cell_rates.append(float(log2_1p(sinr)))
    return np.array(d2d_rates), np.array(cell_rates)


def regime_approx_ee(topo: Topology, alloc: PowerAllocation,
                     cfg: ScenarioConfig, regime: str | Regime) -> float:
    """Evaluate the approximate network EE for the given dominance regime."""
    tag = regime.tag if isinstance(regime, Regime) else regime
    eta, p_cir = cfg.pa_efficiency, cfg.p_cir
    tx_d = alloc.p_d2d.sum(axis=1)
    tx_c = alloc.p_cell

    if tag == "circuit_dominated":
        d2d_rates, cell_rates = _sinr_terms(topo, alloc, cfg)
        return float(d2d_rates.sum() + 2.0 * cell_rates.sum()) / (2.0 * p_cir)
    if tag == "transmission_dominated":
        d2d_rates, cell_rates = _sinr_terms(topo, alloc, cfg)
        total = float(np.sum(d2d_rates / (tx_d / eta)))
        total += float(np.sum(cell_rates / (tx_c / eta)))
        return total
    if tag == "noise_dominated":
        d2d_rates, cell_rates = _sinr_terms(topo, alloc, cfg,
                                            cell_interf=False,
                                            d2d_interf=False)
    elif tag == "interference_dominated":
        d2d_rates, cell_rates = _sinr_terms(topo, alloc, cfg, noise=False)
    elif tag == "cellular_dominated":
        _, cell_rates = _sinr_terms(topo, alloc, cfg, d2d_interf=False)
        return float(np.sum(cell_rates / (tx_c / eta + p_cir)))
    elif tag == "d2d_dominated":
        d2d_rates, _ = _sinr_terms(topo, alloc, cfg, cell_interf=False)
        return float(np.sum(d2d_rates / (tx_d / eta + 2.0 * p_cir)))
    elif tag == "none":
        return network_ee(alloc, topo, cfg)
    else:
        raise ValueError(f"unknown regime tag: {tag}")
    total = float(np.sum(d2d_rates / (tx_d / eta + 2.0 * p_cir)))
    total += float(np.sum(cell_rates / (tx_c / eta + p_cir)))
    return total


def bisection_single_link_ee(g: float, interference: float, n0: float,
                             eta: float, p_cir_total: float,
                             p_max: float) -> tuple[float, float]:
    """Maximize log2(1 + p*g/(I+N0)) / (p/eta + p_cir_total) on [0, p_max].

    The objective is quasiconcave; bisection runs on the sign of its
    stationarity condition. Returns (p*, q*).
    """
    if g <= 0:
        raise ValueError("channel gain must be strictly positive")
    a = (interference + n0) / g

    def rate(p: float) -> float:
        return float(log2_1p(p / a))

    def slope_sign(p: float) -> float:
        # derivative of the EE ratio has the sign of this expression
        return LOG2E / (a + p) * (p / eta + p_cir_total) - rate(p) / eta

    if slope_sign(p_max) >= 0.0:
        p_star = p_max
    else:
        lo, hi = 0.0, p_max
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if slope_sign(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        p_star = 0.5 * (lo + hi)
    q_star = rate(p_star) / (p_star / eta + p_cir_total)
    return p_star, q_star
