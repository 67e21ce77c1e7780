"""Independent oracles used to validate the best-response solver.

Two families: a 1-D bisection on the single-link EE ratio, and brute-force
grids over the feasible power region. Both are deliberately separate from
the solver code paths they check.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .baselines import bisection_single_link_ee
from .config import ScenarioConfig
from .fp_solver import (dinkelbach_best_response_cellular,
                        dinkelbach_best_response_d2d)
from .link_model import PowerAllocation, interference_d2d, log2_1p
from .topology import generate_topology


@dataclass
class OracleComparison:
    label: str
    solver_value: float
    oracle_value: float

    @property
    def rel_error(self) -> float:
        scale = max(abs(self.oracle_value), 1e-300)
        return abs(self.solver_value - self.oracle_value) / scale


def grid_best_ee_2ch(ipn: np.ndarray, g: np.ndarray, cfg: ScenarioConfig,
                     step: float = 1e-4) -> float:
    """Exhaustive grid over the 2-channel D2D power simplex; returns max EE
    among profiles meeting the rate floor."""
    eta, p_cir, p_max = cfg.pa_efficiency, cfg.p_cir, cfg.p_d2d_max
    a = ipn / g
    p = np.arange(0.0, p_max + step / 2, step)
    p1 = p[:, None]
    p2 = p[None, :]
    total = p1 + p2
    rate = log2_1p(p1 / a[0]) + log2_1p(p2 / a[1])
    ee = rate / (total / eta + 2.0 * p_cir)
    ee[(total > p_max + 1e-12) | (rate < cfg.qos_d2d)] = -np.inf
    return float(ee.max())


def compare_cellular_bisection(num_instances: int, seed: int,
                               base: ScenarioConfig | None = None) -> list:
    """Solver q* versus the bisection oracle on random isolated cellular links.

    The rate floor is disabled so both sides solve the same box-constrained
    ratio maximization.
    """
    base = base or ScenarioConfig()
    cfg = replace(base, num_d2d_pairs=0, num_cellular=1, qos_cell=0.0)
    rng = np.random.default_rng(seed)
    out = []
    for idx in range(num_instances):
        topo = generate_topology(cfg, rng)
        alloc = PowerAllocation.zeros(0, 1)
        br = dinkelbach_best_response_cellular(0, alloc, topo, cfg)
        _, q_oracle = bisection_single_link_ee(
            float(topo.g_cell2bs[0]), 0.0, cfg.noise_power,
            cfg.pa_efficiency, cfg.p_cir, cfg.p_cell_max)
        out.append(OracleComparison(f"cellular[{idx}]", br.q_star, q_oracle))
    return out


def compare_d2d_grid(num_instances: int, seed: int,
                     base: ScenarioConfig | None = None,
                     step: float = 1e-4) -> list:
    """Solver best-response EE versus grid search on random 2-channel D2D
    instances with frozen interference from random cellular powers."""
    base = base or ScenarioConfig()
    cfg = replace(base, num_d2d_pairs=1, num_cellular=2)
    rng = np.random.default_rng(seed)
    out = []
    idx = 0
    while len(out) < num_instances:
        topo = generate_topology(cfg, rng)
        alloc = PowerAllocation.zeros(1, 2)
        alloc.p_cell[:] = rng.uniform(0.0, cfg.p_cell_max, size=2)
        ipn = interference_d2d(0, alloc, topo, cfg.noise_power)
        br = dinkelbach_best_response_d2d(0, alloc, topo, cfg)
        if not br.feasible:
            idx += 1
            continue  # rate floor unattainable; grid has no feasible point
        oracle = grid_best_ee_2ch(ipn, topo.g_direct[0], cfg, step)
        out.append(OracleComparison(f"d2d[{idx}]", br.q_star, oracle))
        idx += 1
    return out
