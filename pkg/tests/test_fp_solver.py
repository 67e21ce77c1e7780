import math
from dataclasses import replace

import numpy as np
import pytest

from d2d_ee.baselines import bisection_single_link_ee
from d2d_ee.config import ScenarioConfig
from d2d_ee.fp_solver import (LOG2E, dinkelbach_best_response_cellular,
                              dinkelbach_best_response_d2d, dual_ascent_d2d,
                              water_fill_cellular, water_fill_d2d)
from d2d_ee.link_model import PowerAllocation, interference_d2d, log2_1p
from d2d_ee.topology import generate_topology

from conftest import make_topology


def test_water_fill_d2d_fully_flooded():
    p = water_fill_d2d(10.0, 0.0, 0.0, np.array([1.0, 2.0]),
                       np.array([1e-3, 1e-3]), 0.35)
    assert np.all(p == 0.0)


def test_water_fill_d2d_closed_form_value():
    p = water_fill_d2d(1.0, 0.0, 0.0, np.array([1e-7]), np.array([1e-4]), 0.35)
    expect = 0.35 * LOG2E - 1e-3
    assert p[0] == pytest.approx(expect, rel=1e-12)
    assert p[0] == pytest.approx(0.50396, abs=5e-5)


def test_water_fill_d2d_symmetry():
    p = water_fill_d2d(2.0, 0.1, 0.3, np.array([1e-7, 1e-7]),
                       np.array([1e-4, 1e-4]), 0.35)
    assert p[0] == p[1] > 0


def test_water_fill_d2d_unbounded_level():
    p = water_fill_d2d(0.0, 0.0, 0.0, np.array([1e-7]), np.array([1e-4]), 0.35)
    assert np.all(np.isinf(p))


def test_water_fill_d2d_interference_lowers_power():
    base = water_fill_d2d(1.0, 0.0, 0.0, np.array([1e-7, 1e-7]),
                          np.array([1e-4, 1e-4]), 0.35)
    bumped = water_fill_d2d(1.0, 0.0, 0.0, np.array([1e-7, 5e-7]),
                            np.array([1e-4, 1e-4]), 0.35)
    assert bumped[1] <= base[1]
    assert bumped[0] == base[0]


def test_water_fill_cellular_values():
    assert water_fill_cellular(1.0, 1.0, 0.0, 1e-7, 4e-6, 0.35) == 0.0
    p = water_fill_cellular(1.0, 0.0, 0.0, 1e-7, 4e-6, 0.35)
    assert p == pytest.approx(0.35 * LOG2E - 0.025, rel=1e-12)
    assert p == pytest.approx(0.47996, abs=5e-5)
    # interference-plus-noise above the level
    assert water_fill_cellular(10.0, 0.0, 0.0, 1.0, 1e-6, 0.35) == 0.0


def _single_link_cfg(**kw):
    return replace(ScenarioConfig(), num_d2d_pairs=1, num_cellular=1, **kw)


def test_dual_ascent_reduces_to_waterfilling_when_constraints_inactive():
    cfg = _single_link_cfg(qos_d2d=0.0)
    topo = make_topology(g_direct=1e-4)
    alloc = PowerAllocation.zeros(1, 1)
    q = 20.0
    p, alpha, beta, feasible = dual_ascent_d2d(0, q, alloc, topo, cfg)
    expect = water_fill_d2d(q, 0.0, 0.0, np.array([cfg.noise_power]),
                            np.array([1e-4]), cfg.pa_efficiency)
    assert feasible
    assert alpha == 0.0 and beta == 0.0
    assert p == pytest.approx(expect, rel=1e-9)


def test_dual_ascent_matches_grid_on_two_channels():
    cfg = replace(ScenarioConfig(), num_d2d_pairs=1, num_cellular=2)
    topo = make_topology(n=1, k=2, g_direct=[2e-4, 5e-5])
    alloc = PowerAllocation.zeros(1, 2)
    q = 100.0
    p, alpha, beta, feasible = dual_ascent_d2d(0, q, alloc, topo, cfg)
    assert feasible

    # independent oracle: exhaustive grid over the feasible simplex
    step = 1e-4
    grid = np.arange(0.0, cfg.p_d2d_max + step / 2, step)
    a = cfg.noise_power / np.array([2e-4, 5e-5])
    p1, p2 = grid[:, None], grid[None, :]
    rate = log2_1p(p1 / a[0]) + log2_1p(p2 / a[1])
    obj = rate - q * ((p1 + p2) / cfg.pa_efficiency + 2 * cfg.p_cir)
    obj[(p1 + p2 > cfg.p_d2d_max + 1e-12) | (rate < cfg.qos_d2d)] = -np.inf
    best = np.unravel_index(np.argmax(obj), obj.shape)
    assert p[0] == pytest.approx(grid[best[0]], abs=1e-3)
    assert p[1] == pytest.approx(grid[best[1]], abs=1e-3)


def test_dual_ascent_kkt_residuals():
    cfg = ScenarioConfig()
    rng = np.random.default_rng(3)
    for seed in range(10):
        topo = generate_topology(cfg, np.random.default_rng(seed))
        alloc = PowerAllocation(
            rng.uniform(0, cfg.p_d2d_max / cfg.num_cellular,
                        (cfg.num_d2d_pairs, cfg.num_cellular)),
            rng.uniform(0, cfg.p_cell_max, cfg.num_cellular))
        q = rng.uniform(1.0, 200.0)
        p, alpha, beta, feasible = dual_ascent_d2d(0, q, alloc, topo, cfg)
        if not feasible:
            continue
        others = alloc.copy()
        others.p_d2d[0, :] = 0.0
        ipn = interference_d2d(0, others, topo, cfg.noise_power)
        rate = float(np.sum(log2_1p(p * topo.g_direct[0] / ipn)))
        tol = cfg.solver.dual_tol
        assert np.all(p >= 0)
        assert rate >= cfg.qos_d2d - tol
        assert p.sum() <= cfg.p_d2d_max + tol
        assert alpha * (rate - cfg.qos_d2d) <= tol * max(1.0, alpha) + 1e-9
        assert beta * (cfg.p_d2d_max - p.sum()) <= tol * max(1.0, beta) + 1e-9


def test_dual_ascent_outage_when_qos_unreachable():
    cfg = _single_link_cfg(qos_d2d=5.0)
    # direct gain so weak that even the full budget cannot deliver the floor
    topo = make_topology(g_direct=1e-9)
    alloc = PowerAllocation.zeros(1, 1)
    p, alpha, beta, feasible = dual_ascent_d2d(0, 1.0, alloc, topo, cfg)
    assert not feasible
    assert p.sum() <= cfg.p_d2d_max + 1e-9


def test_dinkelbach_matches_bisection_on_strong_single_channel():
    cfg = _single_link_cfg(qos_d2d=0.0)
    g = 1e-2  # g / N0 = 1e5
    topo = make_topology(g_direct=g)
    alloc = PowerAllocation.zeros(1, 1)
    br = dinkelbach_best_response_d2d(0, alloc, topo, cfg)
    _, q_oracle = bisection_single_link_ee(g, 0.0, cfg.noise_power,
                                           cfg.pa_efficiency, 2 * cfg.p_cir,
                                           cfg.p_d2d_max)
    assert br.converged
    assert br.q_star == pytest.approx(q_oracle, rel=1e-3)


def test_dinkelbach_q_sequence_nondecreasing():
    cfg = ScenarioConfig()
    for seed in (1, 2, 3, 4):
        topo = generate_topology(cfg, np.random.default_rng(seed))
        alloc = PowerAllocation.zeros(cfg.num_d2d_pairs, cfg.num_cellular)
        for i in range(cfg.num_d2d_pairs):
            br = dinkelbach_best_response_d2d(i, alloc, topo, cfg)
            assert br.converged
            assert all(b >= a for a, b in zip(br.trace, br.trace[1:]))
            assert 0.0 <= br.residual <= cfg.solver.delta


def test_dinkelbach_converges_on_interference_free_default_instance():
    # seed 42 fixed; all other links silent
    cfg = ScenarioConfig(seed=42)
    topo = generate_topology(cfg)
    alloc = PowerAllocation.zeros(cfg.num_d2d_pairs, cfg.num_cellular)
    br = dinkelbach_best_response_d2d(0, alloc, topo, cfg)
    assert br.converged
    assert len(br.trace) - 1 <= cfg.solver.l_max


def test_dinkelbach_cellular_inactive_constraint_reduction():
    cfg = _single_link_cfg(qos_cell=0.0)
    topo = make_topology(g_cell2bs=4e-4)
    alloc = PowerAllocation.zeros(1, 1)
    br = dinkelbach_best_response_cellular(0, alloc, topo, cfg)
    _, q_oracle = bisection_single_link_ee(4e-4, 0.0, cfg.noise_power,
                                           cfg.pa_efficiency, cfg.p_cir,
                                           cfg.p_cell_max)
    assert br.converged
    assert br.q_star == pytest.approx(q_oracle, rel=1e-3)


def test_dinkelbach_cellular_outage_under_heavy_interference():
    cfg = replace(ScenarioConfig(), num_d2d_pairs=1, num_cellular=1,
                  qos_cell=2.0)
    topo = make_topology(g_cell2bs=1e-6, g_d2d2bs=1e-2)
    alloc = PowerAllocation(np.array([[0.2]]), np.zeros(1))
    br = dinkelbach_best_response_cellular(0, alloc, topo, cfg)
    assert not br.feasible
    assert br.powers <= cfg.p_cell_max + 1e-9
