from dataclasses import replace

import numpy as np
import pytest

from d2d_ee.config import ScenarioConfig
from d2d_ee.game import (EnergyEfficientProvider, GameConfig, RandomProvider,
                         check_nash, run_game)
from d2d_ee.link_model import metrics_cellular, metrics_d2d
from d2d_ee.topology import generate_topology


def test_cellular_only_game_converges_in_one_round():
    cfg = replace(ScenarioConfig(seed=4), num_d2d_pairs=0)
    topo = generate_topology(cfg)
    trace = run_game(topo, cfg)
    # orthogonal channels: nothing changes after round 0
    assert trace.converged_round == 1
    assert np.array_equal(trace.rounds[0].alloc.p_cell,
                          trace.rounds[-1].alloc.p_cell)


def test_two_player_game_reaches_nash():
    cfg = replace(ScenarioConfig(seed=21), num_d2d_pairs=1, num_cellular=1)
    topo = generate_topology(cfg)
    trace = run_game(topo, cfg)
    assert trace.converged_round is not None
    audit = check_nash(trace.final_alloc(), topo, cfg)
    assert audit.passed


def test_trace_ee_matches_recomputation():
    cfg = ScenarioConfig(seed=33)
    topo = generate_topology(cfg)
    trace = run_game(topo, cfg)
    for rec in trace.rounds:
        for i in range(cfg.num_d2d_pairs):
            assert rec.d2d_ee[i] == metrics_d2d(i, rec.alloc, topo, cfg).ee
        for k in range(cfg.num_cellular):
            assert rec.cell_ee[k] == metrics_cellular(k, rec.alloc, topo, cfg).ee


def test_game_terminates_within_max_rounds():
    cfg = ScenarioConfig(seed=5)
    topo = generate_topology(cfg)
    gcfg = GameConfig(max_rounds=3)
    provider = RandomProvider(np.random.default_rng(0))
    trace = run_game(topo, cfg, gcfg, provider)
    assert trace.converged_round is None
    assert len(trace.rounds) == gcfg.max_rounds + 1


def test_round_zero_has_silent_d2d():
    cfg = ScenarioConfig(seed=5)
    topo = generate_topology(cfg)
    trace = run_game(topo, cfg)
    assert np.all(trace.rounds[0].alloc.p_d2d == 0.0)
    assert np.all(trace.rounds[0].alloc.p_cell > 0.0)


def test_perturbed_profile_fails_audit():
    cfg = ScenarioConfig(seed=12)
    topo = generate_topology(cfg)
    trace = run_game(topo, cfg)
    assert trace.converged_round is not None
    alloc = trace.final_alloc().copy()
    alloc.p_d2d[0] = alloc.p_d2d[0] * 0.0
    alloc.p_d2d[0, 0] = 0.5 * cfg.p_d2d_max
    audit = check_nash(alloc, topo, cfg)
    assert not audit.passed
    assert any(e.link == "d2d[0]" and e.rel_improvement > 1e-3
               for e in audit.entries)


def test_all_zero_profile_fails_audit_without_rate_floor():
    cfg = replace(ScenarioConfig(seed=12), qos_d2d=0.0, qos_cell=0.0)
    topo = generate_topology(cfg)
    from d2d_ee.link_model import PowerAllocation
    alloc = PowerAllocation.zeros(cfg.num_d2d_pairs, cfg.num_cellular)
    audit = check_nash(alloc, topo, cfg)
    assert not audit.passed


def test_ordering_is_recorded_and_validated():
    cfg = ScenarioConfig(seed=2)
    topo = generate_topology(cfg)
    trace = run_game(topo, cfg, GameConfig(ordering="d2d_first"))
    assert trace.ordering == "d2d_first"
    with pytest.raises(ValueError):
        run_game(topo, cfg, GameConfig(ordering="alphabetical"))
