"""Noncooperative power-allocation game: sequential best-response rounds.

Round 0 starts from silence with only the cellular UEs responding; from
round 1 on, every UE in turn best-responds against the current profile
(Gauss-Seidel sweeps). The game stops once a full sweep moves no power by
more than nash_power_tol, or after max_rounds sweeps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .baselines import (random_response_cellular, random_response_d2d,
                        spectral_efficient_cellular, spectral_efficient_d2d)
from .config import ScenarioConfig
from .fp_solver import (BestResponse, dinkelbach_best_response_cellular,
                        dinkelbach_best_response_d2d)
from .link_model import PowerAllocation, metrics_cellular, metrics_d2d
from .topology import Topology

ORDERINGS = ("cellular_first", "d2d_first")


@dataclass
class GameConfig:
    max_rounds: int = 10
    nash_power_tol: float = 1e-6   # sup-norm power change defining convergence
    ordering: str = "cellular_first"

    def validate(self) -> None:
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")
        if not self.nash_power_tol > 0:
            raise ValueError("nash_power_tol must be positive")
        if self.ordering not in ORDERINGS:
            raise ValueError(f"ordering must be one of {ORDERINGS}")


class EnergyEfficientProvider:
    """Best responses from the fractional-programming solver."""

    name = "energy_efficient"

    def respond_d2d(self, i, alloc, topo, cfg) -> BestResponse:
        return dinkelbach_best_response_d2d(i, alloc, topo, cfg)

    def respond_cellular(self, k, alloc, topo, cfg) -> BestResponse:
        return dinkelbach_best_response_cellular(k, alloc, topo, cfg)


class SpectralEfficientProvider:
    """Rate-maximizing responses at full power budget."""

    name = "spectral_efficient"

    def respond_d2d(self, i, alloc, topo, cfg) -> BestResponse:
        p, feasible = spectral_efficient_d2d(i, alloc, topo, cfg)
        return BestResponse(p, 0.0, feasible, True)

    def respond_cellular(self, k, alloc, topo, cfg) -> BestResponse:
        p, feasible = spectral_efficient_cellular(k, alloc, topo, cfg)
        return BestResponse(p, 0.0, feasible, True)


class RandomProvider:
    """Fresh random powers every response; owns its RNG stream."""

    name = "random"

    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    def respond_d2d(self, i, alloc, topo, cfg) -> BestResponse:
        return BestResponse(random_response_d2d(cfg, self.rng), 0.0, True, True)

    def respond_cellular(self, k, alloc, topo, cfg) -> BestResponse:
        return BestResponse(random_response_cellular(cfg, self.rng), 0.0,
                            True, True)


@dataclass
class RoundRecord:
    alloc: PowerAllocation
    d2d_ee: np.ndarray
    cell_ee: np.ndarray
    d2d_rate: np.ndarray
    cell_rate: np.ndarray
    d2d_feasible: np.ndarray
    cell_feasible: np.ndarray
    solver_traces: dict = field(default_factory=dict)  # "d2d"/"cell" -> list[BestResponse|None]


@dataclass
class GameTrace:
    rounds: list
    converged_round: int | None
    ordering: str

    def final_alloc(self) -> PowerAllocation:
        return self.rounds[-1].alloc


def _record_round(alloc: PowerAllocation, topo: Topology, cfg: ScenarioConfig,
                  d2d_brs, cell_brs) -> RoundRecord:
    n, k = topo.num_d2d_pairs, topo.num_cellular
    md = [metrics_d2d(i, alloc, topo, cfg) for i in range(n)]
    mc = [metrics_cellular(j, alloc, topo, cfg) for j in range(k)]
    return RoundRecord(
        alloc=alloc.copy(),
        d2d_ee=np.array([m.ee for m in md]),
        cell_ee=np.array([m.ee for m in mc]),
        d2d_rate=np.array([m.rate for m in md]),
        cell_rate=np.array([m.rate for m in mc]),
        d2d_feasible=np.array([br.feasible if br else True for br in d2d_brs]),
        cell_feasible=np.array([br.feasible if br else True for br in cell_brs]),
        solver_traces={"d2d": list(d2d_brs), "cell": list(cell_brs)},
    )


def run_game(topo: Topology, cfg: ScenarioConfig,
             gcfg: GameConfig | None = None,
             provider=None) -> GameTrace:
    """Play the sequential best-response game and record every round."""
    gcfg = gcfg or GameConfig()
    gcfg.validate()
    provider = provider or EnergyEfficientProvider()
    n, k = topo.num_d2d_pairs, topo.num_cellular

    alloc = PowerAllocation.zeros(n, k)
    # round 0: channels used by cellular links only
    cell_brs = []
    for j in range(k):
        br = provider.respond_cellular(j, alloc, topo, cfg)
        alloc.p_cell[j] = br.powers
        cell_brs.append(br)
    rounds = [_record_round(alloc, topo, cfg, [None] * n, cell_brs)]

    converged_round = None
    for rnd in range(1, gcfg.max_rounds + 1):
        max_change = 0.0
        cell_brs, d2d_brs = [None] * k, [None] * n

        def play_cellular(j):
            nonlocal max_change
            br = provider.respond_cellular(j, alloc, topo, cfg)
            max_change = max(max_change, abs(br.powers - alloc.p_cell[j]))
            alloc.p_cell[j] = br.powers
            cell_brs[j] = br

        def play_d2d(i):
            nonlocal max_change
            br = provider.respond_d2d(i, alloc, topo, cfg)
            max_change = max(max_change,
                             float(np.max(np.abs(br.powers - alloc.p_d2d[i]))))
            alloc.p_d2d[i] = br.powers
            d2d_brs[i] = br

        if gcfg.ordering == "cellular_first":
            for j in range(k):
                play_cellular(j)
            for i in range(n):
                play_d2d(i)
        else:
            for i in range(n):
                play_d2d(i)
            for j in range(k):
                play_cellular(j)

        rounds.append(_record_round(alloc, topo, cfg, d2d_brs, cell_brs))
        if max_change < gcfg.nash_power_tol:
            converged_round = rnd
            break

    return GameTrace(rounds, converged_round, gcfg.ordering)


@dataclass
class NashAuditEntry:
    link: str                 # "d2d[i]" or "cell[k]"
    current_ee: float
    best_response_ee: float
    rel_improvement: float


@dataclass
class NashAudit:
    entries: list
    max_rel_improvement: float
    passed: bool


def check_nash(alloc: PowerAllocation, topo: Topology, cfg: ScenarioConfig,
               tol_ee: float = 1e-3, provider=None) -> NashAudit:
    """Audit a profile: how much could each link gain by deviating alone?"""
    provider = provider or EnergyEfficientProvider()
    entries = []

    def audit(label, current_ee, deviated_ee):
        gain = max(0.0, deviated_ee - current_ee)
        rel = gain / max(current_ee, 1e-300) if gain > 0 else 0.0
        entries.append(NashAuditEntry(label, current_ee, deviated_ee, rel))

    for i in range(topo.num_d2d_pairs):
        cur = metrics_d2d(i, alloc, topo, cfg).ee
        br = provider.respond_d2d(i, alloc, topo, cfg)
        trial = alloc.copy()
        trial.p_d2d[i] = br.powers
        audit(f"d2d[{i}]", cur, metrics_d2d(i, trial, topo, cfg).ee)
    for k in range(topo.num_cellular):
        cur = metrics_cellular(k, alloc, topo, cfg).ee
        br = provider.respond_cellular(k, alloc, topo, cfg)
        trial = alloc.copy()
        trial.p_cell[k] = br.powers
        audit(f"cell[{k}]", cur, metrics_cellular(k, trial, topo, cfg).ee)

    worst = max((e.rel_improvement for e in entries), default=0.0)
    return NashAudit(entries, worst, worst <= tol_ee)
