"""Energy-efficient power allocation for D2D underlay cellular uplinks.

A seedable link-level simulator plus a distributed best-response game:
each link maximizes its own energy efficiency via a fractional-programming
outer loop around closed-form water-filling, benchmarked against
spectral-efficient and random baselines.
"""
from .config import ConfigError, ScenarioConfig, SolverConfig
from .experiment import (ALGORITHMS, AggregateResult, ExperimentSpec,
                         emit_outputs, run_experiment)
from .fp_solver import (BestResponse, dinkelbach_best_response_cellular,
                        dinkelbach_best_response_d2d, water_fill_cellular,
                        water_fill_d2d)
from .game import (EnergyEfficientProvider, GameConfig, GameTrace,
                   RandomProvider, SpectralEfficientProvider, check_nash,
                   run_game)
from .link_model import PowerAllocation, network_ee
from .topology import Topology, channel_gain, generate_topology

__all__ = [
    "ALGORITHMS", "AggregateResult", "BestResponse", "ConfigError",
    "EnergyEfficientProvider", "ExperimentSpec", "GameConfig", "GameTrace",
    "PowerAllocation", "RandomProvider", "ScenarioConfig", "SolverConfig",
    "SpectralEfficientProvider", "Topology", "channel_gain", "check_nash",
    "dinkelbach_best_response_cellular", "dinkelbach_best_response_d2d",
    "emit_outputs", "generate_topology", "network_ee", "run_experiment",
    "run_game", "water_fill_cellular", "water_fill_d2d",
]
