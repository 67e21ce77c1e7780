"""Scenario and solver configuration.

Defaults correspond to the standard single-cell simulation setup: a 500 m
cell, 5 D2D pairs reusing the uplink channels of 3 cellular UEs, 200 mW
power budgets and 10 mW circuit power per device.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace


class ConfigError(ValueError):
    """A configuration field is missing or out of range."""

    def __init__(self, field_name: str, message: str):
        self.field_name = field_name
        super().__init__(f"{field_name}: {message}")


@dataclass
class SolverConfig:
    """Tuning knobs for the per-link best-response solver."""

    delta: float = 1e-3          # outer-loop (ratio update) convergence tolerance
    l_max: int = 10              # outer-loop iteration cap
    dual_max_iters: int = 500    # inner dual-ascent iteration cap
    dual_tol: float = 1e-6       # feasibility / complementary-slackness tolerance
    step_c: float = 0.1          # dual step-size scale, mu(tau) = step_c / sqrt(tau)

    def validate(self) -> None:
        for name in ("delta", "dual_tol", "step_c"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"solver.{name}", "must be positive")
        if self.l_max < 1:
            raise ConfigError("solver.l_max", "must be >= 1")
        if self.dual_max_iters < 1:
            raise ConfigError("solver.dual_max_iters", "must be >= 1")


@dataclass
class ScenarioConfig:
    """Physical-layer parameters of one simulated cell.

    All powers are in watts, distances in meters, rates in bit/s/Hz.
    """

    cell_radius: float = 500.0
    d2d_max_distance: float = 25.0
    num_d2d_pairs: int = 5
    num_cellular: int = 3
    p_d2d_max: float = 0.2
    p_cell_max: float = 0.2
    p_cir: float = 0.01
    noise_power: float = 1e-7
    pa_efficiency: float = 0.35
    qos_d2d: float = 0.5
    qos_cell: float = 0.1
    seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)

    def validate(self) -> None:
        positive = (
            "cell_radius", "d2d_max_distance", "p_d2d_max", "p_cell_max",
            "p_cir", "noise_power",
        )
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigError(name, "must be strictly positive")
        if not 0.0 < self.pa_efficiency < 1.0:
            raise ConfigError("pa_efficiency", "must lie in (0, 1)")
        if self.num_d2d_pairs < 0:
            raise ConfigError("num_d2d_pairs", "must be >= 0")
        if self.num_cellular < 1:
            raise ConfigError("num_cellular", "must be >= 1")
        for name in ("qos_d2d", "qos_cell"):
            if getattr(self, name) < 0:
                raise ConfigError(name, "must be >= 0")
        if self.seed < 0:
            raise ConfigError("seed", "must be a nonnegative integer")
        self.solver.validate()

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        data = dict(data)
        solver = data.pop("solver", None)
        known = {f for f in cls.__dataclass_fields__ if f != "solver"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown scenario field")
        cfg = cls(**data)
        if solver is not None:
            cfg = replace(cfg, solver=SolverConfig(**solver))
        return cfg
