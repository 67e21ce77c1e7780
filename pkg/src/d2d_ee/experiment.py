"""Monte Carlo experiment harness: seeded runs, aggregation, file outputs.

Each run draws an independent topology from a child seed derived as
SeedSequence([master_seed, run_index]) (splitmix64-based mixing), so the
fan-out is order-independent and a parallel worker pool reproduces the
sequential results bit for bit.
"""
from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import metadata as importlib_metadata
from pathlib import Path

import numpy as np
import yaml

from .config import ScenarioConfig
from .game import (EnergyEfficientProvider, GameConfig, GameTrace,
                   RandomProvider, SpectralEfficientProvider, run_game)
from .topology import generate_topology

ALGORITHMS = ("energy_efficient", "spectral_efficient", "random")

# sub-stream indices under each run's seed sequence
_STREAM_TOPOLOGY = 0
_STREAM_RANDOM_BASELINE = 1

RANDOM_BASELINE_NOTE = ("total transmit power uniform on [0, p_max]; D2D split "
                        "across channels by flat Dirichlet weights; redrawn "
                        "every round")


@dataclass
class ExperimentSpec:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    game: GameConfig = field(default_factory=GameConfig)
    num_runs: int = 1000
    algorithms: tuple = ALGORITHMS
    master_seed: int = 0

    def validate(self) -> None:
        self.scenario.validate()
        self.game.validate()
        if self.num_runs < 1:
            raise ValueError("num_runs must be >= 1")
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms: {sorted(unknown)}")


@dataclass
class RunSummary:
    """Per-run, per-algorithm round curves (means over links, padded)."""

    d2d_ee: dict
    cell_ee: dict
    converged_round: dict
    outages: dict


@dataclass
class AggregateResult:
    spec: ExperimentSpec
    rounds: np.ndarray                  # 0..max_rounds
    mean_d2d_ee: dict                   # algorithm -> (R+1,)
    mean_cell_ee: dict
    norm_d2d_ee: dict
    norm_cell_ee: dict
    normalization_divisor: float
    convergence_rounds: dict            # algorithm -> list (None = not converged)
    outage_counts: dict                 # algorithm -> total infeasible links
    run_summaries: list


def child_rng(master_seed: int, run_index: int,
              stream: int) -> np.random.Generator:
    ss = np.random.SeedSequence([master_seed, run_index])
    return np.random.default_rng(ss.spawn(2)[stream])


def _make_provider(algorithm: str, master_seed: int, run_index: int):
    if algorithm == "energy_efficient":
        return EnergyEfficientProvider()
    if algorithm == "spectral_efficient":
        return SpectralEfficientProvider()
    if algorithm == "random":
        return RandomProvider(child_rng(master_seed, run_index,
                                        _STREAM_RANDOM_BASELINE))
    raise ValueError(f"unknown algorithm: {algorithm}")


def _pad_curve(values: list, length: int) -> np.ndarray:
    """Hold the last recorded round constant out to `length` entries."""
    out = np.empty(length)
    out[:len(values)] = values
    out[len(values):] = values[-1]
    return out


def _trace_curves(trace: GameTrace, length: int):
    d2d = [float(rec.d2d_ee.mean()) if rec.d2d_ee.size else 0.0
           for rec in trace.rounds]
    cell = [float(rec.cell_ee.mean()) for rec in trace.rounds]
    return _pad_curve(d2d, length), _pad_curve(cell, length)


def run_single(spec: ExperimentSpec, run_index: int) -> RunSummary:
    """Execute every requested algorithm on one topology draw."""
    topo = generate_topology(spec.scenario,
                             child_rng(spec.master_seed, run_index,
                                       _STREAM_TOPOLOGY))
    length = spec.game.max_rounds + 1
    d2d_ee, cell_ee, conv, outages = {}, {}, {}, {}
    for alg in spec.algorithms:
        provider = _make_provider(alg, spec.master_seed, run_index)
        trace = run_game(topo, spec.scenario, spec.game, provider)
        d2d_ee[alg], cell_ee[alg] = _trace_curves(trace, length)
        conv[alg] = trace.converged_round
        final = trace.rounds[-1]
        outages[alg] = int((~final.d2d_feasible).sum()
                           + (~final.cell_feasible).sum())
    return RunSummary(d2d_ee, cell_ee, conv, outages)


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> AggregateResult:
    """Run the full Monte Carlo batch and aggregate round curves."""
    spec.validate()
    indices = range(spec.num_runs)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(_run_single_star,
                                      ((spec, r) for r in indices),
                                      chunksize=max(1, spec.num_runs // (4 * workers))))
    else:
        summaries = [run_single(spec, r) for r in indices]

    length = spec.game.max_rounds + 1
    mean_d2d, mean_cell = {}, {}
    for alg in spec.algorithms:
        acc_d = np.zeros(length)
        acc_c = np.zeros(length)
        for s in summaries:                       # fixed run order: bit-stable sums
            acc_d += s.d2d_ee[alg]
            acc_c += s.cell_ee[alg]
        mean_d2d[alg] = acc_d / spec.num_runs
        mean_cell[alg] = acc_c / spec.num_runs

    if "energy_efficient" in spec.algorithms:
        divisor = float(mean_d2d["energy_efficient"].max())
    else:
        divisor = float(max(c.max() for c in mean_d2d.values()))
    if divisor <= 0:
        divisor = 1.0

    return AggregateResult(
        spec=spec,
        rounds=np.arange(length),
        mean_d2d_ee=mean_d2d,
        mean_cell_ee=mean_cell,
        norm_d2d_ee={a: c / divisor for a, c in mean_d2d.items()},
        norm_cell_ee={a: c / divisor for a, c in mean_cell.items()},
        normalization_divisor=divisor,
        convergence_rounds={a: [s.converged_round[a] for s in summaries]
                            for a in spec.algorithms},
        outage_counts={a: sum(s.outages[a] for s in summaries)
                       for a in spec.algorithms},
        run_summaries=summaries,
    )


def _run_single_star(args) -> RunSummary:
    return run_single(*args)


def _package_version() -> str:
    try:
        return importlib_metadata.version("d2d-ee")
    except importlib_metadata.PackageNotFoundError:
        return "unknown"


def results_csv_text(result: AggregateResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["algorithm", "round", "mean_d2d_ee", "mean_cell_ee",
                     "norm_d2d_ee", "norm_cell_ee"])
    for alg in result.spec.algorithms:
        for r in result.rounds:
            writer.writerow([
                alg, int(r),
                repr(float(result.mean_d2d_ee[alg][r])),
                repr(float(result.mean_cell_ee[alg][r])),
                repr(float(result.norm_d2d_ee[alg][r])),
                repr(float(result.norm_cell_ee[alg][r])),
            ])
    return buf.getvalue()


def metadata_yaml_text(result: AggregateResult) -> str:
    spec = result.spec
    doc = {
        "version": f"d2d-ee {_package_version()}",
        "scenario": spec.scenario.to_dict(),
        "game": {"max_rounds": spec.game.max_rounds,
                 "nash_power_tol": spec.game.nash_power_tol,
                 "ordering": spec.game.ordering},
        "experiment": {"num_runs": spec.num_runs,
                       "algorithms": list(spec.algorithms),
                       "master_seed": spec.master_seed},
        "normalization_divisor": result.normalization_divisor,
        "normalization_rule": "all curves divided by the maximum of the "
                              "energy-efficient D2D mean curve",
        "random_baseline": RANDOM_BASELINE_NOTE,
        "convergence_rounds": {a: list(v) for a, v in
                               result.convergence_rounds.items()},
        "outage_counts": dict(result.outage_counts),
    }
    return yaml.safe_dump(doc, sort_keys=True)


def per_run_csv_text(result: AggregateResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["algorithm", "run", "round", "d2d_ee", "cell_ee"])
    for alg in result.spec.algorithms:
        for run, s in enumerate(result.run_summaries):
            for r in result.rounds:
                writer.writerow([alg, run, int(r),
                                 repr(float(s.d2d_ee[alg][r])),
                                 repr(float(s.cell_ee[alg][r]))])
    return buf.getvalue()


def emit_outputs(result: AggregateResult, out_dir, verbose: bool = False,
                 figures: bool = True) -> list:
    """Write results.csv, metadata.yaml, optional per-run dump and figures."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc

    written = []

    def write(name: str, text: str):
        path = out / name
        try:
            path.write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
        written.append(path)

    write("results.csv", results_csv_text(result))
    write("metadata.yaml", metadata_yaml_text(result))
    if verbose:
        write("per_run.csv", per_run_csv_text(result))
    if figures:
        from .plots import render_figures
        written.extend(render_figures(result, out))
    return written
