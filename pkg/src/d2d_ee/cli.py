"""Command-line interface: run experiments, validate configs, run oracles."""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import yaml

from .config import ConfigError, ScenarioConfig
from .experiment import (ALGORITHMS, ExperimentSpec, emit_outputs,
                         run_experiment)
from .game import GameConfig
from .oracles import compare_cellular_bisection, compare_d2d_grid


def load_spec(path: str | None) -> ExperimentSpec:
    """Build an ExperimentSpec from a YAML config file (all sections optional)."""
    if path is None:
        return ExperimentSpec()
    doc = yaml.safe_load(Path(path).read_text()) or {}
    scenario = ScenarioConfig.from_dict(doc.get("scenario", {}))
    game = GameConfig(**doc.get("game", {}))
    exp = doc.get("experiment", {})
    return ExperimentSpec(
        scenario=scenario,
        game=game,
        num_runs=exp.get("num_runs", 1000),
        algorithms=tuple(exp.get("algorithms", ALGORITHMS)),
        master_seed=exp.get("master_seed", 0),
    )


def spec_to_yaml(spec: ExperimentSpec) -> str:
    doc = {
        "scenario": spec.scenario.to_dict(),
        "game": {"max_rounds": spec.game.max_rounds,
                 "nash_power_tol": spec.game.nash_power_tol,
                 "ordering": spec.game.ordering},
        "experiment": {"num_runs": spec.num_runs,
                       "algorithms": list(spec.algorithms),
                       "master_seed": spec.master_seed},
    }
    return yaml.safe_dump(doc, sort_keys=True)


def _cmd_check(args) -> int:
    try:
        spec = load_spec(args.config)
        spec.validate()
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 1
    print(spec_to_yaml(spec), end="")
    return 0


def _cmd_run(args) -> int:
    spec = load_spec(args.config)
    if args.runs is not None:
        spec = replace(spec, num_runs=args.runs)
    if args.seed is not None:
        spec = replace(spec, master_seed=args.seed)
    if args.algorithms is not None:
        spec = replace(spec, algorithms=tuple(args.algorithms.split(",")))
    try:
        spec.validate()
    except (ConfigError, ValueError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 1

    # fail on an unwritable destination before any computation
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        print(f"output path not writable: {exc}", file=sys.stderr)
        return 1

    result = run_experiment(spec, workers=args.workers)
    written = emit_outputs(result, out, verbose=args.verbose,
                           figures=not args.no_figures)
    for path in written:
        print(path)
    return 0


def _cmd_oracle(args) -> int:
    cell = compare_cellular_bisection(args.instances, args.seed)
    d2d = compare_d2d_grid(args.d2d_instances, args.seed + 1)
    worst_cell = max(c.rel_error for c in cell)
    worst_d2d = max(c.rel_error for c in d2d)
    print(f"cellular bisection oracle: {len(cell)} instances, "
          f"max rel error {worst_cell:.3e}")
    print(f"d2d grid oracle: {len(d2d)} instances, "
          f"max rel error {worst_d2d:.3e}")
    ok = worst_cell <= 1e-3 and worst_d2d <= 1e-3
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="d2dee",
        description="Energy-efficient D2D power-allocation game simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a Monte Carlo experiment")
    p_run.add_argument("--config", default=None, help="YAML config file")
    p_run.add_argument("--runs", type=int, default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--algorithms", default=None,
                       help=f"comma-separated subset of {','.join(ALGORITHMS)}")
    p_run.add_argument("--out", default="results")
    p_run.add_argument("--workers", type=int, default=1)
    p_run.add_argument("--verbose", action="store_true",
                       help="also dump per-run curves")
    p_run.add_argument("--no-figures", action="store_true")
    p_run.set_defaults(func=_cmd_run)

    p_check = sub.add_parser("check", help="validate a config and print "
                                           "resolved defaults")
    p_check.add_argument("--config", default=None)
    p_check.set_defaults(func=_cmd_check)

    p_oracle = sub.add_parser("oracle", help="run the solver-vs-oracle suite")
    p_oracle.add_argument("--instances", type=int, default=100)
    p_oracle.add_argument("--d2d-instances", type=int, default=50)
    p_oracle.add_argument("--seed", type=int, default=0)
    p_oracle.set_defaults(func=_cmd_oracle)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
