# simulator.py
# Command-line entry point: simulate, metrics, validate-scenario,
# generate-demands, schema.
#
# Exit codes: 0 success, 1 invalid scenario or demand data, 2 runtime or
# usage error.

import argparse
import json
import logging
import sys

import pandas as pd

from src.errors import DemandFormatError, ScenarioValidationError, SimulatorError
from src.scenario.config import Scenario, load_scenario
from src.scenario.demands import load_demands, write_demands
from src.scenario.metrics import compare_trajectories
from src.scenario.output import format_reports, write_reports, write_trajectory
from src.scenario.synthetic import generate_demands
from src.simulation.model import assemble
from src.simulation.runner import simulate

logger = logging.getLogger("simulator")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2


# ==================== COMMANDS ====================

def cmd_simulate(args):
    overrides = list(args.set)
    for flag, path in (("dt", "integrator.step"), ("method", "integrator.method"),
                       ("duration", "integrator.duration"), ("t0", "climate.t0")):
        value = getattr(args, flag)
        if value is not None:
            overrides.append(f"{path}={json.dumps(value)}")

    scenario = load_scenario(args.scenario, overrides)
    demands = load_demands(args.demands) if args.demands else None
    model, y0 = assemble(scenario, demands)
    trajectory = simulate(model, y0, scenario.integrator)
    write_trajectory(trajectory, args.out)

    stats = trajectory.stats
    print(f"{len(trajectory)} snapshots written to {args.out} "
          f"({stats['rhs_evals']} RHS evaluations, {stats['wall_time_s']:.1f} s, {stats['memory_mb']:.0f} MB)")
    return EXIT_OK


def cmd_metrics(args):
    measured = pd.read_csv(args.measured)
    simulated = pd.read_csv(args.simulated)
    reports = compare_trajectories(measured, simulated, args.columns, p=args.p)
    print(format_reports(reports))
    if args.report:
        write_reports(reports, args.report)
    return EXIT_OK


def cmd_validate(args):
    scenario = load_scenario(args.scenario)
    model, y0 = assemble(scenario)
    print(f"scenario {scenario.name!r} is valid: {len(model.consumers)} consumers, "
          f"{model.n_seg} pipe segments, {len(y0)} states")
    return EXIT_OK


def cmd_generate(args):
    scenario = load_scenario(args.scenario)
    series = [scenario.series_for(c) for c in scenario.consumer_ids()]
    frame = generate_demands(
        series, args.duration, step=args.step, peak_heating=args.peak_heating,
        peak_cooling=args.peak_cooling, t0=scenario.climate.t0, seed=args.seed, noise=args.noise,
    )
    write_demands(args.out, frame)
    print(f"{len(frame)} demand samples written to {args.out}")
    return EXIT_OK


def cmd_schema(args):
    print(json.dumps(Scenario.model_json_schema(by_alias=True), indent=2))
    return EXIT_OK


# ==================== PARSER ====================

def build_parser():
    parser = argparse.ArgumentParser(
        prog="simulator",
        description="Low-temperature district heating network with seasonal ice storage",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="run a scenario and write the trajectory CSV")
    p.add_argument("--scenario", required=True)
    p.add_argument("--demands", help="demand CSV (time_s,consumer_id,q_w)")
    p.add_argument("--out", required=True)
    p.add_argument("--dt", type=float, help="integrator step in s")
    p.add_argument("--method", choices=["euler", "explicit-euler", "rk4", "rk45", "adaptive-rk45"])
    p.add_argument("--duration", type=float, help="simulated time in s")
    p.add_argument("--t0", type=float, help="start time in s since 1 January 00:00")
    p.add_argument("--set", action="append", default=[], metavar="PATH=VALUE",
                   help="override a scenario field, e.g. soil.conductivity=1.8")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("metrics", parents=[common], help="NMBE / CVRMSE between two trajectory files")
    p.add_argument("--measured", required=True)
    p.add_argument("--simulated", required=True)
    p.add_argument("--columns", nargs="+", required=True)
    p.add_argument("--p", type=int, default=0, choices=[0, 1], help="degrees-of-freedom adjustment")
    p.add_argument("--report", help="write the reports as JSON")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("validate-scenario", parents=[common], help="check a scenario file")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("generate-demands", parents=[common], help="write a synthetic demand CSV for a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--duration", type=float, required=True)
    p.add_argument("--step", type=float, default=3600.0)
    p.add_argument("--peak-heating", type=float, default=5000.0)
    p.add_argument("--peak-cooling", type=float, default=1500.0)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("schema", parents=[common], help="print the scenario JSON schema")
    p.set_defaults(func=cmd_schema)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        return args.func(args)
    except (ScenarioValidationError, DemandFormatError) as exc:
        for line in getattr(exc, "errors", [str(exc)]):
            print(f"error: {line}", file=sys.stderr)
        return EXIT_INVALID
    except (SimulatorError, ValueError, OSError) as exc:
        logger.debug("command failed", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
