"""Command-line front end: ``run`` a sweep from a config file, ``summarize`` a results CSV."""

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

from scripts.config import POLICIES, ConfigError, parse_config
from scripts.experiment import SummaryError, execute, summarize


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swarmcap", description="UAV swarm coverage/connectivity simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a simulation sweep")
    run.add_argument("--config", help="JSON config file")
    run.add_argument("--policy", choices=POLICIES)
    params = run.add_mutually_exclusive_group()
    params.add_argument("--beta", type=float, help="CAP connectivity threshold")
    params.add_argument("--f", type=float, help="CACOC2 flocking weight")
    run.add_argument("--uavs", type=int)
    run.add_argument("--speed", type=float)
    run.add_argument("--seeds", type=int, help="runs per sweep point")
    run.add_argument("--seed-base", type=int)
    run.add_argument("--out", help="output directory")
    run.add_argument("--timeseries", action="store_true", default=None, help="write per-run NCC/ANC samples")
    run.add_argument("--trace", action="store_true", default=None, help="write trajectories, hello log, field dump")
    run.add_argument("--jobs", type=int, help="worker processes (default: all cores)")
    run.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    summary = sub.add_parser("summarize", help="print a results table")
    summary.add_argument("--in", dest="input", required=True, help="runs.csv or summary.csv")
    return parser


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    """Map CLI flags onto config keys. A single --policy/--beta/--f pins that sweep axis."""
    overrides: Dict[str, Any] = {
        'runs_per_point': args.seeds,
        'seed_base': args.seed_base,
        'output_dir': args.out,
        'timeseries': args.timeseries,
        'trace': args.trace,
        'jobs': args.jobs,
        'log_level': args.log_level,
    }
    if args.policy is not None:
        overrides['policy'] = args.policy
        overrides['policies'] = [args.policy]
    if args.beta is not None:
        overrides['beta'] = args.beta
        overrides['betas'] = [args.beta]
    if args.f is not None:
        overrides['f'] = args.f
        overrides['fs'] = [args.f]
    if args.uavs is not None:
        overrides['n_uavs'] = args.uavs
        overrides['uav_counts'] = [args.uavs]
    if args.speed is not None:
        overrides['speed_mps'] = args.speed
        overrides['speeds'] = [args.speed]
    return overrides


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "summarize":
        try:
            print(summarize(args.input))
        except SummaryError as e:
            print(f"❌ {e}", file=sys.stderr)
            return 2
        return 0

    try:
        spec = parse_config(args.config, overrides_from_args(args))
    except ConfigError as e:
        print(f"❌ Invalid configuration: {e}", file=sys.stderr)
        return 2

    logging.basicConfig(
        level=getattr(logging, spec.log_level),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    try:
        return execute(spec)
    except ConfigError as e:
        print(f"❌ Invalid sweep point: {e}", file=sys.stderr)
        return 2
