"""Command line surface: `dara-alloc allocate|sweep|oracle|fit`"""
import argparse
import json
import logging
import os
import sys
from typing import List, Optional, Sequence

from dotenv import load_dotenv

from dara_alloc import errors, log_config
from dara_alloc.experiment import (AXES, POLICIES, ExperimentConfig, allocate, build_rab,
                                   normalize_objective, summarize, sweep, write_rows,
                                   write_summary)
from dara_alloc.metrics import utility
from dara_alloc.policies import EXHAUSTIVE_LIMIT, dara_allocate, optimal_exhaustive
from dara_alloc.rate_alloc import target_rates
from dara_alloc.utils import derive_seed
from dara_alloc.weights import fit_exponential, load_histogram, profile_from_histogram

log = logging.getLogger(__name__)

LOG_LEVEL_ENV = "DARA_LOG_LEVEL"


def _axis_values(axis: str, text: str) -> list:
    values = []
    for item in text.split(","):
        item = item.strip()
        if axis == "delta" and ":" in item:
            low, high = item.split(":", 1)
            values.append((float(low), float(high)))
        elif axis == "delta":
            values.append(float(item))
        else:
            values.append(int(item))
    return values


def _dump(document: dict):
    json.dump(document, sys.stdout, indent=2)
    sys.stdout.write("\n")


def cmd_allocate(args) -> int:
    config = ExperimentConfig.load(args.config)
    rab = build_rab(config, derive_seed(config.seed, 0))
    target = target_rates(rab, config.objective, config.budget)
    trace = None
    if args.policy == "dara":
        trace = dara_allocate(rab, target, config.dara)
        alloc = trace.allocation
    else:
        alloc = allocate(args.policy, rab, target, config.objective, config.dara)
    report = utility(rab, alloc, config.objective, target)
    document = {
        "scenario": config.scenario,
        "policy": args.policy,
        "N": rab.N,
        "T": rab.T,
        "allocation": list(alloc.slots),
        "target": list(target.r),
        "rates": list(report.per_sensor_rate.r),
        "normalized_rates": list(report.per_sensor_rate.v),
        "utilities": list(report.per_sensor_utility),
        "W": report.objective_value,
        "gap": list(report.gap_to_target),
        "gap_bound": report.gap_bound,
    }
    if args.trace:
        if trace is None:
            raise errors.ConfigError("--trace is only available for the dara policy")
        document["residuals"] = trace.residuals.tolist()
        document["indices"] = trace.indices.tolist()
    _dump(document)
    return 0


def cmd_sweep(args) -> int:
    config = ExperimentConfig.load(args.config)
    try:
        values = _axis_values(args.axis, args.values)
    except ValueError as err:
        raise errors.ConfigError(f"invalid {args.axis} values '{args.values}': {err}") from err
    rows = sweep(config, args.axis, values, repetitions=args.repetitions, workers=args.workers)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            write_rows(rows, fh)
        log.info("[CLI] Wrote %s result rows to %s", len(rows), args.output)
    else:
        write_rows(rows, sys.stdout)
    if args.summary:
        summary = summarize(rows)
        if args.normalize:
            summary = normalize_objective(summary)
        with open(args.summary, "w", newline="") as fh:
            write_summary(summary, fh)
    return 0


def cmd_oracle(args) -> int:
    config = ExperimentConfig.load(args.config)
    rab = build_rab(config, derive_seed(config.seed, 0))
    alloc, value = optimal_exhaustive(rab, config.objective, limit=args.limit)
    _dump({"scenario": config.scenario, "N": rab.N, "T": rab.T,
           "allocation": list(alloc.slots), "W": value})
    return 0


def cmd_fit(args) -> int:
    profile = profile_from_histogram(load_histogram(args.histogram, args.T))
    print(repr(fit_exponential(profile)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dara-alloc",
                                     description="Delay-aware TDMA slot allocation")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("allocate", help="allocate one block and print a JSON report")
    p.add_argument("config")
    p.add_argument("--policy", choices=POLICIES, default="dara")
    p.add_argument("--trace", action="store_true", help="include per-slot residuals and indices")
    p.set_defaults(handler=cmd_allocate)

    p = commands.add_parser("sweep", help="run a parameter sweep and write CSV rows")
    p.add_argument("config")
    p.add_argument("--axis", choices=AXES, required=True)
    p.add_argument("--values", required=True,
                   help="comma separated; a delta range is written low:high")
    p.add_argument("--repetitions", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output", help="CSV file, stdout when omitted")
    p.add_argument("--summary", help="CSV file for mean/min objective per scenario and policy")
    p.add_argument("--normalize", action="store_true",
                   help="add the per-policy max normalised objective to the summary")
    p.set_defaults(handler=cmd_sweep)

    p = commands.add_parser("oracle", help="exhaustive optimum of a tiny instance")
    p.add_argument("config")
    p.add_argument("--limit", type=int, default=EXHAUSTIVE_LIMIT)
    p.set_defaults(handler=cmd_oracle)

    p = commands.add_parser("fit", help="fit a discount factor to a deadline histogram")
    p.add_argument("histogram")
    p.add_argument("--T", type=int, default=None, help="fold deadlines beyond T slots")
    p.set_defaults(handler=cmd_fit)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    log_config.load_config(level=os.environ.get(LOG_LEVEL_ENV, "WARNING"))
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except errors.DaraError as err:
        log.error("[CLI] %s failed: %s", args.command, err.message)
        print(f"error: {err.message}", file=sys.stderr)
        return err.exit_code


def run(argv: List[str] = None):
    sys.exit(main(argv))


if __name__ == "__main__":
    run()
