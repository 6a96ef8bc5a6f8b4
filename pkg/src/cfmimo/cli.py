"""Command-line entry point.

Subcommands:
  run    full Monte-Carlo pipeline, writes results/capacity/costs CSVs
  costs  cost-table reproduction only
  cdf    post-process an existing output directory into CDF CSV files

Configuration comes from --profile (shipped "paper" or "desk" files) or from
--config pointing at an INI-style file with [network], [pathloss] and
[experiment] sections whose keys mirror the config dataclasses; unknown keys
are rejected. --seed and --out override the file's master_seed/output_dir.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from . import costmodel
from .errors import ConfigurationError
from .harness import (
    load_config,
    load_profile,
    run_experiment,
    write_cdf_outputs,
    write_costs_csv,
    write_outputs,
)


def _add_common(parser):
    parser.add_argument("--config", help="path to an experiment config file")
    parser.add_argument("--profile", choices=("paper", "desk"), help="shipped config profile")
    parser.add_argument("--out", help="output directory (overrides the config)")
    parser.add_argument("--seed", type=int, help="master seed (overrides the config)")
    parser.add_argument("--verbose", "-v", action="count", default=0,
                        help="-v: progress, -vv: power-control traces")


def _resolve_config(args):
    if args.config and args.profile:
        raise ConfigurationError("config", "give either --config or --profile, not both")
    if args.config:
        cfg = load_config(args.config)
    elif args.profile:
        cfg = load_profile(args.profile)
    else:
        cfg = load_profile("desk")    # sane default; the full profile is opt-in
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, master_seed=args.seed)
    if args.out is not None:
        cfg = dataclasses.replace(cfg, output_dir=args.out)
    return cfg


def _setup_logging(verbosity):
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def cmd_run(args):
    cfg = _resolve_config(args)
    result = run_experiment(cfg)
    out = write_outputs(result, cfg.output_dir)
    write_cdf_outputs(out)
    print(f"wrote {len(result.records)} records to {out}")
    for skip in result.skips:
        print(f"setup {skip['setup']}: {skip['combiner']} {skip['reason']}")
    return 0


def cmd_costs(args):
    cfg = _resolve_config(args)
    net = cfg.network
    rows = costmodel.table_rows(net.M, net.K, net.L, net.N_a, net.tau_p, net.tau_u)
    print(costmodel.format_table(rows))
    if args.out is not None:
        from pathlib import Path

        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_costs_csv(rows, out / "costs.csv")
        print(f"wrote {out / 'costs.csv'}")
    return 0


def cmd_cdf(args):
    cfg = _resolve_config(args)
    produced = write_cdf_outputs(cfg.output_dir)
    for path in produced:
        print(f"wrote {path}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="cfmimo",
        description="Uplink cell-free massive MIMO Monte-Carlo simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, doc in (
        ("run", cmd_run, "run the full experiment pipeline"),
        ("costs", cmd_costs, "print and optionally write the cost table"),
        ("cdf", cmd_cdf, "compute CDF files from an existing output directory"),
    ):
        p = sub.add_parser(name, help=doc)
        _add_common(p)
        p.set_defaults(fn=fn)

    args = parser.parse_args(argv)
    _setup_logging(args.verbose)
    try:
        return args.fn(args)
    except (ConfigurationError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
