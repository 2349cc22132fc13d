"""``vexlp`` command line.

Exit codes: 0 on success, 1 when ``--strict`` is given and a record has
negative slack, 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import sys

from vexlp.harness.config import EXPERIMENTS, ConfigError, default_config, load_config
from vexlp.harness.experiments import run_experiment, write_plots
from vexlp.harness.report import write_bundle

log = logging.getLogger("vexlp")

# Sweeps whose ranges have no sensible default.
CONFIG_REQUIRED = ("translate-sweep", "thm2", "thm2-strong", "conv-corollary")

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML experiment config")
    p.add_argument("--out", help="output directory (overrides the config)")
    p.add_argument("--seed", type=int)
    p.add_argument("--grid-n", type=int, choices=(1, 2), help="spatial dimension")
    p.add_argument("--grid-points", type=int, help="points per axis (power of two)")
    p.add_argument("--half-width", type=float, help="box half-width L")
    p.add_argument("--strict", action="store_true", help="exit 1 if any slack is below -tolerances.slack")
    p.add_argument("--plots", action="store_true", help="write SVG charts where supported")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vexlp", description="Variable-exponent Lebesgue space experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    run = sub.add_parser("run", help="run the experiment named in a config file")
    run.add_argument("config_path", metavar="CONFIG")
    _add_common(run)
    for name in EXPERIMENTS:
        _add_common(sub.add_parser(name, help=f"run the {name} experiment"))
    return parser


def _violations(bundle, slack_tol: float) -> list[dict]:
    return [r for r in bundle.rows if r.get("slack") is not None and r["slack"] < -slack_tol]


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    try:
        if args.command == "run":
            cfg = load_config(args.config_path)
        elif args.config:
            cfg = load_config(args.config, experiment=args.command)
        elif args.command in CONFIG_REQUIRED:
            parser.print_usage(sys.stderr)
            print(f"vexlp: error: {args.command} requires --config", file=sys.stderr)
            return EXIT_USAGE
        else:
            cfg = default_config(args.command)
        cfg = cfg.with_overrides(
            dimension=args.grid_n,
            points=args.grid_points,
            half_width=args.half_width,
            seed=args.seed,
            output_dir=args.out,
            plots=True if args.plots else None,
        )
    except ConfigError as exc:
        print(f"vexlp: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        bundle = run_experiment(cfg)
    except ValueError as exc:
        # Grid or parameter combinations that only fail once objects are built.
        print(f"vexlp: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = write_bundle(bundle, cfg.output_dir)
    if cfg.plots:
        write_plots(bundle, out)
    s = bundle.summary
    print(f"{cfg.experiment}: {s['rows']} rows, min_slack={s['min_slack']}, max_ratio={s['max_ratio']} -> {out}")

    bad = _violations(bundle, cfg.tolerances.slack)
    for row in bad[:20]:
        print(f"violation: {row}", file=sys.stderr)
    if bad and args.strict:
        return EXIT_VIOLATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
