"""Command line entry point: ``chmsav <mode> [--config FILE] [--key value ...]``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields

from .experiments import (
    MODES,
    ConfigError,
    RunConfig,
    make_config,
    read_config_file,
    run_converge,
    run_invariants,
    run_simulate,
)
from .msav import StepFailure

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3

log = logging.getLogger("chmsav")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chmsav",
        description="Energy-preserving MSAV integrator for the Camassa-Holm equation.",
    )
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", help="key = value file (optional [section] headers)")
    parser.add_argument("--domain", help="a,b")
    parser.add_argument("--tau-list", dest="tau_list", help="comma-separated steps; L/k allowed")
    parser.add_argument("-v", "--verbose", action="store_true")
    for f in fields(RunConfig):
        if f.name in ("mode", "tau_list"):
            continue
        parser.add_argument(f"--{f.name}", dest=f.name, default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG

    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        values = read_config_file(args.config) if args.config else {}
        values.pop("mode", None)
        for key, value in vars(args).items():
            if key in ("config", "verbose", "mode") or value is None:
                continue
            values[key] = value
        values["mode"] = args.mode
        config = make_config(values)
    except (ConfigError, OSError) as exc:
        print(f"chmsav: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if config.mode == "simulate":
            result = run_simulate(config)
        elif config.mode == "invariants":
            result = run_invariants(config)
        else:
            result = run_converge(config)
    except StepFailure as exc:
        print(f"chmsav: solver failure at step {exc.n}: {exc.cause}", file=sys.stderr)
        return EXIT_SOLVER
    except ConfigError as exc:
        print(f"chmsav: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    for name, path in result.files.items():
        print(f"{name}: {path}")
    if result.max_drift:
        print("max relative drift: " + ", ".join(f"{k}={v:.3e}" for k, v in result.max_drift.items()))
    for tau, e2, o2, einf, oinf in result.rows:
        o2s = "-" if o2 is None else f"{o2:.2f}"
        oinfs = "-" if oinf is None else f"{oinf:.2f}"
        print(f"tau={tau:.6e}  e2={e2:.3e} ({o2s})  einf={einf:.3e} ({oinfs})")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
