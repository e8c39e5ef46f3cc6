"""Command-line entry point: run, sweep, list, validate."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import yaml

from .config import ConfigError, load_config
from .engine import SimulationError
from .harness import list_scenarios, run_canned, run_scenario, run_sweep_config
from .scenarios import CATALOG
from .simulation import Simulation

EXIT_OK, EXIT_CONFIG, EXIT_SIM = 0, 2, 3
OUT_ENV = "DCSIM_OUT"

log = logging.getLogger("dcsim")


def _out_dir(args) -> Path:
    return Path(args.out or os.environ.get(OUT_ENV, "out"))


def _is_canned(target: str) -> bool:
    return not Path(target).exists() and any(c.name == target for c in CATALOG)


def _print_report(stem: str, report) -> None:
    t = report.totals
    print(f"{stem}: delivered {t['bytes_delivered']} B, lost {t['segments_lost']} segments, "
          f"stall {t['stall_time_s']:.3f} s -> {report.trace_path}")


def cmd_run(args) -> int:
    out = _out_dir(args)
    if _is_canned(args.scenario):
        results = run_canned(args.scenario, out, seed=args.seed, fmt=args.format, jobs=args.jobs)
        for stem, res in results.items():
            if isinstance(res, list):
                print(f"{stem}: {len(res)} sweep points -> {out}")
            else:
                _print_report(stem, res)
        return EXIT_OK
    cfg = load_config(args.scenario)
    if cfg.sweep is not None:
        rows = run_sweep_config(cfg, out, seed=args.seed, jobs=args.jobs, fmt=args.format)
        print(f"{cfg.name}: {len(rows)} sweep points -> {out}")
        return EXIT_OK
    _print_report(cfg.name, run_scenario(cfg, out, seed=args.seed, fmt=args.format))
    return EXIT_OK


def cmd_sweep(args) -> int:
    out = _out_dir(args)
    if _is_canned(args.scenario):
        cfg = next(c for c in CATALOG if c.name == args.scenario).factory()
    else:
        cfg = load_config(args.scenario)
    if args.duration is not None:
        cfg = cfg.replace(duration_s=args.duration)
    rows = run_sweep_config(cfg, out, seed=args.seed, jobs=args.jobs, fmt=args.format)
    for r in rows:
        print(f"psi={r.psi_s:g} gamma={r.gamma_s:g} theta={r.theta_single:.4f} "
              f"dc={r.theta_dc_analytic:.4f} mc={r.theta_dc_empirical:.4f}")
    return EXIT_OK


def cmd_list(args) -> int:
    for info in list_scenarios():
        print(f"{info.name:26} {info.kind:5} {info.description}")
        print(f"{'':26} {'':5} reproduces: {info.anchor}")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = load_config(args.scenario)
    Simulation(cfg)
    print(f"{args.scenario}: ok")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dcsim", description="Dual-connectivity MPTCP discrete-event simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def outputs(p):
        p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        p.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or ./out)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")

    p = sub.add_parser("run", help="run a scenario file or a canned scenario")
    p.add_argument("scenario")
    outputs(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="availability sweep over (psi, gamma) points")
    p.add_argument("scenario")
    p.add_argument("--duration", type=float, default=None, help="override the simulated time per point (s)")
    outputs(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("list", help="list canned scenarios")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("validate", help="check a scenario file without running it")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, yaml.YAMLError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SimulationError, ValueError) as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return EXIT_SIM


if __name__ == "__main__":
    sys.exit(main())
