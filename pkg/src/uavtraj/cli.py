"""Command-line front end: ``uavtraj run | sweep | replay``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import config as config_mod
from .config import ConfigError, SimConfig
from .records import dumps_scenario, loads_scenario, metrics_csv, sweep_csv, trace_csv
from .simulator import RunSummary, run_scenario, sweep
from .world import generate_scenario

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2

PARAM_CHOICES = {"coverage_radius": "coverage_radius", "obstacles": "obstacle_count", "velocity": "user_vmax"}


class _IOFailure(Exception):
    pass


def _load_config(path: str) -> SimConfig:
    try:
        return config_mod.load(path)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise ConfigError(f"config file {path} is not UTF-8 text") from None


def _write(path: Path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc.strerror}") from None


def sidecar(out: str | Path, kind: str) -> Path:
    """``metrics.csv`` -> ``metrics.<kind>.toml``."""
    out = Path(out)
    return out.with_name(f"{out.stem}.{kind}.toml")


def _print_summary(summary: RunSummary) -> None:
    for name, mean in summary.means.items():
        print(f"{name:<22} mean={mean:.6g} std={summary.stds[name]:.6g}")
    print(f"{'coverage_violations':<22} {summary.coverage_violations}")
    if summary.excluded_users:
        print(f"{'excluded_users':<22} {summary.excluded_users}")


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.algorithm is not None:
        changes["algorithm"] = args.algorithm
    if args.deterministic_fading:
        changes["deterministic_fading"] = True
    cfg = cfg.replace(**changes)
    scenario = generate_scenario(cfg, cfg.seed)
    summary = run_scenario(cfg, scenario, cfg.seed)
    _write(Path(args.out), metrics_csv(summary))
    _write(sidecar(args.out, "config"), config_mod.dumps(cfg))
    _write(sidecar(args.out, "scenario"), dumps_scenario(cfg, scenario, cfg.seed))
    if args.trace:
        _write(Path(args.trace), trace_csv(summary))
    _print_summary(summary)
    return EXIT_OK


def _parse_values(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--values must be a comma-separated list of numbers, got {text!r}") from None
    if not values:
        raise ConfigError("--values is empty")
    return values


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    values = _parse_values(args.values)
    if args.seeds < 1:
        raise ConfigError("--seeds must be at least 1")
    if args.workers < 1:
        raise ConfigError("--workers must be at least 1")
    algorithms = ("proposed", "baseline") if args.compare_baseline else (cfg.algorithm,)
    seeds = [cfg.seed + i for i in range(args.seeds)]
    try:
        cells = sweep(cfg, PARAM_CHOICES[args.param], values, seeds, algorithms, workers=args.workers)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    _write(Path(args.out), sweep_csv(cells))
    _write(sidecar(args.out, "config"), config_mod.dumps(cfg))
    print(f"wrote {len(cells)} rows to {args.out}")
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    try:
        text = Path(args.scenario).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"scenario file not found: {args.scenario}") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read scenario file {args.scenario}: {exc}") from None
    cfg, scenario, seed = loads_scenario(text)
    summary = run_scenario(cfg, scenario, seed)
    _write(Path(args.out), metrics_csv(summary))
    _print_summary(summary)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uavtraj", description="UAV trajectory planning simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one scenario and write per-slot metrics")
    p.add_argument("--config", required=True, help="TOML config file")
    p.add_argument("--seed", type=int)
    p.add_argument("--algorithm", choices=config_mod.ALGORITHMS)
    p.add_argument("--out", required=True, help="metrics CSV path")
    p.add_argument("--trace", help="optional plan trace CSV path")
    p.add_argument("--deterministic-fading", action="store_true", help="disable shadowing and small-scale fading")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="sweep one parameter over several seeds")
    p.add_argument("--config", required=True)
    p.add_argument("--param", required=True, choices=sorted(PARAM_CHOICES))
    p.add_argument("--values", required=True, help="comma-separated values, e.g. 0,10,20")
    p.add_argument("--seeds", type=int, default=1, help="number of seeds, starting at sim.seed")
    p.add_argument("--out", required=True)
    p.add_argument("--compare-baseline", action="store_true", help="run both planners on every cell")
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("replay", help="re-run a saved scenario file")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
