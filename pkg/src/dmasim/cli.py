"""Command-line entry point: ``dmasim run | check-grad | sweep``."""
from __future__ import annotations

import argparse
import itertools
import logging
import sys
import time

import yaml

from . import harness
from .harness import ConfigError

log = logging.getLogger("dmasim")


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1 rather than argparse's 2, which is reserved for runtime failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dmasim", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run a preset or configured scenario")
    run.add_argument("--config", help="flat YAML config file")
    run.add_argument("--scenario", help="fig2 | fig3 | fig4 | custom (or Fig2Sweep, Fig3Match, Fig4Coupling)")
    run.add_argument("--seed", type=int, help="master seed")
    run.add_argument("--trials", type=int)
    run.add_argument("--out", help="output path (stdout if omitted)")
    run.add_argument("--format", choices=("csv", "jsonl"))
    run.add_argument("--parallel", type=int, help=f"worker processes (default ${harness.WORKERS_ENV} or 1)")

    cg = sub.add_parser("check-grad", help="audit the closed-form DMA gradient against finite differences")
    cg.add_argument("--instances", type=int, default=20)
    cg.add_argument("--seed", type=int, default=0)
    cg.add_argument("--tol", type=float, default=1e-6)

    sw = sub.add_parser("sweep", help="cartesian grid over config keys")
    sw.add_argument("--config", help="flat YAML config file")
    sw.add_argument("--scenario")
    sw.add_argument("--grid", action="append", default=[], metavar="KEY=V1,V2,...",
                    help="values are parsed as YAML scalars; repeat for more keys")
    sw.add_argument("--seed", type=int)
    sw.add_argument("--trials", type=int)
    sw.add_argument("--out")
    sw.add_argument("--format", choices=("csv", "jsonl"))
    sw.add_argument("--parallel", type=int)
    return p


def _base_config(args, **extra):
    file_values = harness.load_config_file(args.config) if args.config else {}
    if not args.config and not args.scenario:
        raise ConfigError("missing required config field: scenario (give --config or --scenario)")
    return harness.make_config(args.scenario, file_values, master_seed=args.seed, trials=args.trials,
                               output=args.out, format=args.format, **extra)


def _write(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_run(args) -> int:
    cfg = _base_config(args)
    t0 = time.perf_counter()
    if cfg.scenario == "fig3":
        _write(harness.format_match_table(harness.match_fd_search(cfg, args.parallel)), cfg.output)
    else:
        records = harness.run_scenario(cfg, args.parallel)
        text = harness.emit_results(records, cfg.format)
        _write(text, cfg.output)
        failed = sum(bool(r.error) for r in records)
        if failed:
            log.warning("%d of %d rows carry an error code", failed, len(records))
    log.info("%s finished in %.1f s", cfg.scenario, time.perf_counter() - t0)
    return 0


def _parse_grid(items):
    grid = {}
    for item in items:
        key, sep, values = item.partition("=")
        if not sep or not values:
            raise ConfigError(f"bad --grid entry {item!r}; expected KEY=V1,V2")
        if key not in harness.FIELDS:
            raise ConfigError(f"unknown config key in --grid: {key}")
        grid[key] = [yaml.safe_load(v) for v in values.split(",")]
    return grid


def _cmd_sweep(args) -> int:
    grid = _parse_grid(args.grid)
    if not grid:
        raise ConfigError("sweep needs at least one --grid KEY=V1,V2")
    records = []
    for combo in itertools.product(*grid.values()):
        cfg = _base_config(args, **dict(zip(grid, combo)))
        records.extend(harness.run_scenario(cfg, args.parallel))
    _write(harness.emit_results(records, args.format or "csv"), args.out)
    return 0


def _cmd_check_grad(args) -> int:
    if args.instances < 1:
        raise ConfigError("--instances must be >= 1")
    t0 = time.perf_counter()
    worst = harness.gradient_check(args.instances, args.seed)
    ok = worst < args.tol
    print(f"instances={args.instances} max_rel_error={worst:.3e} tol={args.tol:g} "
          f"time={time.perf_counter() - t0:.2f}s {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 2


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": _cmd_run, "sweep": _cmd_sweep, "check-grad": _cmd_check_grad}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"dmasim: config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"dmasim: runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
