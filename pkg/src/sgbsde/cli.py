"""Command line interface.

Exit codes: 0 success, 2 configuration error, 3 divergence.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import config as config_mod
from .harness import (
    REPRODUCE_HEADER, SUMMARY_HEADER, TARGETS, csv_text, reproduce, run_many, summary_rows, write_csv,
    z0_rows,
)
from .models import make_model
from .parametrization import write_coefficients
from .presets import PRESETS, get_preset
from .published import TABLE_BOUNDARY, TABLE_NO_BOUNDARY
from .reference import cole_hopf
from .sgd import DivergenceError
from .sparse_grid import count

EXIT_CONFIG = 2
EXIT_DIVERGED = 3


def _emit(args, header, rows):
    if getattr(args, "out", None):
        write_csv(args.out, header, rows)
    else:
        sys.stdout.write(csv_text(header, rows))


def cmd_grid_count(args):
    if args.table:
        rows = [["prewavelet", d, l, count(d, l, "prewavelet")] for d in TABLE_BOUNDARY for l in (3, 4, 5)]
        rows += [["modhat", d, l, count(d, l, "modhat")]
                 for d, cells in TABLE_NO_BOUNDARY.items() for l in cells]
        _emit(args, ["family", "dim", "level", "count"], rows)
        return 0
    if args.dim is None or args.level is None:
        raise config_mod.ConfigError("grid count", "--dim and --level are required without --table")
    print(count(args.dim, args.level, args.family))
    return 0


def _load_config(args):
    if args.config and args.preset:
        raise config_mod.ConfigError("solve", "give either --config or --preset, not both")
    if args.config:
        cfg = config_mod.load(args.config)
    elif args.preset:
        try:
            cfg = get_preset(args.preset)
        except KeyError as exc:
            raise config_mod.ConfigError("preset", exc.args[0]) from None
    else:
        raise config_mod.ConfigError("solve", "one of --config or --preset is required")
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.runs is not None:
        changes["runs"] = args.runs
    if args.M is not None:
        changes["M"] = args.M
    if args.euler_strict:
        changes["euler_strict"] = True
    if args.warm_start is not None:
        changes["warm_start"] = args.warm_start == "on"
    return cfg.with_(**changes) if changes else cfg


def cmd_solve(args):
    cfg = _load_config(args)
    if args.dump_config:
        sys.stdout.write(config_mod.emit(cfg))
        return 0
    summary = run_many(cfg)
    _emit(args, SUMMARY_HEADER, summary_rows(summary.reports))
    if args.z0_out:
        write_csv(args.z0_out, ["run", "l", "z0"], z0_rows(summary.reports))
    if args.coeffs_out:
        write_coefficients(summary.reports[0].coeffs, args.coeffs_out)
    if len(summary.reports) > 1:
        print(f"# mean y0 {summary.mean!r} 95% CI [{summary.ci_low!r}, {summary.ci_high!r}]", file=sys.stderr)
    return 0


def cmd_reference(args):
    model = make_model(args.model, args.dim, a=args.a, T=args.horizon)
    x = np.zeros(args.dim) if args.x is None else np.array([float(v) for v in args.x.split(",")])
    est = cole_hopf(model, args.t, x, args.samples, args.seed)
    header = ["y0", "ci_low", "ci_high"] + [f"z0_{i + 1}" for i in range(args.dim)]
    _emit(args, header, [[est.y0, est.ci_low, est.ci_high, *map(float, est.z0)]])
    return 0


def cmd_reproduce(args):
    try:
        rows = reproduce(args.target, runs=args.runs, seed=args.seed or 0, scale=args.scale)
    except KeyError as exc:
        raise config_mod.ConfigError("reproduce", exc.args[0]) from None
    _emit(args, REPRODUCE_HEADER, rows)
    return 0


def cmd_presets_list(args):
    for name, cfg in PRESETS.items():
        print(f"{name}\t{cfg.model} d={cfg.dim} {cfg.family} {cfg.method} M={cfg.M} P={cfg.P}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sgbsde", description="Sparse-grid SGD solvers for semilinear PDEs")
    sub = parser.add_subparsers(dest="command", required=True)

    grid = sub.add_parser("grid", help="sparse grid utilities")
    grid_sub = grid.add_subparsers(dest="grid_command", required=True)
    gc = grid_sub.add_parser("count", help="number of basis functions")
    gc.add_argument("--dim", type=int)
    gc.add_argument("--level", type=int)
    gc.add_argument("--family", default="prewavelet", choices=["prewavelet", "hat", "modhat"])
    gc.add_argument("--table", action="store_true", help="emit the tabulated counts as CSV")
    gc.add_argument("--out")
    gc.set_defaults(func=cmd_grid_count)

    solve = sub.add_parser("solve", help="run a configured experiment")
    solve.add_argument("--config")
    solve.add_argument("--preset")
    solve.add_argument("--seed", type=int)
    solve.add_argument("--runs", type=int, help="number of reseeded runs")
    solve.add_argument("--M", type=int, help="override the number of SGD steps")
    solve.add_argument("--out", help="summary CSV (default: stdout)")
    solve.add_argument("--z0-out", dest="z0_out")
    solve.add_argument("--coeffs-out", dest="coeffs_out")
    solve.add_argument("--euler-strict", action="store_true")
    solve.add_argument("--warm-start", choices=["on", "off"])
    solve.add_argument("--dump-config", action="store_true", help="print the resolved config and exit")
    solve.set_defaults(func=cmd_solve)

    ref = sub.add_parser("reference", help="Cole-Hopf Monte Carlo reference")
    ref.add_argument("--model", default="quadratic", choices=["quadratic"])
    ref.add_argument("--dim", type=int, default=5)
    ref.add_argument("--a", type=float, default=1.0)
    ref.add_argument("--horizon", type=float, default=1.0)
    ref.add_argument("--t", type=float, default=0.0)
    ref.add_argument("--x", help="comma-separated point (default: origin)")
    ref.add_argument("--samples", type=int, default=100_000)
    ref.add_argument("--seed", type=int, default=0)
    ref.add_argument("--out")
    ref.set_defaults(func=cmd_reference)

    rep = sub.add_parser("reproduce", help="compare against published numbers")
    rep.add_argument("target", help=", ".join(TARGETS))
    rep.add_argument("--runs", type=int)
    rep.add_argument("--seed", type=int)
    rep.add_argument("--scale", type=float, default=1.0, help="multiply the number of SGD steps")
    rep.add_argument("--out")
    rep.set_defaults(func=cmd_reproduce)

    pre = sub.add_parser("presets", help="shipped presets")
    pre_sub = pre.add_subparsers(dest="presets_command", required=True)
    pl = pre_sub.add_parser("list")
    pl.set_defaults(func=cmd_presets_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
