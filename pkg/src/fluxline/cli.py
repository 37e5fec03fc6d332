"""Command-line front end.

Subcommands:
    modes     solve one configuration and emit the mode + couplings as JSON
    sweep     grid/diagonal sweep, CSV or JSON table
    twoqubit  sweep with the exact two-qubit exchange columns
    oracle    compare the analytic solver against the finite-difference one

Every subcommand takes --config (a file path or a bundled recipe name:
fig2, fig3, fig5, fig6) plus repeatable --set key=value overrides.

Exit codes: 0 success, 2 sweep finished with some failed points,
3 configuration error, 4 solver error.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources

from . import sweeps
from .config import ConfigError, load_config
from .errors import FluxlineError, OracleConvergenceError, RootNotFoundError
from .mode_solver import find_mode, mode_solution_to_dict
from .config import layout_from_config

EXIT_OK = 0
EXIT_PARTIAL = 2
EXIT_CONFIG = 3
EXIT_SOLVER = 4

RECIPES = ("fig2", "fig3", "fig5", "fig6")


def _resolve_config(name: str | None) -> str | None:
    """Map a recipe name to its bundled path; pass file paths through."""
    if name is None:
        return None
    if name in RECIPES or name in tuple(f"{r}.cfg" for r in RECIPES):
        stem = name.removesuffix(".cfg")
        return str(resources.files("fluxline").joinpath(f"recipes/{stem}.cfg"))
    return name


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="config file path or recipe name "
                        f"({', '.join(RECIPES)})")
    parser.add_argument("--set", dest="sets", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config entry")
    parser.add_argument("--out", help="output file path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fluxline",
        description="Modes and couplings of a capacitance-line loaded resonator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("modes", help="solve a single configuration")
    _add_common(p)
    p.add_argument("--profile-samples", type=int, default=None,
                   help="points in the exported current profile (default 4001)")

    p = sub.add_parser("sweep", help="design-space sweep")
    _add_common(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("twoqubit", help="sweep with two-qubit exchange output")
    _add_common(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("oracle", help="finite-difference cross-check")
    _add_common(p)
    p.add_argument("--grid-points", type=int, default=None)
    p.add_argument("--mode-index", type=int, default=None,
                   help="dump this eigenmode's profile as CSV to --out")
    p.add_argument("--refine", action="store_true",
                   help="include a grid-refinement order estimate")
    return parser


def _cmd_modes(args, cfg) -> int:
    report = sweeps.run_point(cfg)
    samples = args.profile_samples or cfg.get("profile_samples", 4001)
    layout = layout_from_config(cfg)
    mode = find_mode(layout, cfg.get("harmonic"))
    payload = {"report": report,
               "mode_solution": mode_solution_to_dict(mode, samples)}
    text = json.dumps(payload, indent=1)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def _cmd_sweep(args, cfg, two_qubit: bool) -> int:
    spec = sweeps.SweepSpec.from_config(cfg, two_qubit=two_qubit)
    table = sweeps.run_sweep(spec, workers=args.workers)
    if args.out:
        sweeps.export(table, args.format, args.out)
    else:
        for line in _table_lines(table):
            print(line)
    summary = {k: table.metadata.get(k)
               for k in ("points_total", "points_failed", "argmax_g", "argmax_abs_J")
               if table.metadata.get(k) is not None}
    print(json.dumps(summary), file=sys.stderr)
    if table.errors and table.rows:
        return EXIT_PARTIAL
    if table.errors:
        return EXIT_SOLVER
    return EXIT_OK


def _table_lines(table):
    yield ",".join(table.columns)
    for row in table.rows:
        yield ",".join(sweeps._format_cell(row[c]) for c in table.columns)


def _cmd_oracle(args, cfg) -> int:
    if args.mode_index is not None:
        if not args.out:
            raise ConfigError("--mode-index needs --out for the profile CSV")
        sweeps.dump_fd_profile(cfg, args.mode_index, args.out,
                               grid_points=args.grid_points)
        return EXIT_OK
    report = sweeps.run_oracle_check(cfg, grid_points=args.grid_points,
                                     refine=args.refine)
    text = json.dumps(report, indent=1)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_OK if report["passed"] else EXIT_SOLVER


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(_resolve_config(args.config), args.sets)
        if args.command == "modes":
            return _cmd_modes(args, cfg)
        if args.command == "sweep":
            return _cmd_sweep(args, cfg, two_qubit=False)
        if args.command == "twoqubit":
            return _cmd_sweep(args, cfg, two_qubit=True)
        if args.command == "oracle":
            return _cmd_oracle(args, cfg)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RootNotFoundError, OracleConvergenceError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except FluxlineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    raise SystemExit(main())
