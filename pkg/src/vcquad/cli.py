"""Command line entry point.

Exit codes: 0 on success, 2 when a run leaves the regular set (or the
requested geometry is not regular), 3 on a configuration error.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from pathlib import Path

from .errors import ConfigError, ControlError, InfeasibleEncountered, InfeasibleGeometry
from .harness import config as cfgmod
from .harness.csvlog import ARC_COLUMNS, fmt
from .harness.scenarios import DESCRIPTIONS, SCENARIOS, arc_rows, emit_arc_frames, load_spec, run_scenario
from .task import TaskSpec

EXIT_OK = 0
EXIT_IRREGULAR = 2
EXIT_CONFIG = 3

OUT_ENV = "VCQUAD_OUT"
DEFAULT_OUT_ROOT = "vcquad-runs"

log = logging.getLogger("vcquad")


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would collide with the
    # regularity-abort code
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vcquad", description="Pointing-task quadrotor simulations.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run a named scenario")
    run.add_argument("scenario", help="scenario name (see list-scenarios)")
    run.add_argument("--config", help="key = value config file")
    run.add_argument("--out", help=f"output directory (default ${OUT_ENV}/<scenario> or {DEFAULT_OUT_ROOT}/<scenario>)")
    run.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                     help="override one config value; may be repeated")
    run.add_argument("--print-config", action="store_true", help="print the resolved config and exit")

    sub.add_parser("list-scenarios", help="list scenario names")

    arc = sub.add_parser("emit-arc", help="write pointing frames along an arc as CSV")
    arc.add_argument("--r", type=float, default=0.9, help="arc radius [m]")
    arc.add_argument("--theta-min", type=float, default=20.0, help="start azimuth [deg]")
    arc.add_argument("--theta-max", type=float, default=150.0, help="end azimuth [deg]")
    arc.add_argument("--n", type=int, default=14, help="number of frames")
    arc.add_argument("--z0", type=float, default=TaskSpec().z0, help="arc altitude [m]")
    arc.add_argument("--out", help="CSV file (default: stdout)")
    return p


def _out_dir(args) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get(OUT_ENV) or DEFAULT_OUT_ROOT) / args.scenario


def _cmd_run(args) -> int:
    overrides = cfgmod.parse_overrides(args.overrides)
    if args.print_config:
        from .harness.scenarios import resolve_config

        file_values = cfgmod.load_file(args.config) if args.config else {}
        sys.stdout.write(cfgmod.dump(resolve_config(args.scenario, file_values, overrides)))
        return EXIT_OK
    spec = load_spec(args.scenario, args.config, overrides)
    out = _out_dir(args)
    art = run_scenario(spec, out)
    print(f"{spec.name}: wrote {len(art.csv_paths)} CSV and {len(art.svg_paths)} SVG files to {out}")
    for label, summ in art.summaries.items():
        parts = ", ".join(
            f"{k}={fmt(v) if isinstance(v, float) else v}"
            for k, v in summ.items()
            if k in ("max_e_pt", "max_e_z", "final_mu_z", "min_abs_s3", "min_rho", "feasible")
        )
        print(f"  {label}: {parts}")
    return EXIT_OK


def _cmd_list(args) -> int:
    width = max(map(len, SCENARIOS))
    for name in SCENARIOS:
        print(f"{name:<{width}}  {DESCRIPTIONS[name]}")
    return EXIT_OK


def _cmd_arc(args) -> int:
    try:
        spec = TaskSpec(z0=args.z0)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.n < 2 or not args.r > 0:
        raise ConfigError("emit-arc needs --n >= 2 and --r > 0")
    frames = emit_arc_frames(args.r, math.radians(args.theta_min), math.radians(args.theta_max), args.n, spec)
    lines = [",".join(ARC_COLUMNS)] + [",".join(fmt(x) for x in row) for row in arc_rows(frames)]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text, encoding="ascii")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        print(f"vcquad: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handler = {"run": _cmd_run, "list-scenarios": _cmd_list, "emit-arc": _cmd_arc}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"vcquad: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InfeasibleEncountered, InfeasibleGeometry, ControlError) as exc:
        print(f"vcquad: regularity abort: {exc}", file=sys.stderr)
        return EXIT_IRREGULAR


if __name__ == "__main__":
    sys.exit(main())
