"""Command-line entry point: ``kerrmag {steady,critical,sweep,hysteresis,catalog}``.

Exit codes: 0 success, 1 usage or config error, 2 numeric failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

from . import __version__
from .config import RunConfig, read_entries
from .dynamics import find_jumps
from .errors import ConfigError, KerrMagError
from .experiments import (SweepVariable, catalog_entries, hysteresis_traces,
                          run_sweep)
from .nonreciprocity import critical_params
from .output import (HYSTERESIS_COLUMNS, SWEEP_COLUMNS, hysteresis_csv, metadata,
                     sweep_csv, write_table)
from .params import to_hz
from .steady_state import recover_branch, solve_quintic, quintic_coefficients

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _catalog_listing():
    return ", ".join(catalog_entries())


def resolve_config(args):
    """Config from --scenario / --config, then --set overrides."""
    entries = {}
    if getattr(args, "scenario", None) is not None:
        if not args.scenario:
            raise UsageError(f"empty scenario name; available: {_catalog_listing()}")
        cat = catalog_entries()
        if args.scenario not in cat:
            raise UsageError(f"unknown scenario {args.scenario!r}; "
                             f"available: {_catalog_listing()}")
        entries = dict(cat[args.scenario])
    lines = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            written, lines = read_entries(fh.read())
        # keys written in the file win over the scenario defaults
        entries.update(written)
    config = RunConfig.from_entries(entries, lines)
    if args.set:
        config = config.with_overrides(args.set)
    return config


def cmd_steady(args, out):
    config = resolve_config(args)
    params, drives = config.operating_point()
    margin = config.stability_margin(params.gamma_m)
    roots = solve_quintic(quintic_coefficients(params, drives), config.root_tolerances())
    print(f"{'M':>24} {'|a1s|^2':>24} {'|a2s|^2':>24} {'stability':>10} {'residual':>10}",
          file=out)
    for m in roots:
        b = recover_branch(params, drives, m, margin=margin)
        print(f"{b.m_num:24.16e} {abs(b.a1s) ** 2:24.16e} {abs(b.a2s) ** 2:24.16e} "
              f"{b.stability.value:>10} {b.residual:10.2e}", file=out)
    return EXIT_OK


def cmd_critical(args, out):
    config = resolve_config(args)
    spec = config.to_spec()
    params, template = spec.configure(spec.base_abscissa())
    cp = critical_params(params, template)
    mhz = 1e-6
    print(f"Jc0/2pi      = {to_hz(cp.j_c0) * mhz:.6f} MHz", file=out)
    print(f"lambda_c0/2pi = {to_hz(cp.lambda_c0) * mhz:.6f} MHz", file=out)
    print(f"Jc/2pi       = {to_hz(cp.j_c) * mhz:.6f} MHz", file=out)
    print(f"lambda_c/2pi  = {to_hz(cp.lambda_c) * mhz:.6f} MHz", file=out)
    print(f"Omega2/Omega1 = {cp.ratio:.12g}", file=out)
    if cp.magnon_drive_warning:
        print("warning: magnon drive is on; these conditions assume an undriven magnon",
              file=out)
    return EXIT_OK


def _out_path(args, config, suffix):
    return args.out or f"{config['name']}{suffix}.csv"


def cmd_sweep(args, out):
    config = resolve_config(args)
    spec = config.to_spec()
    records = run_sweep(spec, threads=args.threads, tol=config.root_tolerances(),
                        opts=config.integrator_options())
    path = _out_path(args, config, "")
    write_table(path, sweep_csv(records, spec.variable),
                metadata(config, "sweep", spec.variable, SWEEP_COLUMNS, __version__))
    print(f"wrote {len(records)} records to {path}", file=out)
    return EXIT_OK


def cmd_hysteresis(args, out):
    config = resolve_config(args)
    spec = config.to_spec()
    if spec.variable is not SweepVariable.POWER:
        raise UsageError("hysteresis needs variable = Power")
    which = config["drive"]
    if which == "both":
        raise UsageError("hysteresis drives one cavity; set drive = pdc or mc")
    xs, fwd, bwd = hysteresis_traces(spec, which, config.integrator_options())
    jf = find_jumps(fwd)
    # backward jumps are located in sweep order, then mapped to grid indices
    n = len(xs)
    jb = [n - 1 - i for i in find_jumps(bwd[::-1])]
    path = _out_path(args, config, "_hysteresis")
    write_table(path, hysteresis_csv(xs, fwd, bwd, jf, jb, spec.variable),
                metadata(config, "hysteresis", spec.variable, HYSTERESIS_COLUMNS,
                         __version__))
    print(f"wrote {n} points to {path}", file=out)
    return EXIT_OK


def cmd_catalog(args, out):
    for name, entry in catalog_entries().items():
        extras = ", ".join(f"{k}={v}" for k, v in entry.items() if k != "name")
        print(f"{name:6} {extras}", file=out)
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="kerrmag", description="Steady states, stability and nonreciprocity sweeps for the cavity-magnon chain.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, threads=False):
        p.add_argument("--config", metavar="PATH", help="key = value run file")
        p.add_argument("--scenario", metavar="NAME", help="built-in scenario, see catalog")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override one key (repeatable)")
        if threads:
            p.add_argument("--out", metavar="PATH", help="CSV path (default <name>.csv)")
            p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                           help="worker processes for root solving")

    common(sub.add_parser("steady", help="print every steady state at the operating point"))
    common(sub.add_parser("critical", help="print the reciprocity conditions"))
    common(sub.add_parser("sweep", help="run a scenario sweep to CSV"), threads=True)
    common(sub.add_parser("hysteresis", help="forward/backward ODE power sweep"),
           threads=True)
    sub.add_parser("catalog", help="list built-in scenarios")
    return parser


COMMANDS = {"steady": cmd_steady, "critical": cmd_critical, "sweep": cmd_sweep,
            "hysteresis": cmd_hysteresis, "catalog": cmd_catalog}


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, out)
    except (UsageError, ConfigError) as exc:
        print(f"kerrmag: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"kerrmag: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KerrMagError as exc:
        print(f"kerrmag: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
