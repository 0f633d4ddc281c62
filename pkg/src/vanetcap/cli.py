"""Command-line front end: ``vanetcap {analytic,sweep,presets}``.

Exit status: 0 success, 1 usage or validation error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys

from .analytic import cycle_capacity
from .highway import PARAM_FIELDS, NetworkParams, ParameterError, load_params
from .sweep import (
    DESK_PARAMS,
    PRESET_DENSITIES,
    PRESETS,
    QUANTITIES,
    SWEEP_VARS,
    SweepSpec,
    evaluate_point,
    run_sweeps,
    SweepWriter,
    sweep_metadata,
)

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("network parameters (override --config)")
    group.add_argument("--config", help="key = value file with NetworkParams fields")
    for name in PARAM_FIELDS:
        group.add_argument("--" + name.replace("_", "-"), dest=name, type=float, default=None)


def params_from_args(args: argparse.Namespace) -> NetworkParams:
    base = load_params(args.config, DESK_PARAMS) if args.config else DESK_PARAMS
    overrides = {k: getattr(args, k) for k in PARAM_FIELDS if getattr(args, k) is not None}
    return base.replace(**overrides)


def _parse_values(args) -> tuple:
    if args.values:
        return tuple(float(v) for v in args.values.split(","))
    if args.grid:
        start, stop, count = args.grid
        import numpy as np

        return tuple(np.linspace(float(start), float(stop), int(count)))
    raise UsageError("sweep needs --values, --grid or --preset")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vanetcap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_an = sub.add_parser("analytic", help="closed-form capacity breakdown for one scenario")
    p_an.add_argument("--output", "-o", required=True, help="CSV file to write")
    _add_param_flags(p_an)

    p_sw = sub.add_parser("sweep", help="sweep one parameter, analytic and/or simulated")
    p_sw.add_argument("--output", "-o", required=True, help="CSV file to write (plus <output>.meta)")
    p_sw.add_argument("--preset", choices=sorted(PRESETS), help="run a named figure preset")
    p_sw.add_argument("--var", choices=sorted(SWEEP_VARS), help="swept variable")
    p_sw.add_argument("--values", help="comma-separated, strictly increasing values")
    p_sw.add_argument("--grid", nargs=3, metavar=("START", "STOP", "COUNT"), help="linear grid")
    p_sw.add_argument("--modes", default="analytic", help="analytic, simulate or both (comma-separated)")
    p_sw.add_argument("--quantity", choices=QUANTITIES, default="capacity")
    p_sw.add_argument("--trials", type=int, default=None)
    p_sw.add_argument("--duration-s", type=float, default=None)
    p_sw.add_argument("--slot-s", type=float, default=None)
    p_sw.add_argument("--seed", type=int, default=0)
    _add_param_flags(p_sw)

    sub.add_parser("presets", help="list the named figure presets")
    return parser


def cmd_analytic(args) -> int:
    params = params_from_args(args)
    spec = SweepSpec("p", (params.voi_fraction,), base=params, modes=("analytic",))
    row = evaluate_point(spec, params.voi_fraction, params)
    with SweepWriter(args.output, sweep_metadata([spec])) as writer:
        writer.write(row)
    bd = cycle_capacity(params)
    for k, v in bd.as_row().items():
        print(f"{k:>24s}  {v}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.preset:
        specs = list(PRESETS[args.preset].sweeps)
        tweaks = {k: v for k, v in (("trials", args.trials), ("duration_s", args.duration_s),
                                    ("slot_s", args.slot_s)) if v is not None}
        if tweaks or args.seed:
            import dataclasses

            specs = [dataclasses.replace(s, seed=args.seed, **tweaks) for s in specs]
    else:
        if not args.var:
            raise UsageError("sweep needs --var (or --preset)")
        kw = {k: v for k, v in (("trials", args.trials), ("duration_s", args.duration_s),
                                ("slot_s", args.slot_s)) if v is not None}
        specs = [SweepSpec(
            args.var, _parse_values(args), base=params_from_args(args),
            modes=tuple(m.strip() for m in args.modes.split(",")),
            quantity=args.quantity, seed=args.seed, **kw,
        )]
    try:
        rows = run_sweeps(specs, args.output, preset=args.preset)
    except KeyboardInterrupt:
        print(f"interrupted; completed rows are in {args.output}", file=sys.stderr)
        return EXIT_RUNTIME
    failed = sum(1 for r in rows if r["error"])
    print(f"wrote {len(rows)} rows to {args.output} ({failed} failed)")
    return EXIT_RUNTIME if failed else EXIT_OK


def cmd_presets(args) -> int:
    print(f"densities are implementer-chosen: rho in {PRESET_DENSITIES} vehicles/m")
    for name, preset in PRESETS.items():
        s0 = preset.sweeps[0]
        print(f"{name:6s}  {preset.description}  [{len(preset.sweeps)} sweep(s), "
              f"modes={'+'.join(s0.modes)}, trials={s0.trials}]")
    return EXIT_OK


COMMANDS = {"analytic": cmd_analytic, "sweep": cmd_sweep, "presets": cmd_presets}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ParameterError, UsageError, ValueError) as exc:
        print(f"vanetcap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"vanetcap: runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
