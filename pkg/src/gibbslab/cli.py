"""Command-line entry point.

Usage: gibbs-lab <experiment> [options].  Options layered over a JSON config
file and the registry defaults, with the command line winning.  Exit code 0
on success, 1 for configuration problems (unknown experiment, bad parameter,
unreadable config), 2 for runtime failures inside a simulation.
"""
from __future__ import annotations

import argparse
import sys

from .errors import ConfigurationError, GibbsLabError
from .harness import REGISTRY, load_config, resolve_parameters, run_experiment


class _Parser(argparse.ArgumentParser):
    # route usage mistakes through the standard exit-code contract
    def error(self, message):
        raise ConfigurationError(message)


def build_parser() -> _Parser:
    epilog_lines = ["experiments:"]
    for name in sorted(REGISTRY):
        epilog_lines.append(f"  {name:20s} {REGISTRY[name].description}")
    parser = _Parser(
        prog="gibbs-lab",
        description="desk-scale ideal-gas mixing and wave-packet experiments",
        epilog="\n".join(epilog_lines),
        formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("experiment", nargs="?", default=None,
                        help="experiment name (may come from the config file instead)")
    parser.add_argument("--config", default=None, metavar="PATH",
                        help="JSON config {experiment, parameters, output_dir}")
    parser.add_argument("--out", default=None, metavar="DIR",
                        help="output directory (default runs/<experiment>)")
    parser.add_argument("--seed", type=int, default=None,
                        help="master random seed")
    parser.add_argument("--n", type=int, default=None,
                        help="particles per side")
    parser.add_argument("--temperature", type=float, default=None,
                        help="thermostat temperature")
    parser.add_argument("--membrane-speed", type=float, default=None,
                        dest="membrane_speed", help="membrane drive speed")
    parser.add_argument("--mode", default=None,
                        help="mixing mode for mix-reversible")
    parser.add_argument("--no-figures", action="store_true",
                        help="skip PNG rendering")
    parser.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                        help="set any experiment parameter (repeatable)")
    return parser


def _cli_layer(args, experiment: str) -> dict:
    spec = REGISTRY[experiment]
    layer = {}
    for key in ("seed", "n", "temperature", "membrane_speed", "mode"):
        value = getattr(args, key)
        if value is None:
            continue
        if key not in spec.params:
            raise ConfigurationError(
                f"experiment {experiment!r} does not take --{key.replace('_', '-')}; "
                f"valid parameters: {sorted(spec.params)}")
        layer[key] = value
    if args.no_figures:
        layer["figures"] = False
    for item in args.param:
        key, sep, text = item.partition("=")
        if not sep:
            raise ConfigurationError(f"--param needs KEY=VALUE, got {item!r}")
        if key not in spec.params:
            raise ConfigurationError(
                f"experiment {experiment!r} has no parameter {key!r}; "
                f"valid parameters: {sorted(spec.params)}")
        try:
            layer[key] = spec.params[key].parse(text)
        except ValueError as exc:
            raise ConfigurationError(
                f"cannot parse --param {item!r}: {exc}") from exc
    return layer


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        file_experiment, file_params, file_out = None, {}, None
        if args.config is not None:
            file_experiment, file_params, file_out = load_config(args.config)
        experiment = args.experiment or file_experiment
        if experiment is None:
            raise ConfigurationError(
                "no experiment named on the command line or in the config; "
                f"available: {sorted(REGISTRY)}")
        if experiment not in REGISTRY:
            raise ConfigurationError(
                f"unknown experiment {experiment!r}; available: {sorted(REGISTRY)}")
        cli_params = _cli_layer(args, experiment)
        params = resolve_parameters(experiment, file_params, cli_params)
        out_dir = args.out or file_out or f"runs/{experiment}"
        run_experiment(experiment, params, out_dir)
        return 0
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except GibbsLabError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
