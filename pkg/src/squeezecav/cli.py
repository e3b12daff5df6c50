"""Command-line interface: squeezecav <mode> --config <file> [flags]."""

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError, SqueezecavError
from .scenario_runner import MODES, config_from_dict, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4

_SCHEMA_HELP = """\
config file (JSON object); command-line flags override its keys:

  mode          one of: evolve, steady, threshold, oracle-compare, figures
                (set by the positional argument)
  g_values      list of pump-to-loss ratios g >= 0
                required for every mode except figures
  delta_values  list of threshold fractions delta > 0 (threshold mode)
  tau_end       integration span in units of the cavity lifetime
                (defaults: evolve/threshold 20, oracle-compare 5)
  dtau          RK4 step size (default 1e-3)
  sample_every  output decimation factor (default 10)
  fock_dim      initial Fock truncation for oracle-compare (default 64)
  initial_state [u, phi, n_th] starting state (default vacuum)
  output_dir    output directory (default "out"; --out overrides)

outputs: one CSV per dataset plus manifest.json (parameters, file list,
invariant checks, failures).  Identical configs produce byte-identical
files.

exit codes: 0 success, 2 config error, 3 solver error, 4 I/O error.
"""


def build_parser():
    parser = argparse.ArgumentParser(
        prog="squeezecav",
        description="Squeezed light in a lossy cavity: trajectories, "
        "steady-state tables, threshold sweeps, master-equation "
        "cross-checks and figure datasets.",
        epilog=_SCHEMA_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("mode", choices=MODES, help="scenario to run")
    parser.add_argument("--config", type=Path, help="JSON config file")
    parser.add_argument("--out", help="output directory (overrides output_dir)")
    parser.add_argument("--dtau", type=float, help="override the step size")
    parser.add_argument("--tau-end", type=float, help="override the integration span")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    raw = {}
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as err:
            print(f"squeezecav: cannot read {args.config}: {err}", file=sys.stderr)
            return EXIT_IO
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as err:
            print(f"squeezecav: config is not valid JSON: {err}", file=sys.stderr)
            return EXIT_CONFIG
        if not isinstance(raw, dict):
            print("squeezecav: config must be a JSON object", file=sys.stderr)
            return EXIT_CONFIG
    raw["mode"] = args.mode
    if args.out is not None:
        raw["output_dir"] = args.out
    if args.dtau is not None:
        raw["dtau"] = args.dtau
    if args.tau_end is not None:
        raw["tau_end"] = args.tau_end

    try:
        config = config_from_dict(raw)
    except ConfigError as err:
        print(f"squeezecav: config error: {err}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        report = run_scenario(config)
    except ConfigError as err:
        print(f"squeezecav: config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"squeezecav: I/O error: {err}", file=sys.stderr)
        return EXIT_IO
    except SqueezecavError as err:
        print(f"squeezecav: solver error: {err}", file=sys.stderr)
        return EXIT_SOLVER

    for name in report.files:
        print(f"wrote {Path(config.output_dir) / name}")
    for failure in report.failures:
        print(
            f"squeezecav: {failure['unit']}: {failure['error']}: {failure['message']}",
            file=sys.stderr,
        )
    return EXIT_SOLVER if report.failures else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
