#! /usr/bin/env python

"""
Module that contains the WaveSplit command line interface.
"""

############################################################################
#  wavesplit.py
#
#  WaveSplit: incoming/outgoing decomposition of radial Schrodinger data.
#
#  WaveSplit is free software: you can redistribute it and/or modify
#  it under the terms of the GNU General Public License as published by
#  the Free Software Foundation, either version 3 of the License, or
#  (at your option) any later version.
#
#  WaveSplit is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#  GNU General Public License for more details.
#
#  You should have received a copy of the GNU General Public License
#  along with WaveSplit.  If not, see <http://www.gnu.org/licenses/>.
#
#
# Purpose:  The 'main' interface for WaveSplit: parses the subcommand and
#           its options, merges them over the config file and the
#           environment and hands the run to wavesplitlib.wavesplitrun.
#
# History:
# Version 1.0 - Created.
# Version 1.1 - Band selection, cone statistics, trajectory CSV and NLS output times.
#
############################################################################

import argparse
import logging
import os
import sys

import wavesplitlib
import wavesplitlib.wavesplitrun
from wavesplitlib import (
    WAVESPLIT_COPYRIGHT_NAMES,
    WAVESPLIT_COPYRIGHT_YEAR,
    WAVESPLIT_DIMENSIONS_LIST,
    WAVESPLIT_GRID_LAYOUTS_LIST,
    WAVESPLIT_RESOLUTIONS_LIST,
    WAVESPLIT_SUBCOMMANDS_LIST,
    WAVESPLIT_SUITES_LIST,
    WAVESPLIT_SUPPORT_EMAIL,
    WAVESPLIT_VERSION,
    WAVESPLIT_WEBSITE,
)
from wavesplitlib.wavesplitexception import WaveSplitException


def print_banner():
    print(
        f"WaveSplit {WAVESPLIT_VERSION} Copyright (C) {WAVESPLIT_COPYRIGHT_YEAR} "
        f"{WAVESPLIT_COPYRIGHT_NAMES}"
    )
    print("This program comes with ABSOLUTELY NO WARRANTY.")
    print("This is free software, and you are welcome to redistribute it")
    print(f"under certain conditions; See {WAVESPLIT_WEBSITE}.")
    print(f"Bugs are to be reported to {WAVESPLIT_SUPPORT_EMAIL}.\n")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="wavesplit.py",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        description="""Incoming/outgoing decomposition of radial data for
                       the Schrodinger equation, with free and nonlinear
                       evolution and the estimate verification suites.""",
    )
    # Request the version number.
    parser.add_argument(
        "-v", "--version", action="version", version=f"%(prog)s version {WAVESPLIT_VERSION}"
    )
    # List the environment variables and exit.
    parser.add_argument(
        "--envvars",
        action="store_true",
        default=False,
        help="List the environment variables which can be used in place of options.",
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", type=str, default=None, help="JSON config file with the run sections.")
    common.add_argument("-o", "--outpath", type=str, default=None, help="Directory for all outputs.")
    common.add_argument("-i", "--input", type=str, default=None, help="Input CSV (r,re,im) or reports JSON.")
    common.add_argument("--d", type=int, choices=WAVESPLIT_DIMENSIONS_LIST, default=None, help="Dimension.")
    common.add_argument("--M", type=int, default=None, help="Number of radial grid points.")
    common.add_argument("--rmax", type=float, default=None, help="Radial truncation r_max.")
    common.add_argument("--layout", type=str, choices=WAVESPLIT_GRID_LAYOUTS_LIST, default=None, help="Grid layout.")
    common.add_argument("--kappa", type=float, default=None, help="Transform normalisation (analytic value by default).")
    common.add_argument("--seed", type=int, default=None, help="Seed of the verification corpus.")
    common.add_argument("--threads", type=int, default=None, help="Maximum number of worker processes.")
    common.add_argument("--ledger", type=str, default=None, help="SQLite ledger file recording the runs.")
    common.add_argument(
        "--debug",
        action="store_true",
        default=False,
        help="Show debug logging and re-raise errors with their traceback.",
    )

    subparsers = parser.add_subparsers(dest="subcommand")

    p_kern = subparsers.add_parser("kernels", parents=[common], help="Tabulate the kernels J and K.")
    p_kern.add_argument("--rmin-kernel", type=float, default=None, help="Smallest kernel argument.")
    p_kern.add_argument("--rmax-kernel", type=float, default=None, help="Largest kernel argument.")
    p_kern.add_argument("--n", type=int, default=None, help="Number of kernel arguments.")

    p_dec = subparsers.add_parser("decompose", parents=[common], help="Split f into f_out and f_in.")
    p_dec.add_argument("--band", type=str, default=None, help="Dyadic band k, or 'all' for the whole decomposition.")
    p_dec.add_argument("--modified", action="store_true", default=False, help="Also write f_+ and f_-.")
    p_dec.add_argument("--s0", type=float, default=None, help="Regularity used to choose N.")
    p_dec.add_argument("--delta0", type=float, default=None, help="Tail size used to choose N.")
    p_dec.add_argument("--alpha", type=float, default=None, help="Deformation exponent alpha.")
    p_dec.add_argument("--beta", type=float, default=None, help="Deformation exponent beta.")

    p_lin = subparsers.add_parser("evolve-linear", parents=[common], help="Free Schrodinger evolution.")
    lin_times = p_lin.add_mutually_exclusive_group()
    lin_times.add_argument("--t", type=float, default=None, help="A single evolution time.")
    lin_times.add_argument("--times", type=float, nargs="+", default=None, help="Evolution times.")
    p_lin.add_argument("--cone", type=str, default=None, metavar="j,k,delta",
                       help="Also measure the cone of band k on the annulus 2^j with aperture delta.")
    p_lin.add_argument("--direction", type=str, choices=["out", "in"], default=None,
                       help="Cone direction: forward (out) or backward (in) in time.")
    p_lin.add_argument("--no-escape-check", action="store_true", default=False, help="Skip the boundary check.")

    p_nls = subparsers.add_parser("evolve-nls", parents=[common], help="Radial NLS evolution.")
    p_nls.add_argument("--p", type=float, default=None, help="Power of the nonlinearity (0 is linear).")
    p_nls.add_argument("--mu", type=float, choices=[1.0, -1.0], default=None, help="+1 defocusing, -1 focusing.")
    p_nls.add_argument("--dt", type=float, default=None, help="Time step.")
    p_nls.add_argument("--T", type=float, default=None, help="Final time.")
    p_nls.add_argument("--s0", type=float, default=None, help="Regularity used to choose N.")
    p_nls.add_argument("--delta0", type=float, default=None, help="Tail size used to choose N.")
    p_nls.add_argument("--out-times", type=float, nargs="+", default=None,
                       help="Times of the recorded snapshots (every sample interval by default).")
    p_nls.add_argument("--initial", type=str, choices=wavesplitlib.wavesplitrun.NLS_INITIAL_LIST, default=None,
                       help="Initial data: outgoing part, modified f_+ or the raw input.")
    p_nls.add_argument("--scatter", action="store_true", default=False, help="Also compute u_+ and the deficits.")
    p_nls.add_argument("--direction", type=str, choices=["forward", "backward"], default=None,
                       help="Time direction of the scattering run.")

    p_ver = subparsers.add_parser("verify", parents=[common], help="Run the estimate verification suites.")
    p_ver.add_argument("--suite", type=str, nargs="+", choices=["all"] + WAVESPLIT_SUITES_LIST, default=None,
                       help="Suites to run.")
    p_ver.add_argument("--resolution", type=str, choices=WAVESPLIT_RESOLUTIONS_LIST, default=None,
                       help="Grid resolution preset of the suites.")
    p_ver.add_argument("--corpus-size", type=int, default=None, help="Number of corpus functions.")
    p_ver.add_argument("--json", type=str, default=None, help="Reports file (reports.json in the output directory by default).")

    subparsers.add_parser("report", parents=[common], help="Summarise a reports JSON and/or the run ledger.")
    return parser


def _env_default(value, env_var, name, convert=str):
    if value is not None:
        return value
    env_value = os.environ.get(env_var, None)
    if env_value is None:
        return None
    print(f"Taking {name} from environment variable.")
    return convert(env_value)


def config_from_args(args):
    """
    Build the RunConfig: defaults, then the config file, then the options.
    """
    if args.config is not None:
        cfg = wavesplitlib.wavesplitrun.RunConfig.from_file(args.config)
    else:
        cfg = wavesplitlib.wavesplitrun.RunConfig()

    args.outpath = _env_default(args.outpath, "WAVESPLIT_OUTPUT_PATH", "output path")
    args.threads = _env_default(args.threads, "WAVESPLIT_THREADS", "thread count", int)
    args.ledger = _env_default(args.ledger, "WAVESPLIT_LEDGER", "ledger file")

    overrides = [
        ("run", "output_dir", args.outpath),
        ("run", "input", args.input),
        ("run", "seed", args.seed),
        ("run", "threads", args.threads),
        ("run", "ledger", args.ledger),
        ("grid", "d", args.d),
        ("grid", "M", args.M),
        ("grid", "r_max", args.rmax),
        ("grid", "layout", args.layout),
        ("transform", "kappa", args.kappa),
    ]
    sub = args.subcommand
    if sub == "kernels":
        overrides += [
            ("kernels", "r_min", args.rmin_kernel),
            ("kernels", "r_max", args.rmax_kernel),
            ("kernels", "n", args.n),
        ]
    elif sub == "decompose":
        overrides += [
            ("waves", "band", args.band),
            ("waves", "modified", True if args.modified else None),
            ("waves", "s0", args.s0),
            ("waves", "delta0", args.delta0),
            ("transform", "alpha", args.alpha),
            ("transform", "beta", args.beta),
        ]
    elif sub == "evolve-linear":
        overrides += [
            ("flow", "times", [args.t] if args.t is not None else args.times),
            ("flow", "cone", args.cone),
            ("flow", "direction", args.direction),
            ("flow", "check_escape", False if args.no_escape_check else None),
        ]
    elif sub == "evolve-nls":
        overrides += [
            ("nls", "p", args.p),
            ("nls", "mu", args.mu),
            ("nls", "dt", args.dt),
            ("nls", "T", args.T),
            ("nls", "s0", args.s0),
            ("nls", "delta0", args.delta0),
            ("nls", "out_times", args.out_times),
            ("nls", "initial", args.initial),
            ("nls", "scatter", True if args.scatter else None),
            ("nls", "direction", args.direction),
        ]
    elif sub == "verify":
        overrides += [
            ("verify", "suites", args.suite),
            ("verify", "resolution", args.resolution),
            ("verify", "corpus_size", args.corpus_size),
            ("verify", "kappa", args.kappa),
        ]
    for section, key, value in overrides:
        if value is not None:
            cfg.set(section, key, value)
    return cfg


def main(argv=None):
    """
    The command line entry point.

    :param argv: argument list (sys.argv[1:] when None).
    :return: exit code (0 success, 1 suite failure, 2 usage or validation
             error, 3 numerical abort).

    """
    argv = sys.argv[1:] if argv is None else list(argv)
    print_banner()
    parser = build_parser()
    if len(argv) == 0:
        print("wavesplit.py <subcommand> [options]")
        print("help : wavesplit.py --help")
        print("")
        print("Example: wavesplit.py decompose --d 3 --input f.csv -o ./out")
        print("Example: wavesplit.py evolve-nls --d 3 --p 3 --mu 1 --T 8 -o ./nls")
        print("Example: wavesplit.py verify --suite all --seed 7 --json reports.json\n")
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2

    if args.envvars:
        wavesplitlib.wavesplitrun.print2ConsoleListEnvVars()
        return 0
    if args.subcommand is None:
        print("Error: a subcommand is needed, one of: " + ", ".join(WAVESPLIT_SUBCOMMANDS_LIST), file=sys.stderr)
        return 2

    logging.basicConfig(
        level=logging.DEBUG if args.debug else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = config_from_args(args)
    except (WaveSplitException, ValueError) as e:
        print("Error: {}".format(e), file=sys.stderr)
        if args.debug:
            raise
        return 2

    json_file = getattr(args, "json", None)
    exit_code = wavesplitlib.wavesplitrun.run_wavesplit(args.subcommand, cfg, args.debug, json_file)
    print(f"Outputs in '{cfg.output_dir}' (exit code {exit_code}).")
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
