"""
Module that contains the WaveSplit run configuration and the functions
which execute each command line subcommand.
"""
############################################################################
#  wavesplitrun.py
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
# Purpose:  A RunConfig with one section per module, validated in full
#           before any computation, and one runner per subcommand. Every
#           run writes its artifacts atomically under the output
#           directory together with a manifest.json.
#
# History:
# Version 1.0 - Created.
# Version 1.1 - Band selection, cone statistics, trajectory CSV and NLS output times.
#
############################################################################

import copy
import dataclasses
import datetime
import json
import logging
import os
import platform
import sys
import time

import numpy
import scipy
import sqlalchemy

import wavesplitlib

from .wavesplitexception import WaveSplitException, WaveSplitValidationException
from .wavesplitflow import cone_input, cone_radius, cone_split, crossing_time, evolve_many
from .wavesplitgrid import (
    MIN_POINTS,
    annulus_bump,
    check_dimension,
    dual_frequency_grid,
    l2_norm,
    make_grid,
    read_function_csv,
    write_function_csv,
    write_trajectory_csv,
)
from .wavesplitkernels import bessel_identity_check, build_kernel_table, kernel_decay_slope
from .wavesplitnls import (
    CFL_LIMIT,
    NlsConfig,
    energy_drift,
    evolve_nls,
    mass_drift,
    morawetz_spacetime,
    run_sweep,
    scattering_run,
)
from .wavesplitrundb import RunLedger
from .wavesplittransform import DeformedParams, forward, working_params, write_spectrum
from .wavesplitutils import canonical_json, config_hash, write_csv_atomic, write_json_atomic, write_text_atomic
from .wavesplitverify import VerifyConfig, read_reports, run_all, summarise_reports, write_reports
from .wavesplitwaves import decompose, decompose_band, modified_components

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT_PATH = "./wavesplit_out"
MANIFEST_FILE = "manifest.json"

DEFAULT_CONFIG = {
    "grid": {"d": 3, "M": 1024, "r_max": 128.0, "layout": None},
    "kernels": {"r_min": 0.1, "r_max": 64.0, "n": 256},
    "transform": {"alpha": None, "beta": None, "kappa": None},
    "waves": {"band": "all", "modified": False, "s0": 0.9, "delta0": 0.1},
    "flow": {"times": [0.0, 0.25, 0.5, 1.0], "cone": None, "direction": "out", "check_escape": True},
    "nls": {
        "p": 3.0,
        "mu": 1.0,
        "dt": 0.01,
        "T": 8.0,
        "s0": 0.9,
        "delta0": 0.1,
        "sample_interval": 0.25,
        "out_times": None,
        "blowup_factor": 1e6,
        "initial": "out",
        "scatter": False,
        "direction": "forward",
        "sweep": [],
    },
    "verify": {"suites": ["all"], "resolution": "default", "corpus_size": 32, "kappa": None},
    "run": {
        "seed": 7,
        "output_dir": DEFAULT_OUTPUT_PATH,
        "threads": 1,
        "ledger": None,
        "input": None,
        "skip_existing": False,
    },
}

NLS_INITIAL_LIST = ["out", "plus", "raw"]


class RunConfig(object):
    """
    The full configuration of a run: a dict of sections, each a flat dict
    of keys whose defaults are DEFAULT_CONFIG.
    """

    def __init__(self, sections=None):
        self.sections = copy.deepcopy(DEFAULT_CONFIG)
        if sections is not None:
            self.update(sections)

    @classmethod
    def from_file(cls, config_file):
        """
        Read a JSON config file with the flat sections of DEFAULT_CONFIG.
        """
        try:
            with open(config_file, "r") as f:
                sections = json.load(f)
        except (OSError, ValueError) as e:
            raise WaveSplitValidationException(f"The config file '{config_file}' could not be read: {e}")
        if not isinstance(sections, dict):
            raise WaveSplitValidationException("A config file must hold a JSON object of sections.")
        return cls(sections)

    def update(self, sections):
        for section, values in sections.items():
            if section not in DEFAULT_CONFIG:
                raise WaveSplitValidationException(f"Config section '{section}' is not recognised.")
            if not isinstance(values, dict):
                raise WaveSplitValidationException(f"Config section '{section}' must be an object.")
            for key, value in values.items():
                self.set(section, key, value)

    def set(self, section, key, value):
        if section not in DEFAULT_CONFIG:
            raise WaveSplitValidationException(f"Config section '{section}' is not recognised.")
        if key not in DEFAULT_CONFIG[section]:
            raise WaveSplitValidationException(f"Config key '{section}.{key}' is not recognised.")
        self.sections[section][key] = value

    def get(self, section, key):
        return self.sections[section][key]

    def to_dict(self):
        return copy.deepcopy(self.sections)

    def hash(self):
        return config_hash(self.sections)

    @property
    def output_dir(self):
        return self.sections["run"]["output_dir"]

    def grid(self):
        g = self.sections["grid"]
        return make_grid(int(g["d"]), float(g["r_max"]), int(g["M"]), g["layout"])

    def nls_config(self):
        n = self.sections["nls"]
        return NlsConfig(
            d=int(self.sections["grid"]["d"]),
            p=float(n["p"]),
            mu=float(n["mu"]),
            dt=float(n["dt"]),
            T=float(n["T"]),
            s0=float(n["s0"]),
            delta0=float(n["delta0"]),
            sample_interval=float(n["sample_interval"]),
            out_times=None if n["out_times"] is None else tuple(float(t) for t in n["out_times"]),
            blowup_factor=float(n["blowup_factor"]),
            check_escape=bool(self.sections["flow"]["check_escape"]),
        )

    def verify_config(self):
        v = self.sections["verify"]
        return VerifyConfig(
            d=int(self.sections["grid"]["d"]),
            resolution=v["resolution"],
            corpus_size=int(v["corpus_size"]),
            kappa=v["kappa"],
            threads=int(self.sections["run"]["threads"]),
        )

    def suites(self):
        suites = self.sections["verify"]["suites"]
        if isinstance(suites, str):
            suites = [suites]
        if "all" in suites:
            return list(wavesplitlib.WAVESPLIT_SUITES_LIST)
        return list(suites)

    def band(self):
        """
        The dyadic band index of decompose, None for 'all'.
        """
        band = self.sections["waves"]["band"]
        if band is None or band == "all":
            return None
        try:
            k = int(band)
        except (TypeError, ValueError):
            raise WaveSplitValidationException(f"waves.band must be 'all' or an integer, not '{band}'.")
        if isinstance(band, float) and band != k:
            raise WaveSplitValidationException(f"waves.band must be 'all' or an integer, not '{band}'.")
        return k

    def cone(self):
        """
        The (j, k, delta) of the evolve-linear cone statistics, None when unset.
        """
        cone = self.sections["flow"]["cone"]
        if cone is None:
            return None
        if isinstance(cone, str):
            cone = cone.split(",")
        try:
            j, k, delta = cone
            j_int, k_int, delta = int(j), int(k), float(delta)
        except (TypeError, ValueError):
            raise WaveSplitValidationException(f"flow.cone must be j,k,delta, not '{cone}'.")
        if float(j) != j_int or float(k) != k_int:
            raise WaveSplitValidationException(f"flow.cone needs integer j and k, not '{cone}'.")
        if not 0.0 < delta <= 0.25:
            raise WaveSplitValidationException(f"flow.cone delta = {delta} must lie in (0, 1/4].")
        return j_int, k_int, delta

    def validate(self, subcommand):
        """
        Check every precondition of the subcommand before computing.
        """
        if subcommand not in wavesplitlib.WAVESPLIT_SUBCOMMANDS_LIST:
            raise WaveSplitValidationException(f"Subcommand '{subcommand}' is not recognised.")
        g = self.sections["grid"]
        check_dimension(g["d"])
        if int(g["M"]) < MIN_POINTS:
            raise WaveSplitValidationException(f"grid.M must be at least {MIN_POINTS}.")
        if not float(g["r_max"]) > 0:
            raise WaveSplitValidationException("grid.r_max must be positive.")
        if g["layout"] is not None and g["layout"] not in wavesplitlib.WAVESPLIT_GRID_LAYOUTS_LIST:
            raise WaveSplitValidationException(f"Grid layout '{g['layout']}' is not recognised.")
        if int(self.sections["run"]["threads"]) < 1:
            raise WaveSplitValidationException("run.threads must be at least 1.")
        kappa = self.sections["transform"]["kappa"]
        if kappa is not None and not float(kappa) > 0:
            raise WaveSplitValidationException("transform.kappa must be positive.")

        if subcommand == "kernels":
            k = self.sections["kernels"]
            if not 0 <= float(k["r_min"]) < float(k["r_max"]) or int(k["n"]) < 2:
                raise WaveSplitValidationException("kernels needs 0 <= r_min < r_max and n >= 2.")
        elif subcommand == "decompose":
            w = self.sections["waves"]
            if w["modified"] and not 0.0 < float(w["s0"]) < 1.0:
                raise WaveSplitValidationException("waves.s0 must lie in (0, 1).")
            self.band()
            self._transform_params()
        elif subcommand == "evolve-linear":
            flow = self.sections["flow"]
            times = flow["times"]
            if not times or not all(numpy.isfinite(float(t)) for t in times):
                raise WaveSplitValidationException("flow.times must be a non-empty list of finite times.")
            if flow["direction"] not in ("out", "in"):
                raise WaveSplitValidationException("flow.direction must be 'out' or 'in'.")
            self.cone()
        elif subcommand == "evolve-nls":
            n = self.sections["nls"]
            if n["initial"] not in NLS_INITIAL_LIST:
                raise WaveSplitValidationException(f"nls.initial must be one of {NLS_INITIAL_LIST}.")
            if n["direction"] not in ("forward", "backward"):
                raise WaveSplitValidationException("nls.direction must be 'forward' or 'backward'.")
            out_times = n["out_times"]
            if out_times is not None:
                if not out_times or not all(0.0 <= float(t) <= float(n["T"]) for t in out_times):
                    raise WaveSplitValidationException("nls.out_times must be a non-empty list of times in [0, T].")
            cfg = self.nls_config()
            cfg.validate()
            rho_max = dual_frequency_grid(self.grid()).rho_max
            if cfg.dt * rho_max**2 > CFL_LIMIT:
                raise WaveSplitValidationException(
                    f"nls.dt * rho_max^2 = {cfg.dt * rho_max ** 2:.3g} exceeds pi/2; reduce dt."
                )
            if n["scatter"] or n["sweep"]:
                cfg.check_window()
            for entry in n["sweep"]:
                unknown = set(entry) - {"p", "s0", "delta0"}
                if unknown:
                    raise WaveSplitValidationException(f"nls.sweep entries accept p, s0 and delta0, not {sorted(unknown)}.")
        elif subcommand == "verify":
            for name in self.suites():
                if name not in wavesplitlib.WAVESPLIT_SUITES_LIST:
                    raise WaveSplitValidationException(f"Suite '{name}' is not recognised.")
            self.verify_config().validate()
        elif subcommand == "report":
            if self.sections["run"]["input"] is None and self.sections["run"]["ledger"] is None:
                raise WaveSplitValidationException("report needs a reports JSON (--input) or a ledger (--ledger).")

    def _transform_params(self):
        t = self.sections["transform"]
        d = int(self.sections["grid"]["d"])
        default = working_params(d)
        alpha = default.alpha if t["alpha"] is None else float(t["alpha"])
        beta = default.beta if t["beta"] is None else float(t["beta"])
        params = DeformedParams(alpha, beta)
        params.check(d)
        return params


def versions():
    return {
        "wavesplit": wavesplitlib.__version__,
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
        "sqlalchemy": sqlalchemy.__version__,
        "python": platform.python_version(),
    }


class RunContext(object):
    """
    Output directory bookkeeping of one run.
    """

    def __init__(self, cfg):
        self.cfg = cfg
        self.output_dir = cfg.output_dir
        self.artifacts = []
        self.expected = []
        self.summary = {}

    def path(self, name):
        return os.path.join(self.output_dir, name)

    def expect(self, *names):
        self.expected.extend(names)

    def add(self, out_file):
        self.artifacts.append(os.path.relpath(out_file, self.output_dir))
        return out_file


def _load_input(cfg, default_factory):
    in_file = cfg.get("run", "input")
    if in_file is None:
        return default_factory(cfg.grid())
    if not os.path.exists(in_file):
        raise WaveSplitValidationException(f"Input file '{in_file}' does not exist.")
    return read_function_csv(in_file, int(cfg.get("grid", "d")), layout=cfg.get("grid", "layout"))


def reference_profile(grid):
    """
    The annulus bump on [1, 9] of amplitude 0.5 used as default data.
    """
    return annulus_bump(grid, 1.0, 9.0, amplitude=0.5)


def run_kernels(cfg, ctx):
    d = int(cfg.get("grid", "d"))
    k = cfg.sections["kernels"]
    args = numpy.linspace(float(k["r_min"]), float(k["r_max"]), int(k["n"]))
    ctx.expect("kernels.csv", "kernels.json")
    print("Tabulating the kernels J and K...")
    table = build_kernel_table(d, args)
    ctx.add(
        write_csv_atomic(
            ctx.path("kernels.csv"),
            ["r", "ReJ", "ImJ", "ReK", "ImK"],
            [table.arguments, table.J_values.real, table.J_values.imag, table.K_values.real, table.K_values.imag],
        )
    )
    check_r = args[(args > 0) & (args <= 32.0)]
    bessel = bessel_identity_check(d, check_r) if check_r.size > 1 else (None, None)
    summary = {
        "d": d,
        "n": int(args.size),
        "method": sorted(set(table.method_tags)),
        "decay_slope": kernel_decay_slope(d),
        "bessel_constant": bessel[0],
        "bessel_deviation": bessel[1],
    }
    ctx.add(write_json_atomic(ctx.path("kernels.json"), summary))
    ctx.summary = summary
    return 0


def run_decompose(cfg, ctx):
    f = _load_input(cfg, reference_profile)
    kappa = cfg.get("transform", "kappa")
    w = cfg.sections["waves"]
    ctx.expect("out.csv", "in.csv", "spectrum.csv")
    print("Decomposing into outgoing and incoming components...")
    band = cfg.band()
    if band is None:
        pair = decompose(f, kappa=kappa)
    else:
        pair = decompose_band(f, band, kappa=kappa)
    ctx.add(write_function_csv(ctx.path("out.csv"), pair.out_part))
    ctx.add(write_function_csv(ctx.path("in.csv"), pair.in_part))
    spec = forward(f, cfg._transform_params(), kappa=kappa)
    for out_file in write_spectrum(ctx.path("spectrum"), spec):
        ctx.add(out_file)
    summary = {
        "norm": l2_norm(f),
        "out_norm": l2_norm(pair.out_part),
        "in_norm": l2_norm(pair.in_part),
        "residual": l2_norm(pair.total - f),
        "band": pair.band,
    }
    if w["modified"]:
        ctx.expect("plus.csv", "minus.csv")
        mp = modified_components(f, float(w["s0"]), float(w["delta0"]), kappa=kappa)
        ctx.add(write_function_csv(ctx.path("plus.csv"), mp.plus_part))
        ctx.add(write_function_csv(ctx.path("minus.csv"), mp.minus_part))
        summary.update({"N": mp.N, "tail_norm": mp.tail_norm})
    ctx.add(write_json_atomic(ctx.path("decompose.json"), summary))
    ctx.summary = summary
    return 0


def _cone_statistics(f, cone, direction, times, check_escape):
    """
    Inside-cone fractions of the band-k outgoing and incoming parts of
    chi_{2^j} f after evolving by |t| towards +t ('out') or -t ('in').
    """
    j, k, delta = cone
    T = crossing_time(j, k)
    sample = sorted({abs(t) for t in times if t != 0.0}) or [T]
    parts = {side: cone_input(f, j, k, side) for side in ("out", "in")}
    cases = []
    for t in sample:
        fractions = {
            side: cone_split(part, j, k, delta, t, direction, check_escape=check_escape).inside_fraction
            for side, part in parts.items()
        }
        # The part moving away from the origin in this time direction is the one that leaves.
        leaving, staying = ("out", "in") if direction == "out" else ("in", "out")
        asym = fractions[staying] / fractions[leaving] if fractions[leaving] > 0 else None
        cases.append({
            "t": t,
            "tau": t / T,
            "radius": cone_radius(j, k, delta, t),
            "inside_out": fractions["out"],
            "inside_in": fractions["in"],
            "asymmetry": asym,
        })
    return {"j": j, "k": k, "delta": delta, "direction": direction, "crossing_time": T, "cases": cases}


def run_evolve_linear(cfg, ctx):
    f = _load_input(cfg, reference_profile)
    times = [float(t) for t in cfg.get("flow", "times")]
    cone = cfg.cone()
    check_escape = cfg.get("flow", "check_escape")
    ctx.expect("trajectory.csv", "evolve_linear.json")
    print(f"Evolving under the free flow to {len(times)} times...")
    evolved = evolve_many(f, times, kappa=cfg.get("transform", "kappa"), check_escape=check_escape)
    ctx.add(write_trajectory_csv(ctx.path("trajectory.csv"), times, evolved))
    norm0 = l2_norm(f)
    norms = [l2_norm(u) for u in evolved]
    drift = max(abs(n - norm0) for n in norms) / norm0 if norm0 > 0 else 0.0
    summary = {"times": times, "l2_norms": norms, "unitarity_drift": drift}
    if cone is not None:
        ctx.expect("cone.json")
        direction = cfg.get("flow", "direction")
        print(f"Measuring the {direction} cone of band {cone[1]} on the annulus 2^{cone[0]}...")
        stats = _cone_statistics(f, cone, direction, times, check_escape)
        ctx.add(write_json_atomic(ctx.path("cone.json"), stats))
        summary["cone_asymmetry"] = [c["asymmetry"] for c in stats["cases"]]
    ctx.add(write_json_atomic(ctx.path("evolve_linear.json"), summary))
    ctx.summary = summary
    return 0


def _nls_initial(cfg, f, nls_cfg):
    initial = cfg.get("nls", "initial")
    if initial == "raw":
        return f
    if initial == "plus":
        return modified_components(f, nls_cfg.s0, nls_cfg.delta0).plus_part
    return decompose(f, alias_tol=None).out_part


def run_evolve_nls(cfg, ctx):
    f = _load_input(cfg, reference_profile)
    nls_cfg = cfg.nls_config()
    n = cfg.sections["nls"]
    threads = int(cfg.get("run", "threads"))
    ctx.expect("nls.json", "u_final.csv", "snapshots.csv")
    if n["sweep"]:
        ctx.expect("sweep.json")
        configs = [dataclasses.replace(nls_cfg, **entry) for entry in n["sweep"]]
        print(f"Running a sweep of {len(configs)} scattering runs...")
        results = run_sweep(f, configs, threads)
        ctx.add(write_json_atomic(ctx.path("sweep.json"), results))

    print("Solving the nonlinear Schrodinger equation...")
    u0 = _nls_initial(cfg, f, nls_cfg)
    trajectory = evolve_nls(u0, nls_cfg)
    summary = {
        "d": nls_cfg.d,
        "p": nls_cfg.p,
        "mu": nls_cfg.mu,
        "dt": nls_cfg.dt,
        "T": nls_cfg.T,
        "times": [s.t for s in trajectory],
        "mass": [s.mass for s in trajectory],
        "energy": [s.energy for s in trajectory],
        "morawetz": [s.morawetz for s in trajectory],
        "mass_drift": mass_drift(trajectory),
        "energy_drift": energy_drift(trajectory),
        "morawetz_spacetime": morawetz_spacetime(trajectory, nls_cfg),
    }
    ctx.add(write_function_csv(ctx.path("u_final.csv"), trajectory[-1].u))
    ctx.add(write_trajectory_csv(ctx.path("snapshots.csv"), [s.t for s in trajectory], [s.u for s in trajectory]))
    if n["scatter"]:
        ctx.expect("u_plus.csv")
        print("Computing the scattering state...")
        report = scattering_run(f, nls_cfg, n["direction"])
        ctx.add(write_function_csv(ctx.path("u_plus.csv"), report.u_plus))
        summary["scattering"] = report.summary()
    ctx.add(write_json_atomic(ctx.path("nls.json"), summary))
    ctx.summary = {k: summary[k] for k in ("mass_drift", "energy_drift", "morawetz_spacetime")}
    return 0


def run_verify(cfg, ctx, json_file=None):
    seed = int(cfg.get("run", "seed"))
    suites = cfg.suites()
    out_file = json_file if json_file is not None else ctx.path("reports.json")
    ctx.expect(os.path.relpath(out_file, ctx.output_dir))
    print(f"Running the verification suites: {' '.join(suites)}")
    reports = run_all(seed, cfg.verify_config(), suites)
    ctx.add(write_reports(reports, out_file))
    for line in summarise_reports(reports):
        print(line)
    ctx.summary = {r.suite_name: r.passed for r in reports}
    return 0 if all(r.passed for r in reports) else 1


def run_report(cfg, ctx):
    lines = []
    in_file = cfg.get("run", "input")
    if in_file is not None:
        if not os.path.exists(in_file):
            raise WaveSplitValidationException(f"Reports file '{in_file}' does not exist.")
        try:
            reports = read_reports(in_file)
        except (ValueError, KeyError, TypeError) as e:
            raise WaveSplitValidationException(f"'{in_file}' is not a reports file: {e}")
        lines.extend(summarise_reports(reports))
    ledger_file = cfg.get("run", "ledger")
    if ledger_file is not None:
        ledger = RunLedger(ledger_file)
        ledger.ensure_db()
        for row in ledger.get_runs():
            lines.append(
                f"{row['run_id']}  {row['subcommand']:<14} {row['status']:<9} exit={row['exit_code']} "
                f"wall={row['wall_time']:.2f}s  {row['output_dir']}"
            )
        lines.append(f"{ledger.n_runs()} runs in the ledger.")
    ctx.expect("summary.txt")
    ctx.add(write_text_atomic(ctx.path("summary.txt"), "\n".join(lines) + "\n"))
    for line in lines:
        print(line)
    ctx.summary = {"lines": len(lines)}
    return 0


RUNNERS = {
    "kernels": run_kernels,
    "decompose": run_decompose,
    "evolve-linear": run_evolve_linear,
    "evolve-nls": run_evolve_nls,
    "verify": run_verify,
    "report": run_report,
}


def run_wavesplit(subcommand, cfg, debug_mode=False, json_file=None):
    """
    A function which runs one subcommand and returns its exit code.

    :param subcommand: one of wavesplitlib.WAVESPLIT_SUBCOMMANDS_LIST.
    :param cfg: RunConfig.
    :param debug_mode: re-raise errors after reporting them.
    :param json_file: reports file of the verify subcommand.
    :return: 0 success, 1 suite failure, 2 validation error, 3 numerical abort.

    """
    started = datetime.datetime.now(datetime.timezone.utc).isoformat()
    start = time.time()
    ctx = RunContext(cfg)
    exit_code = 3
    cfg_hash = cfg.hash()
    run_id = f"{subcommand}-{cfg_hash[:12]}-{started}"
    ledger = None
    try:
        cfg.validate(subcommand)
        ledger_file = cfg.get("run", "ledger")
        if ledger_file is not None:
            ledger = RunLedger(ledger_file)
            ledger.ensure_db()
            if cfg.get("run", "skip_existing"):
                done = [r for r in ledger.get_runs(subcommand, cfg_hash) if r["status"] == "complete"]
                if done:
                    print(f"A complete run with this configuration exists ({done[0]['run_id']}), skipping.")
                    ledger = None
                    exit_code = 0
                    return exit_code
        os.makedirs(ctx.output_dir, exist_ok=True)
        if subcommand == "verify":
            exit_code = run_verify(cfg, ctx, json_file)
        else:
            exit_code = RUNNERS[subcommand](cfg, ctx)
    except WaveSplitException as e:
        exit_code = e.exit_code
        print("Error: {}".format(e), file=sys.stderr)
        if debug_mode:
            raise
    except Exception as e:
        exit_code = 3
        print("Error: {}".format(e), file=sys.stderr)
        if debug_mode:
            raise
    finally:
        missing = [name for name in ctx.expected if name not in ctx.artifacts]
        if missing:
            print("Error: The following outputs were not generated:", file=sys.stderr)
            print(" ".join(missing), file=sys.stderr)
        wall_time = time.time() - start
        manifest = {
            "run_id": run_id,
            "subcommand": subcommand,
            "config": cfg.to_dict(),
            "config_hash": cfg_hash,
            "versions": versions(),
            "started": started,
            "wall_time": wall_time,
            "artifacts": sorted(ctx.artifacts),
            "summary": ctx.summary,
            "exit_code": exit_code,
            "output_dir": os.path.abspath(ctx.output_dir),
        }
        if os.path.isdir(ctx.output_dir):
            try:
                write_json_atomic(ctx.path(MANIFEST_FILE), manifest)
            except (OSError, ValueError) as e:
                print("Error: the manifest could not be written: {}".format(e), file=sys.stderr)
        if ledger is not None:
            ledger.add_run(manifest)
        logger.info("Run %s finished with exit code %d in %.2fs", run_id, exit_code, wall_time)
    return exit_code


def manifest_without_timestamps(manifest):
    """
    A copy of a manifest without the fields which change between identical runs.
    """
    out = copy.deepcopy(manifest)
    for key in ("run_id", "started", "wall_time"):
        out.pop(key, None)
    return canonical_json(out)


def print2ConsoleListEnvVars():
    """
    A function which lists the available environmental variables for WaveSplit.
    """
    for env_var, option in wavesplitlib.WAVESPLIT_ENV_VARS.items():
        print(f"{env_var:<22} in place of the {option} option")
    print("")
