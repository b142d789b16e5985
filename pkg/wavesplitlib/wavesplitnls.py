"""
Module that contains the split-step solver for the radial NLS
i u_t + Laplacian u = mu |u|^p u, its monitors and the scattering
diagnostics.
"""
############################################################################
#  wavesplitnls.py
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
# Purpose:  Strang splitting: half nonlinear phase, exact linear step on
#           the orthogonal radial transform, half nonlinear phase. Mass,
#           energy, the Lin-Strauss Morawetz functional, the X_N norm and
#           the scattering state u_+ = e^{-iT Laplacian} u(T).
#
# History:
# Version 1.0 - Created.
#
############################################################################

import logging
import math
from dataclasses import dataclass, field, replace
from multiprocessing import Pool
from typing import Optional

import numpy
import scipy.integrate

from .wavesplitexception import (
    WaveSplitBlowUpException,
    WaveSplitValidationException,
)
from .wavesplitflow import _check_escape, evolve_linear, evolve_many, sum_space_split
from .wavesplitgrid import SPHERE_MEASURE, RadialFunction, check_dimension, l2_norm, weighted_sup
from .wavesplittransform import STANDARD_PARAMS, forward, get_plan, radial_derivative, spectrum_sobolev_norm
from .wavesplitwaves import modified_components

logger = logging.getLogger(__name__)

BLOWUP_FACTOR = 1e6
ESCAPE_TOL = 1e-6
CFL_LIMIT = 0.5 * numpy.pi
DEFAULT_SAMPLE_INTERVAL = 0.25


def critical_regularity(d, p):
    """
    s_c = d/2 - 2/p
    """
    return 0.5 * d - 2.0 / p


def strichartz_exponent_r0(d, p):
    """
    r_0 = p + 2 + 2/(d - 2)
    """
    return p + 2.0 + 2.0 / (d - 2)


def alpha_dp(d, p):
    """
    alpha(d, p) = d / (r_0 (d - 2))
    """
    return d / (strichartz_exponent_r0(d, p) * (d - 2))


@dataclass(frozen=True)
class NlsConfig:
    d: int = 3
    p: float = 3.0
    mu: float = 1.0
    dt: float = 0.01
    T: float = 8.0
    s0: float = 0.9
    delta0: float = 0.1
    out_times: Optional[tuple] = None
    sample_interval: float = DEFAULT_SAMPLE_INTERVAL
    blowup_factor: float = BLOWUP_FACTOR
    escape_tol: float = ESCAPE_TOL
    check_escape: bool = True

    def validate(self, fgrid=None):
        check_dimension(self.d)
        if self.p < 0:
            raise WaveSplitValidationException(f"p = {self.p} must be non-negative.")
        if self.mu not in (1.0, -1.0):
            raise WaveSplitValidationException(f"mu = {self.mu} must be +1 or -1.")
        if not self.dt > 0:
            raise WaveSplitValidationException("dt must be positive.")
        if self.T < 0:
            raise WaveSplitValidationException("T must be non-negative.")
        if fgrid is not None and self.dt * fgrid.rho_max**2 > CFL_LIMIT:
            raise WaveSplitValidationException(
                f"dt * rho_max^2 = {self.dt * fgrid.rho_max ** 2:.3g} exceeds pi/2; reduce dt."
            )

    def check_window(self):
        """
        Scattering runs need 4/d < p < 4/(d-2); p = 0 is the linear control.
        """
        if self.p == 0:
            return
        lo, hi = 4.0 / self.d, 4.0 / (self.d - 2)
        if not lo < self.p < hi:
            raise WaveSplitValidationException(
                f"p = {self.p} is outside the window ({lo:g}, {hi:g}) for d = {self.d}."
            )

    @property
    def n_steps(self):
        return int(round(self.T / self.dt))

    def output_steps(self):
        """
        Step indices of the output times (always including 0 and the end).
        """
        n = self.n_steps
        if self.out_times is None:
            every = max(1, int(round(self.sample_interval / self.dt)))
            steps = set(range(0, n + 1, every))
        else:
            steps = {min(n, max(0, int(round(t / self.dt)))) for t in self.out_times}
        steps.update({0, n})
        return sorted(steps)


@dataclass(frozen=True, eq=False)
class SolverState:
    t: float
    u: RadialFunction = field(repr=False)
    mass: float
    energy: float
    morawetz: float = 0.0
    step_count: int = 0


@dataclass(frozen=True, eq=False)
class ScatterReport:
    u_plus: RadialFunction = field(repr=False)
    deficits: list
    xn_norm_history: list
    N: float = 1.0
    T: float = 0.0
    direction: str = "forward"
    mass_drift: float = 0.0
    energy_drift: float = 0.0
    morawetz_spacetime: float = 0.0

    def summary(self):
        return {
            "N": self.N,
            "T": self.T,
            "direction": self.direction,
            "deficits": [[t, v] for t, v in self.deficits],
            "xn_history": [[t, v] for t, v in self.xn_norm_history],
            "mass_drift": self.mass_drift,
            "energy_drift": self.energy_drift,
            "morawetz": self.morawetz_spacetime,
        }


def power_abs(values, p):
    """
    |u|^p = exp(p log|u|) with 0^p = 0.
    """
    mod = numpy.abs(values)
    out = numpy.zeros_like(mod)
    nz = mod > 0
    out[nz] = numpy.exp(p * numpy.log(mod[nz]))
    return out


def mass(u):
    return l2_norm(u) ** 2


def kinetic_energy(u):
    """
    int |grad u|^2 from the spectrum.
    """
    return spectrum_sobolev_norm(forward(u, STANDARD_PARAMS), 1.0, homogeneous=True) ** 2


def potential_energy(u, cfg):
    if cfg.p == 0:
        return 0.0
    d = u.dimension
    integral = SPHERE_MEASURE[d] * numpy.sum(u.grid.measure * power_abs(u.values, cfg.p + 2.0))
    return 2.0 * cfg.mu / (cfg.p + 2.0) * float(integral)


def energy(u, cfg):
    """
    E = int |grad u|^2 + 2 mu/(p + 2) int |u|^{p+2}
    """
    return kinetic_energy(u) + potential_energy(u, cfg)


def momentum(u):
    """
    Radial data carries no momentum.
    """
    return 0.0


def morawetz_value(u):
    """
    Im [ omega int d_r u conj(u) r^{d-1} dr ]
    """
    du = radial_derivative(u)
    d = u.dimension
    return float(numpy.imag(SPHERE_MEASURE[d] * numpy.sum(u.grid.measure * du.values * numpy.conj(u.values))))


def morawetz_functional(state):
    return morawetz_value(state.u)


def make_state(t, u, cfg, step_count=0):
    return SolverState(
        t=float(t),
        u=u,
        mass=mass(u),
        energy=energy(u, cfg),
        morawetz=morawetz_value(u),
        step_count=step_count,
    )


class StrangStepper:
    """
    One Strang step u -> N(dt/2) L(dt) N(dt/2) u with the linear flow
    L(dt) = S^T diag(exp(-4 pi^2 i dt rho^2)) S assembled once.
    """

    def __init__(self, grid, cfg):
        self.grid = grid
        self.cfg = cfg
        plan = get_plan(grid)
        cfg.validate(plan.fgrid)
        phase = numpy.exp(-4j * numpy.pi**2 * cfg.dt * plan.fgrid.points**2)
        S = plan.core
        self._linear = (S.T * phase[None, :]) @ S
        self._sqrt_wr = plan.sqrt_wr

    def linear(self, values):
        return (self._linear @ (self._sqrt_wr * values)) / self._sqrt_wr

    def nonlinear(self, values, tau):
        if self.cfg.p == 0:
            return values
        return values * numpy.exp(-1j * self.cfg.mu * power_abs(values, self.cfg.p) * tau)

    def __call__(self, values):
        half = 0.5 * self.cfg.dt
        values = self.nonlinear(values, half)
        values = self.linear(values)
        return self.nonlinear(values, half)


def step(state, cfg, stepper=None):
    """
    A function to advance a SolverState by one Strang step.

    :param state: SolverState.
    :param cfg: NlsConfig.
    :param stepper: StrangStepper to reuse, built from cfg when None.
    :return: SolverState

    """
    if stepper is None:
        stepper = StrangStepper(state.u.grid, cfg)
    values = stepper(state.u.values)
    u = RadialFunction(state.u.grid, values)
    return make_state(state.t + cfg.dt, u, cfg, state.step_count + 1)


def evolve_nls(u0, cfg):
    """
    A function to solve the radial NLS from u0 up to cfg.T.

    :param u0: RadialFunction.
    :param cfg: NlsConfig.
    :return: list of SolverState at the output times.

    """
    stepper = StrangStepper(u0.grid, cfg)
    out_steps = cfg.output_steps()
    trajectory = [make_state(0.0, u0, cfg, 0)]
    sup0 = weighted_sup(u0, 0.0)
    values = u0.values
    for n in range(1, cfg.n_steps + 1):
        values = stepper(values)
        sup = float(numpy.max(numpy.abs(values)))
        if sup0 > 0 and sup > cfg.blowup_factor * sup0:
            raise WaveSplitBlowUpException(
                f"sup|u| = {sup:.3e} exceeds {cfg.blowup_factor:g} times its initial value at t = {n * cfg.dt:g}."
            )
        if n in out_steps:
            u = RadialFunction(u0.grid, values)
            if cfg.check_escape:
                _check_escape(u, n * cfg.dt, cfg.escape_tol)
            trajectory.append(make_state(n * cfg.dt, u, cfg, n))
    logger.debug("NLS run finished: %d steps, %d snapshots", cfg.n_steps, len(trajectory))
    return trajectory


def mass_drift(trajectory):
    m0 = trajectory[0].mass
    if m0 == 0.0:
        return 0.0
    return max(abs(s.mass - m0) for s in trajectory) / m0


def energy_drift(trajectory):
    e0 = trajectory[0].energy
    if e0 == 0.0:
        return 0.0
    return max(abs(s.energy - e0) for s in trajectory) / abs(e0)


def _trapezoid(values, times):
    if len(times) < 2:
        return 0.0
    return float(scipy.integrate.trapezoid(numpy.asarray(values), numpy.asarray(times)))


def morawetz_spacetime(trajectory, cfg):
    """
    int_I int |w|^{p+2} / |x| dx dt, trapezoid rule in time.
    """
    d = cfg.d
    vals = []
    for state in trajectory:
        g = state.u.grid
        dens = g.weights * g.points ** (d - 2) * power_abs(state.u.values, cfg.p + 2.0)
        vals.append(SPHERE_MEASURE[d] * float(numpy.sum(dens)))
    return _trapezoid(vals, [s.t for s in trajectory])


def xn_norm(trajectory, cfg, N):
    """
    ||h||_{X_N} = N^{s0-1} ||h||_{L^inf H^1-dot} + N^{alpha(d,p)(s0-1)} ||h||_{L^{r0}_{t,x}}
    """
    d, p = cfg.d, cfg.p
    r0 = strichartz_exponent_r0(d, p)
    sup_h1 = max(
        spectrum_sobolev_norm(forward(s.u, STANDARD_PARAMS), 1.0, homogeneous=True) for s in trajectory
    )
    lr0 = []
    for state in trajectory:
        g = state.u.grid
        lr0.append(SPHERE_MEASURE[d] * float(numpy.sum(g.measure * numpy.abs(state.u.values) ** r0)))
    spacetime = _trapezoid(lr0, [s.t for s in trajectory]) ** (1.0 / r0)
    return N ** (cfg.s0 - 1.0) * sup_h1 + N ** (alpha_dp(d, p) * (cfg.s0 - 1.0)) * spacetime


def _difference_trajectory(trajectory, v_list, cfg):
    return [
        SolverState(s.t, s.u - v, 0.0, 0.0, 0.0, s.step_count) for s, v in zip(trajectory, v_list)
    ]


def scattering_run(f, cfg, direction="forward"):
    """
    A function to evolve the modified component of f and measure how fast
    the solution approaches a free evolution.

    :param f: RadialFunction supported in r >= 1.
    :param cfg: NlsConfig (p inside the scattering window, or p = 0).
    :param direction: 'forward' evolves f_+ for t > 0, 'backward' evolves
                      f_- for t < 0 (times are reported as |t|).
    :return: ScatterReport

    """
    if direction not in ("forward", "backward"):
        raise WaveSplitValidationException(f"Direction '{direction}' must be 'forward' or 'backward'.")
    cfg.validate()
    cfg.check_window()
    pair = modified_components(f, cfg.s0, cfg.delta0)
    u0 = pair.plus_part if direction == "forward" else pair.minus_part
    # conj(u(-t)) solves the same equation, so backward runs evolve conj(u0).
    start = u0 if direction == "forward" else u0.conj()
    trajectory = evolve_nls(start, cfg)
    if direction == "backward":
        trajectory = [replace(s, u=s.u.conj(), morawetz=-s.morawetz) for s in trajectory]

    # Backward states are u(-t) reported at |t|, so they are compared with
    # e^{-it Lap} u_- where u_- = e^{iT Lap} u(-T).
    sign = 1.0 if direction == "forward" else -1.0
    final = trajectory[-1]
    u_plus = evolve_linear(final.u, -sign * final.t, check_escape=False)
    times = [s.t for s in trajectory]
    free = evolve_many(u_plus, [sign * t for t in times], check_escape=False)
    sc = critical_regularity(cfg.d, cfg.p) if cfg.p > 0 else 0.0
    checkpoints = []
    c = 1.0
    while c <= final.t + 1e-12:
        checkpoints.append(c)
        c *= 2.0
    deficits = []
    for tc in checkpoints:
        i = int(numpy.argmin(numpy.abs(numpy.asarray(times) - tc)))
        diff = trajectory[i].u - free[i]
        deficits.append((times[i], spectrum_sobolev_norm(forward(diff, STANDARD_PARAMS), sc, homogeneous=True)))

    xn_history = []
    if cfg.p > 0 and final.t > 0:
        # conj turns the backward problem for f into the forward one for conj(f).
        data = f if direction == "forward" else f.conj()
        v_split = sum_space_split(
            data, pair.N, cfg.s0, taus=numpy.asarray(times) * 4.0 * numpy.pi * pair.N, check_escape=False
        )
        part_two = v_split.part_two if direction == "forward" else [v.conj() for v in v_split.part_two]
        w_traj = _difference_trajectory(trajectory, part_two, cfg)
        for tc in checkpoints[1:]:
            upto = [s for s in w_traj if s.t <= tc + 1e-12]
            xn_history.append((tc, xn_norm(upto, cfg, pair.N)))

    logger.debug("Scattering run (%s) finished with N=%g", direction, pair.N)
    return ScatterReport(
        u_plus=u_plus,
        deficits=deficits,
        xn_norm_history=xn_history,
        N=pair.N,
        T=final.t,
        direction=direction,
        mass_drift=mass_drift(trajectory),
        energy_drift=energy_drift(trajectory),
        morawetz_spacetime=morawetz_spacetime(trajectory, cfg),
    )


def convergence_study(u0, cfg, refine=16):
    """
    Terminal-state and energy-drift ratios under dt halving, errors taken
    against a dt/refine reference run.
    """
    def terminal(c):
        traj = evolve_nls(u0, replace(c, out_times=(c.T,)))
        return traj[-1].u, energy_drift(traj)

    ref, _ = terminal(replace(cfg, dt=cfg.dt / refine))
    coarse, drift_coarse = terminal(cfg)
    fine, drift_fine = terminal(replace(cfg, dt=0.5 * cfg.dt))
    err_coarse = l2_norm(coarse - ref)
    err_fine = l2_norm(fine - ref)
    return {
        "error_dt": err_coarse,
        "error_half_dt": err_fine,
        "error_ratio": err_coarse / err_fine if err_fine > 0 else math.inf,
        "energy_drift_dt": drift_coarse,
        "energy_drift_half_dt": drift_fine,
        "energy_ratio": drift_coarse / drift_fine if drift_fine > 0 else math.inf,
    }


def _sweep_worker(args):
    f, cfg = args
    report = scattering_run(f, cfg)
    out = report.summary()
    out.update({"p": cfg.p, "s0": cfg.s0, "delta0": cfg.delta0, "d": cfg.d})
    return out


def run_sweep(f, configs, threads=1):
    """
    Independent scattering runs over a list of NlsConfig, evaluated with a
    worker pool when threads > 1.
    """
    jobs = [(f, cfg) for cfg in configs]
    if threads > 1:
        with Pool(threads) as pool:
            return pool.map(_sweep_worker, jobs)
    return [_sweep_worker(job) for job in jobs]
