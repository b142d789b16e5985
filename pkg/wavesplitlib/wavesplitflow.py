"""
Module that contains the free radial Schrodinger flow, its oracles and the
cone splitting of evolved outgoing/incoming bands.
"""
############################################################################
#  wavesplitflow.py
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
# Purpose:  e^{it Laplacian} as the multiplier exp(-4 pi^2 i t rho^2) on
#           the alpha = beta = 0 radial spectrum. Band k travels with
#           speed 4 pi 2^k, so the cone diagnostics measure time in
#           crossing times 2^j / (4 pi 2^k).
#
# History:
# Version 1.0 - Created.
#
############################################################################

import logging
import math
from dataclasses import dataclass, field

import numpy
import scipy.integrate

from .wavesplitexception import (
    WaveSplitDomainEscapeException,
    WaveSplitValidationException,
)
from .wavesplitgrid import RadialFunction, l2_norm, lp_norm, weighted_sup
from .wavesplittransform import (
    STANDARD_PARAMS,
    band_dyadic,
    band_gt,
    band_range,
    forward,
    get_plan,
    lp_project,
    spectrum_sobolev_norm,
)
from .wavesplitutils import chi_band, chi_le, fit_log2_slope
from .wavesplitwaves import check_outside_unit_ball, decompose, decompose_tail

logger = logging.getLogger(__name__)

ESCAPE_TOL = 1e-6
OUTER_FRACTION = 0.1
DEFAULT_DELTA = 0.1
ORACLE_PANELS = 400
ORACLE_CHUNK = 128


@dataclass(frozen=True, eq=False)
class PropagatorPlan:
    """
    Multipliers exp(-4 pi^2 i t rho^2) for a set of sample times.
    """

    fgrid: object
    time_samples: numpy.ndarray = field(repr=False)

    def __post_init__(self):
        times = numpy.array(self.time_samples, dtype=float).ravel()
        if not numpy.all(numpy.isfinite(times)):
            raise WaveSplitValidationException("Propagator times must be finite.")
        object.__setattr__(self, "time_samples", times)

    def multipliers(self):
        rho = self.fgrid.points
        return numpy.exp(-4j * numpy.pi**2 * numpy.outer(self.time_samples, rho**2))


@dataclass(frozen=True, eq=False)
class ConeSplit:
    inside: RadialFunction
    outside: RadialFunction
    j: int
    k: int
    delta: float
    t: float
    radius: float = 0.0
    input_norm: float = 0.0

    @property
    def inside_fraction(self):
        if self.input_norm == 0.0:
            return 0.0
        return l2_norm(self.inside) / self.input_norm


def boundary_fraction(f, outer=OUTER_FRACTION):
    """
    Fraction of the L^2 energy of f in the outer part r > (1 - outer) r_max.
    """
    dens = f.grid.measure * numpy.abs(f.values) ** 2
    total = numpy.sum(dens)
    if total == 0.0:
        return 0.0
    return float(numpy.sum(dens[f.grid.points > (1.0 - outer) * f.grid.r_max]) / total)


def _check_escape(u, t, escape_tol):
    frac = boundary_fraction(u)
    if frac > escape_tol:
        raise WaveSplitDomainEscapeException(
            f"At t = {t:g}, {frac:.3e} of the energy is in the outer {100 * OUTER_FRACTION:g}% of the grid."
        )


def evolve_many(f, times, kappa=None, check_escape=True, escape_tol=ESCAPE_TOL):
    """
    e^{it Laplacian} f at several times from a single forward transform.

    :return: list of RadialFunction, one per time.

    """
    plan = get_plan(f.grid)
    spec = forward(f, STANDARD_PARAMS, kappa=kappa)
    prop = PropagatorPlan(plan.fgrid, times)
    evolved = prop.multipliers() * spec.values[None, :]
    scale = spec.kappa / plan.kappa_ref
    vals = scale * (plan.core.T @ (plan.sqrt_wrho[:, None] * evolved.T)) / plan.sqrt_wr[:, None]
    out = []
    for i, t in enumerate(prop.time_samples):
        u = RadialFunction(f.grid, vals[:, i])
        if check_escape:
            _check_escape(u, t, escape_tol)
        out.append(u)
    return out


def evolve_linear(f, t, kappa=None, check_escape=True, escape_tol=ESCAPE_TOL):
    """
    A function to evolve radial data under the free Schrodinger flow.

    :param f: RadialFunction (band-limited on the dual frequency grid).
    :param t: time, any sign.
    :param check_escape: raise when more than escape_tol of the energy
                         reaches the outer part of the grid.
    :return: RadialFunction

    """
    return evolve_many(f, [t], kappa, check_escape, escape_tol)[0]


def gaussian_closed_form(grid, t, width=1.0):
    """
    e^{it Laplacian} exp(-pi r^2 / width^2) = width^d (width^2 + 4 pi i t)^{-d/2}
    exp(-pi r^2 / (width^2 + 4 pi i t)).
    """
    d = grid.dimension
    a = width**2 + 4j * numpy.pi * t
    vals = width**d * a ** (-0.5 * d) * numpy.exp(-numpy.pi * grid.points**2 / a)
    return RadialFunction(grid, vals)


def kernel_oracle(profile, t, r_values, s_max, n_panels=ORACLE_PANELS):
    """
    d = 3 propagator by direct quadrature of the explicit kernel:

        u(r) = (4 pi i t)^{-3/2} 2 pi int phi(s) s^2 e^{i(r^2+s^2)/4t} 2 sinc(rs/2t) ds

    :param profile: callable phi(s).
    :param s_max: the profile is taken to vanish beyond s_max.

    """
    if t == 0:
        raise WaveSplitValidationException("The kernel oracle needs t != 0.")
    nodes, weights = numpy.polynomial.legendre.leggauss(16)
    edges = numpy.linspace(0.0, s_max, n_panels + 1)
    half = 0.5 * numpy.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    s = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    radial_weight = w * profile(s) * s**2
    r = numpy.asarray(r_values, dtype=float).ravel()
    integral = numpy.empty(r.size, dtype=complex)
    for start in range(0, r.size, ORACLE_CHUNK):
        rc = r[start : start + ORACLE_CHUNK]
        x = numpy.outer(rc, s) / (2.0 * t)
        # numpy.sinc(y) = sin(pi y)/(pi y)
        angular = 2.0 * numpy.sinc(x / numpy.pi)
        phase = numpy.exp(1j * (rc[:, None] ** 2 + s[None, :] ** 2) / (4.0 * t))
        integral[start : start + ORACLE_CHUNK] = (phase * angular) @ radial_weight
    return (4j * numpy.pi * t) ** -1.5 * 2.0 * numpy.pi * integral


def dispersive_ratio(f, t, r_exponent):
    """
    ||S(t) f||_{L^r} t^{d(1/2 - 1/r)} / ||f||_{L^{r'}}
    """
    if not t > 0:
        raise WaveSplitValidationException("The dispersive ratio needs t > 0.")
    if not r_exponent >= 2:
        raise WaveSplitValidationException("The dispersive ratio needs r >= 2.")
    d = f.dimension
    if r_exponent == numpy.inf:
        r_dual, power = 1.0, 0.5 * d
    else:
        r_dual, power = r_exponent / (r_exponent - 1.0), d * (0.5 - 1.0 / r_exponent)
    denom = lp_norm(f, r_dual)
    if denom == 0.0:
        return 0.0
    u = evolve_linear(f, t)
    return lp_norm(u, r_exponent) * t**power / denom


def crossing_time(j, k):
    """
    Time for band k (speed 4 pi 2^k) to cross the radius 2^j.
    """
    return 2.0**j / (4.0 * numpy.pi * 2.0**k)


def cone_radius(j, k, delta, t):
    return delta * (2.0**j + 4.0 * numpy.pi * 2.0**k * abs(t))


def cone_input(f, j, k, side="out"):
    """
    chi_{2^j}(r) times the band-k outgoing (or incoming) component of f.
    """
    from .wavesplitwaves import decompose_band

    pair = decompose_band(f, k, alias_tol=None)
    part = pair.out_part if side == "out" else pair.in_part
    return part * chi_band(f.grid.points, 2.0**j)


def cone_split(f_band_annulus, j, k, delta, t, direction="out", check_escape=True):
    """
    A function to split the evolved band at time +t ('out') or -t ('in')
    by the moving cutoff at radius delta (2^j + 4 pi 2^k |t|).

    :return: ConeSplit

    """
    if not 0.0 < delta <= 0.25:
        raise WaveSplitValidationException(f"delta = {delta} must lie in (0, 1/4].")
    if direction not in ("out", "in"):
        raise WaveSplitValidationException(f"Direction '{direction}' must be 'out' or 'in'.")
    grid = f_band_annulus.grid
    radius = cone_radius(j, k, delta, t)
    if radius > grid.r_max:
        raise WaveSplitDomainEscapeException(
            f"Cone radius {radius:g} exceeds r_max = {grid.r_max:g}."
        )
    signed_t = t if direction == "out" else -t
    u = evolve_linear(f_band_annulus, signed_t, check_escape=check_escape)
    inner = chi_le(grid.points, radius)
    return ConeSplit(
        inside=u * inner,
        outside=u * (1.0 - inner),
        j=j,
        k=k,
        delta=delta,
        t=signed_t,
        radius=radius,
        input_norm=l2_norm(f_band_annulus),
    )


def outside_decay_fit(f_band_annulus, j, k, delta, taus, direction="out"):
    """
    Fit sup |outside part| ~ (2^j + 4 pi 2^k t)^{-alpha_fit} over times
    taus (in crossing times).

    :return: (alpha_fit, list of sup norms)

    """
    T = crossing_time(j, k)
    sups = []
    scales = []
    for tau in taus:
        split = cone_split(f_band_annulus, j, k, delta, tau * T, direction)
        sups.append(weighted_sup(split.outside, 0.0))
        scales.append(2.0**j + 4.0 * numpy.pi * 2.0**k * tau * T)
    slope, _ = fit_log2_slope(scales, sups)
    return -slope, sups


def strichartz_norm(trajectory, times, q, r):
    """
    Discrete L^q_t L^r_x norm with the trapezoid rule in time.
    """
    norms = numpy.array([lp_norm(u, r) for u in trajectory])
    if q == numpy.inf:
        return float(numpy.max(norms)) if norms.size else 0.0
    if len(times) < 2:
        raise WaveSplitValidationException("A time norm needs at least two samples.")
    return float(scipy.integrate.trapezoid(norms**q, numpy.asarray(times, dtype=float)) ** (1.0 / q))


def is_admissible(d, q, r):
    """
    Whether (q, r) is Schrodinger admissible: 2/q = d(1/2 - 1/r),
    2 <= r <= 2d/(d-2), q >= 2.
    """
    if q < 2 or r < 2 or r > 2.0 * d / (d - 2):
        return False
    lhs = 0.0 if q == numpy.inf else 2.0 / q
    return math.isclose(lhs, d * (0.5 - 1.0 / r), rel_tol=1e-12, abs_tol=1e-12)


@dataclass(frozen=True, eq=False)
class SumSpaceSplit:
    times: numpy.ndarray
    part_one: list
    part_two: list
    norm_one: float
    norm_two: float
    target: list


def _spatial_partition(grid):
    """
    chi_{<=1/4} and chi_{2^j}, j = -2, ..., J, summing to one on the grid.
    """
    J = int(math.ceil(math.log2(grid.r_max))) - 1
    return [int(j) for j in range(-2, J + 1)]


def sum_space_split(f, N, s0, taus=(0.0, 0.25, 0.5, 1.0), delta=DEFAULT_DELTA, check_escape=True):
    """
    A function to split e^{it Laplacian} (P_{>=N} f)_out into a part
    measured in an energy norm and a part measured in L^2_t L^inf_x.

    Per band k >= log2(N) (and the cap beyond the last band), with
    a_k = (P_{2^k} f)_out, c_k its tail >= k-1 and h_k = a_k - c_k:

        part I  = e^{it Lap}(sum h_k + sum chi_{<=1/4} c_k) + sum_{k,j} inside cone of chi_{2^j} c_k
        part II = sum_{k,j} outside cone of chi_{2^j} c_k

    :param taus: sample times in units of 1/(4 pi N).
    :param s0: recorded regularity of the data, the energy norm is H^1.
    :param check_escape: check the evolved target against the outer shell.
    :return: SumSpaceSplit

    """
    check_outside_unit_ball(f)
    grid = f.grid
    fgrid = get_plan(grid).fgrid
    k_min_grid, k_max = band_range(fgrid)
    k_first = int(round(math.log2(N)))
    if 2.0**k_first != N:
        raise WaveSplitValidationException(f"N = {N} must be a power of two.")
    if k_first > k_max:
        raise WaveSplitValidationException(f"N = {N} is beyond the largest resolvable band.")
    t_unit = 1.0 / (4.0 * numpy.pi * N)
    times = numpy.asarray(taus, dtype=float) * t_unit
    M = grid.size

    part_one = numpy.zeros((times.size, M), dtype=complex)
    part_two = numpy.zeros((times.size, M), dtype=complex)
    low_pieces = numpy.zeros(M, dtype=complex)
    js = _spatial_partition(grid)
    r = grid.points

    pieces = [(k, band_dyadic(k)) for k in range(k_first, k_max + 1)]
    pieces.append((k_max + 1, band_gt(2.0 ** (k_max + 1))))
    for k, band in pieces:
        band_part = lp_project(f, band)
        if l2_norm(band_part) == 0.0:
            continue
        a_k = decompose(band_part, alias_tol=None).out_part
        c_k = decompose_tail(band_part, min(k, k_max) - 1, alias_tol=None).out_part
        low_pieces += (a_k - c_k).values + chi_le(r, 0.25) * c_k.values
        for j in js:
            piece = c_k * chi_band(r, 2.0**j)
            if l2_norm(piece) == 0.0:
                continue
            evolved = evolve_many(piece, times, check_escape=False)
            for i, t in enumerate(times):
                inner = chi_le(r, cone_radius(j, k, delta, t))
                part_one[i] += inner * evolved[i].values
                part_two[i] += (1.0 - inner) * evolved[i].values

    low_evolved = evolve_many(RadialFunction(grid, low_pieces), times, check_escape=False)
    for i in range(times.size):
        part_one[i] += low_evolved[i].values
    target = evolve_many(
        decompose(lp_project(f, band_gt(N)), alias_tol=None).out_part, times, check_escape=check_escape
    )

    one = [RadialFunction(grid, v) for v in part_one]
    two = [RadialFunction(grid, v) for v in part_two]
    norm_one = max(spectrum_sobolev_norm(forward(u, STANDARD_PARAMS), 1.0) for u in one)
    sup_two = numpy.array([weighted_sup(u, 0.0) for u in two])
    if times.size > 1:
        norm_two = float(numpy.sqrt(scipy.integrate.trapezoid(sup_two**2, times)))
    else:
        norm_two = float(sup_two[0])
    logger.debug("Sum-space split N=%g: normI=%.4e normII=%.4e (s0=%g)", N, norm_one, norm_two, s0)
    return SumSpaceSplit(times, one, two, norm_one, norm_two, target)
