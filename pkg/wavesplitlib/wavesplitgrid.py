"""
Module that contains the radial and frequency grids, the RadialFunction
type and the norms computed on them.
"""
############################################################################
#  wavesplitgrid.py
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
# Purpose:  Radial grids (open at r = 0), the dual frequency grid,
#           sampled radial functions and their norms.
#
#           For odd d the measure r^{d-1} times an even function is even
#           and the midpoint rule is exact for band limited data. For
#           even d it is not, and the nodes are the zeros j_k of J_1
#           with weights from the Bessel analogue of the midpoint rule,
#
#               int_0^inf x^3 g(x) dx = (2 / tau^4) sum_k j_k^2 g(j_k / tau) / J_2(j_k)^2
#
#           for even entire g of exponential type below 2 tau.
#
# History:
# Version 1.0 - Created.
# Version 1.1 - Bessel zero layout for d = 4.
#
############################################################################

import functools
import logging
from dataclasses import dataclass, field

import numpy
import scipy.special

import wavesplitlib

from .wavesplitexception import WaveSplitValidationException
from .wavesplitutils import read_csv_columns, write_csv_atomic

logger = logging.getLogger(__name__)

DEFAULT_M = 4096
DEFAULT_R_MAX = 64.0
MIN_POINTS = 16

# Surface measure of the unit sphere S^{d-1} in R^d.
SPHERE_MEASURE = {3: 4.0 * numpy.pi, 4: 2.0 * numpy.pi**2, 5: 8.0 * numpy.pi**2 / 3.0}

# Surface measure of S^{d-2}, the constant of the radial Fourier kernel.
KERNEL_SPHERE_MEASURE = {3: 2.0 * numpy.pi, 4: 4.0 * numpy.pi, 5: 2.0 * numpy.pi**2}

GL_ORDER = 8
MAX_LOG_PANELS = 12

# Layout on which the radial transform core is orthogonal, per dimension.
EXACT_LAYOUTS = {3: "uniform-midpoint", 4: "bessel-zero", 5: "uniform-midpoint"}


def _frozen(arr):
    arr = numpy.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def check_dimension(d):
    if d not in wavesplitlib.WAVESPLIT_DIMENSIONS_LIST:
        raise WaveSplitValidationException(
            f"Dimension d = {d} is not supported, it must be one of 3, 4 or 5."
        )


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """
    Points r_1 < ... < r_M in (0, r_max] with quadrature weights for
    integrals over [0, r_max] in the variable r.
    """

    dimension: int
    points: numpy.ndarray
    weights: numpy.ndarray
    r_max: float
    layout: str = "uniform-midpoint"

    def __post_init__(self):
        check_dimension(self.dimension)
        object.__setattr__(self, "points", _frozen(self.points))
        object.__setattr__(self, "weights", _frozen(self.weights))
        _check_points_weights(self.points, self.weights, "radial")

    @property
    def size(self):
        return self.points.size

    @property
    def key(self):
        return (self.dimension, self.layout, float(self.r_max), self.size)

    @property
    def measure(self):
        """
        Weights of the d-dimensional radial measure w_i r_i^{d-1}
        (without the sphere constant).
        """
        return self.weights * self.points ** (self.dimension - 1)

    def __eq__(self, other):
        return isinstance(other, RadialGrid) and self.key == other.key

    def __hash__(self):
        return hash(self.key)


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """
    Points rho_1 < ... < rho_Q in (0, rho_max] with quadrature weights.
    """

    points: numpy.ndarray
    weights: numpy.ndarray
    rho_max: float
    layout: str = "uniform-midpoint"

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen(self.points))
        object.__setattr__(self, "weights", _frozen(self.weights))
        _check_points_weights(self.points, self.weights, "frequency")

    @property
    def size(self):
        return self.points.size

    @property
    def key(self):
        return (self.layout, float(self.rho_max), self.size)

    def measure(self, d):
        return self.weights * self.points ** (d - 1)

    def __eq__(self, other):
        return isinstance(other, FrequencyGrid) and self.key == other.key

    def __hash__(self):
        return hash(self.key)


def _check_points_weights(points, weights, name):
    if points.ndim != 1 or points.size != weights.size:
        raise WaveSplitValidationException(f"The {name} points and weights must be 1D and of equal length.")
    if not numpy.all(numpy.isfinite(points)) or not numpy.all(numpy.isfinite(weights)):
        raise WaveSplitValidationException(f"The {name} grid has non-finite entries.")
    if numpy.any(points <= 0):
        raise WaveSplitValidationException(f"The {name} grid points must be strictly positive.")
    if numpy.any(numpy.diff(points) <= 0):
        raise WaveSplitValidationException(f"The {name} grid points must be strictly increasing.")
    if numpy.any(weights <= 0):
        raise WaveSplitValidationException(f"The {name} grid weights must be positive.")


def _uniform_midpoint(a, b, n):
    h = (b - a) / n
    return a + (numpy.arange(n) + 0.5) * h, numpy.full(n, h), h


def _log_linear_hybrid(r_max, M):
    n_panels = max(1, min(MAX_LOG_PANELS, (M // 2) // GL_ORDER))
    n_uniform = M - n_panels * GL_ORDER
    if n_uniform < 4:
        raise WaveSplitValidationException("Too few points for a log-linear-hybrid grid.")
    if r_max <= 1.0:
        raise WaveSplitValidationException("A log-linear-hybrid grid needs r_max > 1.")
    nodes, gl_weights = numpy.polynomial.legendre.leggauss(GL_ORDER)
    # Panels [0, 2^{1-P}], [2^{1-P}, 2^{2-P}], ..., [1/2, 1].
    edges = numpy.concatenate([[0.0], numpy.power(2.0, -numpy.arange(n_panels - 1, -1, -1, dtype=float))])
    pts = []
    wts = []
    for a, b in zip(edges[:-1], edges[1:]):
        pts.append(0.5 * (b - a) * nodes + 0.5 * (b + a))
        wts.append(0.5 * (b - a) * gl_weights)
    u_pts, u_wts, h = _uniform_midpoint(1.0, r_max, n_uniform)
    # Gregory end corrections make the midpoint panel exact for quadratics.
    u_wts[0] += h / 24.0
    u_wts[1] -= h / 24.0
    u_wts[-2] -= h / 24.0
    u_wts[-1] += h / 24.0
    pts.append(u_pts)
    wts.append(u_wts)
    return numpy.concatenate(pts), numpy.concatenate(wts)


@functools.lru_cache(maxsize=8)
def j1_zeros(n):
    """
    The first n positive zeros of J_1 (read-only, cached).
    """
    zeros = scipy.special.jn_zeros(1, n)
    zeros.setflags(write=False)
    return zeros


def _bessel_zero(n, tau):
    """
    Nodes j_k / tau, k = 1..n, and weights 2 / (tau j_k J_2(j_k)^2) so that
    sum_k w_k x_k^3 g(x_k) is the Bessel quadrature of int x^3 g(x) dx.
    """
    zeros = j1_zeros(n + 1)[:n]
    weights = 2.0 / (tau * zeros * scipy.special.jv(2, zeros) ** 2)
    return zeros / tau, weights


def default_layout(d):
    return EXACT_LAYOUTS[d]


def make_grid(d, r_max=DEFAULT_R_MAX, M=DEFAULT_M, layout=None):
    """
    A function to build a radial grid.

    :param d: dimension (3, 4 or 5).
    :param r_max: truncation radius.
    :param M: number of points (>= 16).
    :param layout: 'uniform-midpoint', 'log-linear-hybrid' or 'bessel-zero'
                   (d = 4 only). None picks the layout on which the transform
                   is exact for the dimension.
    :return: RadialGrid

    """
    check_dimension(d)
    if M < MIN_POINTS:
        raise WaveSplitValidationException(f"A grid needs at least {MIN_POINTS} points, {M} were requested.")
    if not r_max > 0:
        raise WaveSplitValidationException("r_max must be positive.")
    if layout is None:
        layout = default_layout(d)
    if layout == "uniform-midpoint":
        points, weights, _ = _uniform_midpoint(0.0, float(r_max), int(M))
        if d % 2 == 0:
            logger.warning("Midpoint radial quadrature is only second order for d = %d, use bessel-zero.", d)
    elif layout == "log-linear-hybrid":
        points, weights = _log_linear_hybrid(float(r_max), int(M))
    elif layout == "bessel-zero":
        if d % 2 == 1:
            raise WaveSplitValidationException("The bessel-zero layout is for even dimensions.")
        tau = j1_zeros(int(M) + 1)[-1] / float(r_max)
        points, weights = _bessel_zero(int(M), tau)
    else:
        raise WaveSplitValidationException(f"Grid layout '{layout}' is not recognised.")
    logger.debug("Built %s grid: d=%d, r_max=%g, M=%d", layout, d, r_max, M)
    return RadialGrid(dimension=int(d), points=points, weights=weights, r_max=float(r_max), layout=layout)


def dual_frequency_grid(rgrid):
    """
    The frequency grid paired with a radial grid. For odd d it is the
    midpoint grid with Q = M (the number of points above r = 1 for the
    hybrid layout) and rho_max = Q / (2 r_max). For even d the nodes are
    j_k / (2 pi r_max) and rho_max = j_{Q+1} / (2 pi r_max).
    """
    if rgrid.layout == "log-linear-hybrid":
        Q = int(numpy.sum(rgrid.points > 1.0))
    else:
        Q = rgrid.size
    if rgrid.dimension % 2 == 0:
        tau = 2.0 * numpy.pi * rgrid.r_max
        points, weights = _bessel_zero(Q, tau)
        rho_max = j1_zeros(Q + 1)[-1] / tau
        return FrequencyGrid(points=points, weights=weights, rho_max=rho_max, layout="bessel-zero")
    rho_max = Q / (2.0 * rgrid.r_max)
    points, weights, _ = _uniform_midpoint(0.0, rho_max, Q)
    return FrequencyGrid(points=points, weights=weights, rho_max=rho_max)


@dataclass(frozen=True, eq=False)
class RadialFunction:
    """
    Complex samples of a radial function on a RadialGrid.
    """

    grid: RadialGrid
    values: numpy.ndarray = field(repr=False)

    def __post_init__(self):
        vals = numpy.array(self.values, dtype=complex)
        if vals.ndim != 1 or vals.size != self.grid.size:
            raise WaveSplitValidationException(
                f"Function has {vals.size} samples but the grid has {self.grid.size} points."
            )
        if not numpy.all(numpy.isfinite(vals)):
            raise WaveSplitValidationException("Radial function has non-finite samples.")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def dimension(self):
        return self.grid.dimension

    @property
    def r(self):
        return self.grid.points

    def with_values(self, values):
        return RadialFunction(self.grid, values)

    def conj(self):
        return self.with_values(numpy.conj(self.values))

    def _other_values(self, other):
        if isinstance(other, RadialFunction):
            if other.grid != self.grid:
                raise WaveSplitValidationException("Radial functions live on different grids.")
            return other.values
        return other

    def __add__(self, other):
        return self.with_values(self.values + self._other_values(other))

    def __sub__(self, other):
        return self.with_values(self.values - self._other_values(other))

    def __mul__(self, other):
        return self.with_values(self.values * self._other_values(other))

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self.values)


def zero_function(grid):
    return RadialFunction(grid, numpy.zeros(grid.size, dtype=complex))


def sample_function(grid, func):
    """
    Sample a callable of r on the grid points.
    """
    return RadialFunction(grid, func(grid.points))


def inner_product(f, g):
    """
    The L^2(R^d) inner product <f, g> (conjugate linear in g).
    """
    d = f.dimension
    return complex(SPHERE_MEASURE[d] * numpy.sum(f.grid.measure * f.values * numpy.conj(g.values)))


def l2_norm(f):
    """
    The L^2(R^d) norm of a radial function, sphere constant included.
    """
    d = f.dimension
    return float(numpy.sqrt(SPHERE_MEASURE[d] * numpy.sum(f.grid.measure * numpy.abs(f.values) ** 2)))


def lp_norm(f, p):
    """
    The L^p(R^d) norm of a radial function; p = numpy.inf gives the grid
    maximum.
    """
    if p == numpy.inf:
        return weighted_sup(f, 0.0)
    if p < 1:
        raise WaveSplitValidationException("L^p norms need p >= 1.")
    d = f.dimension
    return float((SPHERE_MEASURE[d] * numpy.sum(f.grid.measure * numpy.abs(f.values) ** p)) ** (1.0 / p))


def sobolev_norm(f, s, homogeneous=False, alias_tol=None):
    """
    The H^s (or homogeneous H^s) norm computed from the alpha = beta = 0
    spectrum with weights <2 pi rho>^s or (2 pi rho)^s.

    :param alias_tol: largest allowed fraction of spectral energy above
                      rho_max / 2, defaults to 1e-8.

    """
    from .wavesplittransform import spectral_sobolev_norm

    return spectral_sobolev_norm(f, s, homogeneous, alias_tol)


def weighted_sup(f, weight_exponent):
    """
    Grid maximum of r^weight_exponent |f(r)|. This is a lower bound on the
    true supremum.
    """
    if f.grid.size == 0:
        return 0.0
    return float(numpy.max(f.grid.points**weight_exponent * numpy.abs(f.values)))


def write_function_csv(out_file, f):
    return write_csv_atomic(out_file, ["r", "re", "im"], [f.r, f.values.real, f.values.imag])


def write_trajectory_csv(out_file, times, functions):
    """
    Write samples u(t_i) of one grid in long format, one row per (t, r).

    :param times: sample times, one per function.
    :param functions: list of RadialFunction on a common grid.

    """
    if len(times) != len(functions) or not functions:
        raise WaveSplitValidationException("A trajectory needs one function per time.")
    grid = functions[0].grid
    if any(u.grid != grid for u in functions):
        raise WaveSplitValidationException("The trajectory functions must share one grid.")
    t_col = numpy.repeat(numpy.asarray(times, dtype=float), grid.size)
    r_col = numpy.tile(grid.points, len(functions))
    values = numpy.concatenate([u.values for u in functions])
    return write_csv_atomic(out_file, ["t", "r", "re", "im"], [t_col, r_col, values.real, values.imag])


def read_function_csv(in_file, d, r_max=None, layout=None):
    """
    Read a radial function written with write_function_csv. The grid is
    rebuilt from the row count and r_max (by default the value implied by
    the first point of a midpoint or Bessel zero layout) and checked
    against the file's r column.
    """
    data = read_csv_columns(in_file, ["r", "re", "im"])
    M = data.shape[0]
    if layout is None:
        layout = default_layout(d)
    if r_max is None:
        if layout == "uniform-midpoint":
            r_max = 2.0 * data[0, 0] * M
        elif layout == "bessel-zero":
            zeros = j1_zeros(M + 1)
            # Snap away the rounding of j_1 r_max / j_{M+1}.
            r_max = float(f"{data[0, 0] * zeros[-1] / zeros[0]:.12g}")
        else:
            raise WaveSplitValidationException("r_max is needed to read a log-linear-hybrid grid.")
    grid = make_grid(d, r_max, M, layout)
    if not numpy.allclose(grid.points, data[:, 0], rtol=1e-12, atol=0.0):
        raise WaveSplitValidationException(f"The r column of '{in_file}' does not match a {layout} grid.")
    return RadialFunction(grid, data[:, 1] + 1j * data[:, 2])


def annulus_bump(grid, r_lo=1.0, r_hi=2.0, sharpness=4.0, amplitude=1.0):
    """
    The smooth bump amplitude * exp(a - a / (1 - s^2)) supported on
    [r_lo, r_hi], with s the position rescaled to (-1, 1) and a the
    sharpness (smaller a gives a wider, flatter profile).
    """
    if not r_hi > r_lo:
        raise WaveSplitValidationException("An annulus bump needs r_hi > r_lo.")
    s = (2.0 * grid.points - r_lo - r_hi) / (r_hi - r_lo)
    vals = numpy.zeros(grid.size)
    inside = numpy.abs(s) < 1.0
    vals[inside] = amplitude * numpy.exp(sharpness - sharpness / (1.0 - s[inside] ** 2))
    return RadialFunction(grid, vals)


def gaussian_profile(grid, width=1.0, center=0.0, amplitude=1.0):
    """
    amplitude * exp(-pi ((r - center) / width)^2); width = 1, center = 0 is
    the self-dual Gaussian.
    """
    return RadialFunction(grid, amplitude * numpy.exp(-numpy.pi * ((grid.points - center) / width) ** 2))
