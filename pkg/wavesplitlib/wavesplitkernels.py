"""
Module that contains the oscillatory kernels J(r) and K(r) which define
the incoming/outgoing decomposition, together with their closed forms
and large-r diagnostics.
"""
############################################################################
#  wavesplitkernels.py
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
# Purpose:  J(r) = int_0^{pi/2} exp(2 pi i r sin(t)) cos(t)^{d-2} dt by
#           composite Gauss-Legendre panels, the Bessel/Struve closed
#           forms of its real and imaginary parts used to build the
#           transform matrices, the correction kernel K(r) and the fitted
#           large-r asymptotics.
#
# History:
# Version 1.0 - Created.
#
############################################################################

import functools
import logging
import math
from dataclasses import dataclass

import numpy
import scipy.special

from .wavesplitexception import WaveSplitValidationException
from .wavesplitgrid import check_dimension
from .wavesplitutils import chi_ge, fit_log2_slope

logger = logging.getLogger(__name__)

GL_ORDER = 8
MIN_PANELS = 4
ASYMPTOTIC_R_MIN = 4.0
ASYMPTOTIC_CALIBRATION_RANGE = (4.0, 64.0)
ASYMPTOTIC_SAFETY = 1.5
RESTRICTED_THETA = numpy.pi / 6.0

_GL_NODES, _GL_WEIGHTS = numpy.polynomial.legendre.leggauss(GL_ORDER)


def bessel_order(d):
    return 0.5 * (d - 2)


def kernel_constant(d):
    """
    c_nu = sqrt(pi) Gamma(nu + 1/2) / 2 with nu = (d - 2) / 2.
    """
    nu = bessel_order(d)
    return math.sqrt(math.pi) * math.gamma(nu + 0.5) / 2.0


def j_at_zero(d):
    """
    J(0) = int_0^{pi/2} cos(t)^{d-2} dt.
    """
    nu = bessel_order(d)
    return kernel_constant(d) / math.gamma(nu + 1.0)


def _theta_panels(lower, upper, r, extra_panels=0):
    # Panels of phase <= pi/2 so every oscillation period gets 32 nodes.
    n_panels = max(MIN_PANELS, int(math.ceil(4.0 * abs(r) * (upper - lower))) + extra_panels)
    edges = numpy.linspace(lower, upper, n_panels + 1)
    half = 0.5 * numpy.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    theta = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return theta, weights


def _theta_integral(d, r, lower, upper, sign=1.0, restricted=False):
    extra = 256 if restricted else 0
    theta, weights = _theta_panels(lower, upper, r, extra)
    integrand = numpy.exp(sign * 2j * numpy.pi * r * numpy.sin(theta)) * numpy.cos(theta) ** (d - 2)
    if restricted:
        integrand = integrand * chi_ge(theta, RESTRICTED_THETA)
    return complex(numpy.sum(weights * integrand))


def eval_J(d, r):
    """
    J(r) = int_0^{pi/2} exp(2 pi i r sin(t)) cos(t)^{d-2} dt, r any real.

    :param d: dimension.
    :param r: real argument (negative values give J(-|r|)).
    :return: complex

    """
    check_dimension(d)
    return _theta_integral(d, float(r), 0.0, 0.5 * numpy.pi)


def eval_K(d, r):
    """
    K(r) = chi_{>=1}(r) [ -1/(2 pi i r) + (d - 3)/(2 pi i r)^3 ], which is
    purely imaginary.
    """
    check_dimension(d)
    if r < 0:
        raise WaveSplitValidationException("K(r) is only defined for r >= 0.")
    return 1j * float(k_imag(d, numpy.array([float(r)]))[0])


def k_imag(d, s):
    """
    Imaginary part of K on an array of non-negative arguments.
    """
    s = numpy.asarray(s, dtype=float)
    cut = chi_ge(s, 1.0)
    out = numpy.zeros_like(s)
    nz = cut > 0
    z = 2.0 * numpy.pi * s[nz]
    out[nz] = cut[nz] * (1.0 / z + (d - 3) / z**3)
    return out


def kernel_even(d, s):
    """
    Re J(s) = c_nu (2/z)^nu J_nu(z) with z = 2 pi s, on an array of s.
    """
    s = numpy.abs(numpy.asarray(s, dtype=float))
    nu = bessel_order(d)
    z = 2.0 * numpy.pi * s
    out = numpy.full(z.shape, j_at_zero(d))
    nz = z > 0
    zz = z[nz]
    if d == 3:
        out[nz] = numpy.sin(zz) / zz
    else:
        out[nz] = kernel_constant(d) * (2.0 / zz) ** nu * scipy.special.jv(nu, zz)
    return out


def kernel_odd(d, s):
    """
    Im J(s) = c_nu (2/z)^nu H_nu(z) (Struve function), z = 2 pi s.
    Odd in s.
    """
    s = numpy.asarray(s, dtype=float)
    sign = numpy.sign(s)
    z = 2.0 * numpy.pi * numpy.abs(s)
    nu = bessel_order(d)
    out = numpy.zeros_like(z)
    nz = z > 0
    zz = z[nz]
    if d == 3:
        out[nz] = 2.0 * numpy.sin(0.5 * zz) ** 2 / zz
    elif d == 5:
        vals = numpy.empty_like(zz)
        small = zz < 1.0
        vals[small] = kernel_constant(d) * (2.0 / zz[small]) ** nu * scipy.special.struve(nu, zz[small])
        zl = zz[~small]
        vals[~small] = 1.0 / zl + 2.0 / zl**3 - 2.0 * (numpy.sin(zl) + numpy.cos(zl) / zl) / zl**2
        out[nz] = vals
    else:
        out[nz] = kernel_constant(d) * (2.0 / zz) ** nu * scipy.special.struve(nu, zz)
    return sign * out


def kernel_even_derivative(d, s):
    """
    d/ds Re J(s) = -2 pi c_nu (2/z)^nu J_{nu+1}(z).
    """
    s = numpy.asarray(s, dtype=float)
    sign = numpy.sign(s)
    z = 2.0 * numpy.pi * numpy.abs(s)
    nu = bessel_order(d)
    out = numpy.zeros_like(z)
    nz = z > 0
    zz = z[nz]
    out[nz] = -2.0 * numpy.pi * kernel_constant(d) * (2.0 / zz) ** nu * scipy.special.jv(nu + 1.0, zz)
    return sign * out


def eval_J_closed_form(d, s):
    """
    J(s) from the Bessel and Struve closed forms, for arrays of s.
    """
    return kernel_even(d, s) + 1j * kernel_odd(d, s)


@dataclass(frozen=True, eq=False)
class KernelTable:
    dimension: int
    arguments: numpy.ndarray
    J_values: numpy.ndarray
    K_values: numpy.ndarray
    method_tags: tuple


def build_kernel_table(d, arguments):
    """
    Tabulate J and K on sorted arguments by direct quadrature.
    """
    check_dimension(d)
    args = numpy.asarray(arguments, dtype=float).ravel()
    if numpy.any(numpy.diff(args) < 0):
        raise WaveSplitValidationException("Kernel table arguments must be sorted in ascending order.")
    if numpy.any(args < 0):
        raise WaveSplitValidationException("Kernel table arguments must be non-negative.")
    j_vals = numpy.array([eval_J(d, r) for r in args], dtype=complex)
    k_vals = 1j * k_imag(d, args)
    logger.debug("Built kernel table for d=%d with %d arguments", d, args.size)
    return KernelTable(
        dimension=d,
        arguments=args,
        J_values=j_vals,
        K_values=k_vals,
        method_tags=tuple("quadrature" for _ in range(args.size)),
    )


def restricted_integral(d, r):
    """
    int_0^{pi/2} exp(2 pi i r sin(t)) chi_{>=pi/6}(t) cos(t)^{d-2} dt
    """
    return _theta_integral(d, float(r), 0.0, 0.5 * numpy.pi, restricted=True)


def restricted_integral_two_sided(d, r):
    """
    int_{-pi/2}^{pi/2} exp(-2 pi i r sin(t)) chi_{>=pi/6}(|t|) cos(t)^{d-2} dt
    """
    # t -> -t on the negative half flips the sign of the phase.
    one_side = _theta_integral(d, float(r), 0.0, 0.5 * numpy.pi, sign=-1.0, restricted=True)
    other_side = _theta_integral(d, float(r), 0.0, 0.5 * numpy.pi, sign=1.0, restricted=True)
    return one_side + other_side


@functools.lru_cache(maxsize=None)
def asymptotic_constant(d):
    """
    C with |restricted - (J - K)| <= C r^{-5} on the calibration range,
    including a safety factor.
    """
    lo, hi = ASYMPTOTIC_CALIBRATION_RANGE
    rs = numpy.linspace(lo, hi, 481)
    worst = 0.0
    for r in rs:
        diff = abs(restricted_integral(d, r) - (eval_J(d, r) - eval_K(d, r)))
        worst = max(worst, diff * r**5)
    logger.debug("Calibrated asymptotic constant for d=%d: %g", d, worst)
    return ASYMPTOTIC_SAFETY * worst


def asymptotic_J_minus_K(d, r):
    """
    Leading part of J(r) - K(r) from the theta-restricted integral.

    :return: (value, error_bound) with error_bound = C r^{-5}.

    """
    check_dimension(d)
    if r < ASYMPTOTIC_R_MIN:
        raise WaveSplitValidationException(
            f"The asymptotic form of J - K needs r >= {ASYMPTOTIC_R_MIN}, r = {r} was given."
        )
    return restricted_integral(d, r), asymptotic_constant(d) * float(r) ** -5


def kernel_decay_slope(d, r_range=(8.0, 64.0), n_samples=113):
    """
    log-log slope of |J(r) - K(r)| over r_range.
    """
    rs = numpy.linspace(r_range[0], r_range[1], n_samples)
    vals = numpy.array([abs(eval_J(d, r) - eval_K(d, r)) for r in rs])
    slope, _ = fit_log2_slope(rs, vals)
    return slope


def fit_kernel_constants(d, r_range=(16.0, 64.0), n_samples=97):
    """
    Least-squares fit of the leading asymptotic constants

        restricted(r)           ~ c1 r^{-(d-1)/2} e^{2 pi i r}
        restricted_two_sided(r) ~ r^{-(d-1)/2} (c2 e^{-2 pi i r} + c3 e^{2 pi i r})

    :return: dict with c1, c2, c3 (complex) and the relative residuals.

    """
    check_dimension(d)
    rs = numpy.linspace(r_range[0], r_range[1], n_samples)
    amp = rs ** (-0.5 * (d - 1))
    y1 = numpy.array([restricted_integral(d, r) for r in rs])
    y2 = numpy.array([restricted_integral_two_sided(d, r) for r in rs])

    b1 = (amp * numpy.exp(2j * numpy.pi * rs))[:, None]
    c1, _, _, _ = numpy.linalg.lstsq(b1, y1, rcond=None)
    b2 = numpy.column_stack([amp * numpy.exp(-2j * numpy.pi * rs), amp * numpy.exp(2j * numpy.pi * rs)])
    c23, _, _, _ = numpy.linalg.lstsq(b2, y2, rcond=None)

    res1 = numpy.linalg.norm(b1 @ c1 - y1) / numpy.linalg.norm(y1)
    res2 = numpy.linalg.norm(b2 @ c23 - y2) / numpy.linalg.norm(y2)
    logger.debug("Kernel constants for d=%d: c1=%s, c2=%s, c3=%s", d, c1[0], c23[0], c23[1])
    return {
        "c1": complex(c1[0]),
        "c2": complex(c23[0]),
        "c3": complex(c23[1]),
        "residual_c1": float(res1),
        "residual_c23": float(res2),
        "r_range": [float(r_range[0]), float(r_range[1])],
    }


def bessel_identity_check(d, r_values):
    """
    Compare J(r) + J(-r) (panel quadrature) with r^{-nu} J_nu(2 pi r)
    (scipy.special) through a single fitted constant.

    :return: (constant, max deviation |num - C den| / max |num|)

    """
    check_dimension(d)
    rs = numpy.asarray(r_values, dtype=float)
    nu = bessel_order(d)
    num = numpy.array([(eval_J(d, r) + eval_J(d, -r)).real for r in rs])
    den = rs ** (-nu) * scipy.special.jv(nu, 2.0 * numpy.pi * rs)
    const = float(numpy.dot(num, den) / numpy.dot(den, den))
    dev = float(numpy.max(numpy.abs(num - const * den)) / numpy.max(numpy.abs(num)))
    return const, dev
