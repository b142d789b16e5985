"""
Module that contains the incoming/outgoing decomposition of radial
functions and the quantities measured on it.
"""
############################################################################
#  wavesplitwaves.py
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
# Purpose:  With F the working spectrum (alpha = 0, beta = (d-1)/2 - 2)
#           and m a frequency multiplier,
#
#               f_out = 1/2 inverse(m F) + i B,   f_in = 1/2 inverse(m F) - i B,
#               B(r)  = kappa r^{-beta} int (Im J - Im K)(rho r) rho^{d-1} m F drho,
#
#           so f_out + f_in is the inverse transform of m F and, for
#           real f, f_in is the conjugate of f_out.
#
# History:
# Version 1.0 - Created.
#
############################################################################

import logging
from dataclasses import dataclass
from typing import Optional

import numpy

from .wavesplitexception import (
    WaveSplitAliasingException,
    WaveSplitEmptyBandException,
    WaveSplitNumericalException,
    WaveSplitValidationException,
)
from .wavesplitgrid import RadialFunction, l2_norm, zero_function
from .wavesplittransform import (
    STANDARD_PARAMS,
    TOP_OCTAVE_TOL,
    band_dyadic,
    band_gt,
    band_le,
    band_range,
    check_band_limited,
    forward,
    get_plan,
    inverse,
    lp_project,
    spectrum_sobolev_norm,
    working_params,
)
from .wavesplitutils import TRANSITION_RATIO, chi_ge, chi_le

logger = logging.getLogger(__name__)

EMPTY_BAND_TOL = 1e-14
SUPPORT_TOL = 1e-6
LEAKAGE_RADIUS = 0.25
MAX_DYADIC_SEARCH = 64


@dataclass(frozen=True, eq=False)
class DecompositionPair:
    out_part: RadialFunction
    in_part: RadialFunction
    band: Optional[int] = None
    source_norm: float = 0.0
    truncation_norm: float = 0.0

    @property
    def total(self):
        return self.out_part + self.in_part


@dataclass(frozen=True, eq=False)
class ModifiedPair:
    plus_part: RadialFunction
    minus_part: RadialFunction
    N: float
    delta0: float
    s0: float = 0.0
    tail_norm: float = 0.0


def support_fraction(f, radius=1.0):
    """
    Fraction of the L^2 energy of f at r < radius.
    """
    dens = f.grid.measure * numpy.abs(f.values) ** 2
    total = numpy.sum(dens)
    if total == 0.0:
        return 0.0
    return float(numpy.sum(dens[f.grid.points < radius]) / total)


def check_outside_unit_ball(f, support_tol=SUPPORT_TOL):
    frac = support_fraction(f, 1.0)
    if frac > support_tol:
        raise WaveSplitValidationException(
            f"The function must be supported in r >= 1: {frac:.3e} of its energy lies inside the unit ball."
        )


def _decompose_multiplier(f, multiplier=None, kappa=None, alias_tol=TOP_OCTAVE_TOL):
    """
    The (out, in) pair for the spectral multiplier 'multiplier' (a callable
    of rho, or None for the identity).
    """
    d = f.dimension
    if alias_tol is not None:
        check_band_limited(f, alias_tol, kappa)
    params = working_params(d)
    plan = get_plan(f.grid)
    spec = forward(f, params, kappa=kappa)
    rho = spec.rho
    mF = spec.values if multiplier is None else multiplier(rho) * spec.values
    half = 0.5 * inverse(spec.with_values(mF), f.grid).values
    weighted = plan.fgrid.measure(d) * rho ** (-params.alpha) * mF
    B = spec.kappa * f.grid.points ** (-params.beta) * (plan.odd_kernel.T @ weighted)
    out_vals = half + 1j * B
    in_vals = half - 1j * B
    if not (numpy.all(numpy.isfinite(out_vals)) and numpy.all(numpy.isfinite(in_vals))):
        raise WaveSplitNumericalException("The decomposition produced non-finite values.")
    return RadialFunction(f.grid, out_vals), RadialFunction(f.grid, in_vals)


def decompose(f, kappa=None, alias_tol=TOP_OCTAVE_TOL):
    """
    A function to split f into its outgoing and incoming components.

    :param f: RadialFunction.
    :param kappa: transform normalisation, the analytic value when None.
    :param alias_tol: largest top-octave energy fraction of f (None skips the check).
    :return: DecompositionPair

    """
    out_part, in_part = _decompose_multiplier(f, None, kappa, alias_tol)
    return DecompositionPair(out_part, in_part, None, l2_norm(f))


def decompose_with_band(f, band, kappa=None, alias_tol=TOP_OCTAVE_TOL):
    """
    Decomposition of f with the multiplier of a Littlewood-Paley Band
    applied to the working spectrum (e.g. the low and high caps).
    """
    band.check(get_plan(f.grid).fgrid)
    out_part, in_part = _decompose_multiplier(f, band.multiplier, kappa, alias_tol)
    k = int(band.value) if band.kind == "dyadic" else None
    return DecompositionPair(out_part, in_part, k, l2_norm(f))


def decompose_band(f, k, kappa=None, alias_tol=TOP_OCTAVE_TOL):
    """
    f_{out,k}, f_{in,k}: the decomposition with chi_{2^k}(rho) inserted.
    """
    return decompose_with_band(f, band_dyadic(k), kappa, alias_tol)


def decompose_tail(f, k0, kappa=None, alias_tol=TOP_OCTAVE_TOL):
    """
    f_{out/in, >= k0}: the sum of the band components over k >= k0,
    computed with the multiplier 1 - chi_{<=2^k0}. The part beyond the
    largest resolvable band is included and its norm is reported as
    truncation_norm.
    """
    fgrid = get_plan(f.grid).fgrid
    _, k_max = band_range(fgrid)
    if k0 > k_max:
        raise WaveSplitValidationException(f"Band k0 = {k0} is above the largest resolvable band {k_max}.")
    out_part, in_part = _decompose_multiplier(f, band_gt(2.0**k0).multiplier, kappa, alias_tol)
    cap = band_gt(2.0 ** (k_max + 1))
    params = working_params(f.dimension)
    spec = forward(f, params, kappa=kappa)
    truncation = l2_norm(inverse(spec.with_values(cap.multiplier(spec.rho) * spec.values), f.grid))
    return DecompositionPair(out_part, in_part, k0, l2_norm(f), truncation)


def decompose_head(f, k0, kappa=None, alias_tol=TOP_OCTAVE_TOL):
    """
    f_{out/in, <= k0+1}: the low-frequency counterpart of decompose_tail,
    multiplier chi_{<=2^{k0+2}}.
    """
    band = band_le(2.0 ** (k0 + 2))
    band.check(get_plan(f.grid).fgrid)
    out_part, in_part = _decompose_multiplier(f, band.multiplier, kappa, alias_tol)
    return DecompositionPair(out_part, in_part, k0, l2_norm(f))


def high_frequency_tail_norm(spec, N, s):
    """
    ||(1 - chi_{<=N}) f||_{H^s} from the alpha = beta = 0 spectrum.
    """
    return spectrum_sobolev_norm(spec.with_values(band_gt(N).multiplier(spec.rho) * spec.values), s)


def select_N(f, s0, delta0, alias_tol=TOP_OCTAVE_TOL):
    """
    The smallest N = 2^m (m >= 0) with ||P_{>N} f||_{H^s0} <= delta0.

    :return: (N, tail norm)

    """
    spec = check_band_limited(f, alias_tol)
    rho_max = spec.grid.rho_max
    for m in range(MAX_DYADIC_SEARCH):
        N = 2.0**m
        if TRANSITION_RATIO * N > rho_max:
            break
        tail = high_frequency_tail_norm(spec, N, s0)
        logger.debug("Tail norm for N=%g: %.3e (delta0 %.3e)", N, tail, delta0)
        if tail <= delta0:
            return N, tail
    raise WaveSplitAliasingException(
        f"No dyadic N resolvable on this grid gives ||P_(>N) f||_H^{s0} <= {delta0}."
    )


def modified_components(f, s0, delta0, kappa=None, support_tol=SUPPORT_TOL):
    """
    A function to compute the modified components

        f_+ = 1/2 P_{<=N} f + (P_{>N} f)_out,  f_- = 1/2 P_{<=N} f + (P_{>N} f)_in

    with N the smallest dyadic number whose H^s0 tail is below delta0.

    :param f: RadialFunction supported in r >= 1.
    :param s0: regularity in (0, 1).
    :param delta0: tail size, > 0.
    :return: ModifiedPair

    """
    if not 0.0 < s0 < 1.0:
        raise WaveSplitValidationException(f"s0 = {s0} must lie in (0, 1).")
    if not delta0 > 0.0:
        raise WaveSplitValidationException("delta0 must be positive.")
    check_outside_unit_ball(f, support_tol)
    N, tail = select_N(f, s0, delta0)
    low = lp_project(f, band_le(N), kappa)
    high = lp_project(f, band_gt(N), kappa)
    pair = decompose(high, kappa, alias_tol=None)
    logger.debug("Modified components with N=%g, tail %.3e", N, tail)
    return ModifiedPair(
        plus_part=0.5 * low + pair.out_part,
        minus_part=0.5 * low + pair.in_part,
        N=N,
        delta0=delta0,
        s0=s0,
        tail_norm=tail,
    )


def _band_norm_or_raise(f, k):
    band = lp_project(f, band_dyadic(k))
    norm = l2_norm(band)
    if norm == 0.0 or norm <= EMPTY_BAND_TOL * l2_norm(f):
        raise WaveSplitEmptyBandException(f"Band k = {k} of the function is empty.")
    return band, norm


def spatial_leakage(f, k, side="out"):
    """
    ||chi_{<=1/4} (P_{2^k} f)_{side, >= k-1}|| / ||P_{2^k} f||

    :param side: 'out' or 'in'.

    """
    band, norm = _band_norm_or_raise(f, k)
    tail = decompose_tail(band, k - 1, alias_tol=None)
    part = tail.out_part if side == "out" else tail.in_part
    return l2_norm(part * chi_le(f.grid.points, LEAKAGE_RADIUS)) / norm


def spatial_leakage_high(f, side="out"):
    """
    ||chi_{<=1/4} (P_{>1} f)_{side}|| / ||f||
    """
    norm = l2_norm(f)
    if norm == 0.0:
        return 0.0
    pair = decompose(lp_project(f, band_gt(1.0)), alias_tol=None)
    part = pair.out_part if side == "out" else pair.in_part
    return l2_norm(part * chi_le(f.grid.points, LEAKAGE_RADIUS)) / norm


def matching_residual(f, k0, side="high"):
    """
    Size of the frequency matching residual, relative to f.

    side='high': h = (P_{>2^k0} f)_out - (P_{>2^k0} f)_{out, >= k0-1}
    side='low':  h = (P_{<=2^k0} f)_out - (P_{<=2^k0} f)_{out, <= k0+1}

    :return: dict with the L^2 and H^1 ratios.

    """
    f_norm = l2_norm(f)
    if f_norm == 0.0:
        return {"l2": 0.0, "h1": 0.0}
    if side == "high":
        g = lp_project(f, band_gt(2.0**k0))
        # Out-part minus the tail is the part under chi_{<=2^{k0-1}}.
        h, _ = _decompose_multiplier(g, band_le(2.0 ** (k0 - 1)).multiplier, alias_tol=None)
    elif side == "low":
        band_le(2.0 ** (k0 + 2)).check(get_plan(f.grid).fgrid)
        g = lp_project(f, band_le(2.0**k0))
        h, _ = _decompose_multiplier(g, band_gt(2.0 ** (k0 + 2)).multiplier, alias_tol=None)
    else:
        raise WaveSplitValidationException(f"Matching side '{side}' must be 'high' or 'low'.")
    f_h1 = spectrum_sobolev_norm(forward(f, STANDARD_PARAMS), 1.0)
    h_h1 = spectrum_sobolev_norm(forward(h, STANDARD_PARAMS), 1.0)
    return {"l2": l2_norm(h) / f_norm, "h1": h_h1 / f_h1}


def band_sobolev_ratio(f, k, s):
    """
    ||chi_{>=1/4} f_{out,k}||_{H^s} / (2^{sk} ||P_{2^k} f||)
    """
    _, norm = _band_norm_or_raise(f, k)
    out_part = decompose_band(f, k, alias_tol=None).out_part
    part = out_part * chi_ge(f.grid.points, LEAKAGE_RADIUS)
    return spectrum_sobolev_norm(forward(part, STANDARD_PARAMS), s) / (2.0 ** (s * k) * norm)


def zero_pair(grid):
    z = zero_function(grid)
    return DecompositionPair(z, z, None, 0.0)
