"""
Module that contains the deformed radial Fourier transform, its inverse,
the transform plan cache and the Littlewood-Paley projectors.
"""
############################################################################
#  wavesplittransform.py
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
# Purpose:  The radial transform
#
#               F(rho) = kappa rho^alpha int [J + J(-)](rho r) r^{beta+d-1} f(r) dr
#
#           is computed as diagonal scalings around a core matrix
#           S = kappa W_rho^{1/2} A W_r^{1/2}, A = 2 Re J(rho r). On the
#           default grids (midpoint for odd d, J_1 zeros for d = 4) both
#           quadratures are exact for band limited data and S is orthogonal
#           up to truncation: exactly for d = 3 (a DST-IV), and after
#           replacing S by its polar factor for d = 4, 5. The inverse is S^T.
#
# History:
# Version 1.0 - Created.
# Version 1.1 - d = 4 on the Bessel zero grids.
#
############################################################################

import functools
import logging
import math
from dataclasses import dataclass, field

import numpy

import wavesplitlib

from .wavesplitexception import (
    WaveSplitAliasingException,
    WaveSplitValidationException,
)
from .wavesplitgrid import (
    EXACT_LAYOUTS,
    KERNEL_SPHERE_MEASURE,
    SPHERE_MEASURE,
    FrequencyGrid,
    RadialFunction,
    dual_frequency_grid,
    l2_norm,
    make_grid,
)
from .wavesplitkernels import kernel_even, kernel_even_derivative, kernel_odd, k_imag
from .wavesplitutils import TRANSITION_RATIO, chi_le, fit_index_slope, write_csv_atomic, write_json_atomic

logger = logging.getLogger(__name__)

PLAN_CACHE_SIZE = 4
ORTHOGONALITY_TOL = 1e-12
NEWTON_SCHULZ_MAX_ITER = 60
BAND_LIMIT_TOL = 1e-8
TOP_OCTAVE_TOL = 1e-6
CALIBRATION_M = 2048
CALIBRATION_R_MAX = 32.0


@dataclass(frozen=True)
class DeformedParams:
    alpha: float = 0.0
    beta: float = 0.0

    def check(self, d):
        if not self.alpha < d:
            raise WaveSplitValidationException(f"alpha = {self.alpha} must be smaller than d = {d}.")
        if not self.beta > -d:
            raise WaveSplitValidationException(f"beta = {self.beta} must be larger than -d = {-d}.")


STANDARD_PARAMS = DeformedParams(0.0, 0.0)


def working_params(d):
    """
    The pair used by the decomposition: alpha = 0, beta = (d - 1)/2 - 2.
    """
    return DeformedParams(0.0, 0.5 * (d - 1) - 2.0)


@dataclass(frozen=True, eq=False)
class Spectrum:
    grid: FrequencyGrid
    values: numpy.ndarray = field(repr=False)
    params: DeformedParams
    dimension: int
    kappa: float

    def __post_init__(self):
        vals = numpy.array(self.values, dtype=complex)
        if vals.ndim != 1 or vals.size != self.grid.size:
            raise WaveSplitValidationException("Spectrum length does not match its frequency grid.")
        if not numpy.all(numpy.isfinite(vals)):
            raise WaveSplitValidationException("Spectrum has non-finite entries.")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def rho(self):
        return self.grid.points

    def with_values(self, values):
        return Spectrum(self.grid, values, self.params, self.dimension, self.kappa)

    def energy_density(self):
        return self.grid.measure(self.dimension) * numpy.abs(self.values) ** 2

    @property
    def top_octave_fraction(self):
        """
        Fraction of the spectral energy above rho_max / 2.
        """
        dens = self.energy_density()
        total = numpy.sum(dens)
        if total == 0.0:
            return 0.0
        return float(numpy.sum(dens[self.rho > 0.5 * self.grid.rho_max]) / total)


@dataclass(frozen=True)
class Band:
    """
    A Littlewood-Paley band: kind 'le' (chi_{<=N}), 'gt' (1 - chi_{<=N})
    or 'dyadic' (chi_{<=2^{k+1}} - chi_{<=2^k}); value is N or k.
    """

    kind: str
    value: float

    def multiplier(self, rho):
        if self.kind == "le":
            return chi_le(rho, self.value)
        if self.kind == "gt":
            return 1.0 - chi_le(rho, self.value)
        if self.kind == "dyadic":
            a = 2.0 ** self.value
            return chi_le(rho, 2.0 * a) - chi_le(rho, a)
        raise WaveSplitValidationException(f"Band kind '{self.kind}' is not recognised.")

    @property
    def upper_edge(self):
        if self.kind == "dyadic":
            return TRANSITION_RATIO * 2.0 ** (self.value + 1)
        return TRANSITION_RATIO * self.value

    def check(self, fgrid):
        if self.kind in ("le", "gt") and not self.value > 0:
            raise WaveSplitValidationException(f"Band cutoff N = {self.value} must be positive.")
        if self.upper_edge > fgrid.rho_max:
            raise WaveSplitValidationException(
                f"Band {self.kind}({self.value}) reaches {self.upper_edge:g} which is beyond "
                f"rho_max = {fgrid.rho_max:g}."
            )


def band_le(N):
    return Band("le", float(N))


def band_gt(N):
    return Band("gt", float(N))


def band_dyadic(k):
    return Band("dyadic", int(k))


def band_range(fgrid, clean_top_octave=False):
    """
    (k_min, k_max) of the dyadic bands a frequency grid resolves. k_min is
    the first band reaching the smallest grid frequency; with
    clean_top_octave the upper edge must stay below rho_max / 2.
    """
    limit = 0.5 * fgrid.rho_max if clean_top_octave else fgrid.rho_max
    k_max = int(math.floor(math.log2(limit / TRANSITION_RATIO))) - 1
    k_min = int(math.ceil(math.log2(fgrid.points[0] / TRANSITION_RATIO))) - 1
    return k_min, k_max


def _newton_schulz(X):
    ident = numpy.eye(X.shape[1])
    residual = numpy.inf
    for it in range(NEWTON_SCHULZ_MAX_ITER):
        gram = X.T @ X
        new_residual = float(numpy.max(numpy.abs(gram - ident)))
        logger.debug("Newton-Schulz iteration %d: residual %.3e", it, new_residual)
        if new_residual < ORTHOGONALITY_TOL or new_residual >= residual:
            return X, min(new_residual, residual)
        residual = new_residual
        X = 1.5 * X - 0.5 * (X @ gram)
    return X, residual


def orthogonal_polar_factor(S):
    """
    The orthogonal factor U V^T of S = U Sigma V^T, by Newton-Schulz
    iteration with an SVD fallback.
    """
    X, residual = _newton_schulz(S.copy())
    if residual > 1e3 * ORTHOGONALITY_TOL:
        logger.debug("Newton-Schulz stalled at %.3e, using an SVD for the polar factor", residual)
        U, _, Vt = numpy.linalg.svd(S)
        X = U @ Vt
    return X


class TransformPlan:
    """
    The matrices of the radial transform between one radial grid and one
    frequency grid. Matrices are built on first use.
    """

    def __init__(self, rgrid, fgrid):
        self.rgrid = rgrid
        self.fgrid = fgrid
        self.d = rgrid.dimension
        self.kappa_ref = KERNEL_SPHERE_MEASURE[self.d]
        self.sqrt_wr = numpy.sqrt(rgrid.measure)
        self.sqrt_wrho = numpy.sqrt(fgrid.measure(self.d))
        self.orthogonal = rgrid.layout == EXACT_LAYOUTS[self.d] and fgrid == dual_frequency_grid(rgrid)
        self._core = None
        self._odd = None
        self._deriv = None

    def _arguments(self):
        return numpy.outer(self.fgrid.points, self.rgrid.points)

    @property
    def core(self):
        if self._core is None:
            S = 2.0 * kernel_even(self.d, self._arguments())
            S *= self.kappa_ref * self.sqrt_wrho[:, None]
            S *= self.sqrt_wr[None, :]
            if self.orthogonal and self.d != 3:
                S = orthogonal_polar_factor(S)
            self._core = S
            logger.debug("Built transform core %s for d=%d", S.shape, self.d)
        return self._core

    @property
    def odd_kernel(self):
        """
        (Im J - Im K)(rho_k r_j), rows indexed by frequency.
        """
        if self._odd is None:
            s = self._arguments()
            self._odd = kernel_odd(self.d, s) - k_imag(self.d, s)
            logger.debug("Built odd kernel matrix for d=%d", self.d)
        return self._odd

    @property
    def derivative_kernel(self):
        """
        d/dr of 2 Re J(rho r), i.e. 2 rho Re J'(rho r).
        """
        if self._deriv is None:
            s = self._arguments()
            self._deriv = 2.0 * self.fgrid.points[:, None] * kernel_even_derivative(self.d, s)
        return self._deriv

    def orthogonality_defect(self):
        S = self.core
        if S.shape[0] != S.shape[1]:
            return numpy.inf
        return float(numpy.max(numpy.abs(S.T @ S - numpy.eye(S.shape[1]))))

    def forward_values(self, values, kappa=None):
        scale = 1.0 if kappa is None else kappa / self.kappa_ref
        return scale * (self.core @ (self.sqrt_wr * values)) / self.sqrt_wrho

    def inverse_values(self, values, kappa=None):
        scale = 1.0 if kappa is None else kappa / self.kappa_ref
        return scale * (self.core.T @ (self.sqrt_wrho * values)) / self.sqrt_wr


@functools.lru_cache(maxsize=PLAN_CACHE_SIZE)
def _cached_plan(rgrid, fgrid):
    return TransformPlan(rgrid, fgrid)


def get_plan(rgrid, fgrid=None):
    """
    The cached TransformPlan for a radial grid and (by default) its dual
    frequency grid.
    """
    if fgrid is None:
        fgrid = dual_frequency_grid(rgrid)
    return _cached_plan(rgrid, fgrid)


def clear_plan_cache():
    _cached_plan.cache_clear()


def forward(f, params=STANDARD_PARAMS, fgrid=None, kappa=None, alias_tol=None):
    """
    A function to compute the deformed radial Fourier transform.

    :param f: RadialFunction.
    :param params: DeformedParams (alpha, beta).
    :param fgrid: FrequencyGrid, the dual grid of f.grid when None.
    :param kappa: normalisation constant, the analytic sphere measure when None.
    :param alias_tol: when given, the largest allowed top-octave energy fraction.
    :return: Spectrum

    """
    d = f.dimension
    params.check(d)
    plan = get_plan(f.grid, fgrid)
    r = f.grid.points
    rho = plan.fgrid.points
    vals = plan.forward_values(r**params.beta * f.values, kappa)
    if params.alpha != 0.0:
        vals = rho**params.alpha * vals
    spec = Spectrum(
        grid=plan.fgrid,
        values=vals,
        params=params,
        dimension=d,
        kappa=plan.kappa_ref if kappa is None else float(kappa),
    )
    if alias_tol is not None and spec.top_octave_fraction > alias_tol:
        raise WaveSplitAliasingException(
            f"{spec.top_octave_fraction:.3e} of the spectral energy lies above rho_max/2 "
            f"(tolerance {alias_tol:.1e})."
        )
    return spec


def inverse(F, rgrid, kappa=None):
    """
    A function to invert the deformed radial Fourier transform.

    :param F: Spectrum.
    :param rgrid: RadialGrid of the output.
    :param kappa: normalisation constant, F.kappa when None.
    :return: RadialFunction

    """
    if rgrid.dimension != F.dimension:
        raise WaveSplitValidationException("Spectrum and radial grid have different dimensions.")
    plan = get_plan(rgrid, F.grid)
    kappa = F.kappa if kappa is None else kappa
    vals = F.values
    if F.params.alpha != 0.0:
        vals = F.rho ** (-F.params.alpha) * vals
    out = plan.inverse_values(vals, kappa)
    if F.params.beta != 0.0:
        out = rgrid.points ** (-F.params.beta) * out
    return RadialFunction(rgrid, out)


def check_band_limited(f, alias_tol=BAND_LIMIT_TOL, kappa=None):
    """
    The alpha = beta = 0 spectrum of f, raising an aliasing error when more
    than alias_tol of its energy lies in the top octave.
    """
    return forward(f, STANDARD_PARAMS, kappa=kappa, alias_tol=alias_tol)


def spectral_sobolev_norm(f, s, homogeneous=False, alias_tol=None):
    spec = check_band_limited(f, BAND_LIMIT_TOL if alias_tol is None else alias_tol)
    return spectrum_sobolev_norm(spec, s, homogeneous)


def sobolev_weight(rho, s, homogeneous=False):
    if homogeneous:
        return (2.0 * numpy.pi * rho) ** s
    return (1.0 + 4.0 * numpy.pi**2 * rho**2) ** (0.5 * s)


def spectrum_sobolev_norm(spec, s, homogeneous=False):
    """
    H^s norm read from an alpha = beta = 0 spectrum.
    """
    w = sobolev_weight(spec.rho, s, homogeneous)
    d = spec.dimension
    return float(numpy.sqrt(SPHERE_MEASURE[d] * numpy.sum(spec.energy_density() * w**2)))


def plancherel_defect(f):
    """
    Relative mismatch between the spectral and radial L^2 norms.
    """
    norm = l2_norm(f)
    if norm == 0.0:
        return 0.0
    return abs(spectrum_sobolev_norm(forward(f), 0.0) - norm) / norm


def lp_project(f, band, kappa=None):
    """
    Apply the band's smooth multiplier to the alpha = beta = 0 spectrum and
    transform back.

    :param band: Band (band_le, band_gt or band_dyadic).

    """
    plan = get_plan(f.grid)
    band.check(plan.fgrid)
    spec = forward(f, STANDARD_PARAMS, kappa=kappa)
    return inverse(spec.with_values(band.multiplier(spec.rho) * spec.values), f.grid)


def radial_derivative(f):
    """
    d/dr f by differentiating the Bessel kernel of the inverse transform.
    """
    plan = get_plan(f.grid)
    spec = forward(f)
    weighted = plan.fgrid.measure(f.dimension) * spec.values
    return RadialFunction(f.grid, plan.kappa_ref * (plan.derivative_kernel.T @ weighted))


def mismatch_profile(f, m_values):
    """
    l2 norms of chi_{<=1/2} P_{<=2^{-m}} f and their fitted slope in m.
    Bands that fall below the smallest grid frequency give 0 and are
    left out of the fit.
    """
    cut = chi_le(f.grid.points, 0.5)
    norms = []
    for m in m_values:
        low = lp_project(f, band_le(2.0 ** (-m)))
        norms.append(l2_norm(low * cut))
    pos = [(m, v) for m, v in zip(m_values, norms) if v > 0]
    slope = None
    if len(pos) >= 2:
        slope, _ = fit_index_slope([m for m, _ in pos], [v for _, v in pos])
    return {"m": list(m_values), "norms": norms, "slope": slope}


def calibrate_kappa(d, M=CALIBRATION_M, r_max=CALIBRATION_R_MAX):
    """
    Fix kappa from the raw quadrature round trip of the Gaussian exp(-pi r^2)
    and compare it with the analytic sphere measure of S^{d-2}.

    :return: (kappa, relative difference to the analytic value)

    """
    rgrid = make_grid(d, r_max, M)
    fgrid = dual_frequency_grid(rgrid)
    r = rgrid.points
    A = 2.0 * kernel_even(d, numpy.outer(fgrid.points, r))
    f = numpy.exp(-numpy.pi * r**2)
    wr = rgrid.measure
    g = A.T @ (fgrid.measure(d) * (A @ (wr * f)))
    kappa = math.sqrt(numpy.sum(wr * f * f) / numpy.sum(wr * g * f))
    ref = KERNEL_SPHERE_MEASURE[d]
    logger.debug("Calibrated kappa for d=%d: %.12g (analytic %.12g)", d, kappa, ref)
    return kappa, abs(kappa - ref) / ref


def write_spectrum(out_base, spec):
    """
    Write a spectrum as '<out_base>.csv' (rho,re,im) and the JSON sidecar
    '<out_base>.json'.
    """
    csv_file = write_csv_atomic(
        out_base + ".csv", ["rho", "re", "im"], [spec.rho, spec.values.real, spec.values.imag]
    )
    json_file = write_json_atomic(
        out_base + ".json",
        {
            "alpha": spec.params.alpha,
            "beta": spec.params.beta,
            "d": spec.dimension,
            "kappa": spec.kappa,
            "version": wavesplitlib.WAVESPLIT_VERSION,
        },
    )
    return csv_file, json_file
