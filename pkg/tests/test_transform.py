"""
Tests for wavesplitlib.wavesplittransform.
"""

import json

import numpy
import pytest
import scipy.special

from wavesplitlib.wavesplitexception import WaveSplitAliasingException, WaveSplitValidationException
from wavesplitlib.wavesplitgrid import (
    KERNEL_SPHERE_MEASURE,
    RadialFunction,
    annulus_bump,
    dual_frequency_grid,
    gaussian_profile,
    l2_norm,
    make_grid,
    sobolev_norm,
)
from wavesplitlib.wavesplittransform import (
    STANDARD_PARAMS,
    DeformedParams,
    Spectrum,
    band_dyadic,
    band_gt,
    band_le,
    band_range,
    calibrate_kappa,
    check_band_limited,
    forward,
    get_plan,
    inverse,
    lp_project,
    mismatch_profile,
    plancherel_defect,
    radial_derivative,
    working_params,
    write_spectrum,
)
from wavesplitlib.wavesplitutils import fit_index_slope, rel_error


def test_core_is_orthogonal(grid_d):
    assert get_plan(grid_d).orthogonality_defect() < 1e-9


def test_core_d3_is_a_sine_transform(grid3):
    # On the dual midpoint grids the d = 3 core is the orthonormal DST-IV.
    M = grid3.size
    idx = numpy.arange(M) + 0.5
    dst4 = numpy.sqrt(2.0 / M) * numpy.sin(numpy.pi * numpy.outer(idx, idx) / M)
    numpy.testing.assert_allclose(get_plan(grid3).core, dst4, atol=1e-12)


def test_plan_is_cached(grid3):
    assert get_plan(grid3) is get_plan(make_grid(3, r_max=8.0, M=512))
    assert get_plan(grid3).fgrid == dual_frequency_grid(grid3)


@pytest.mark.parametrize("params", [STANDARD_PARAMS, DeformedParams(1.0, 0.5), DeformedParams(-0.5, -1.0)])
def test_round_trip(grid_d, params):
    f = gaussian_profile(grid_d, width=1.5) * numpy.exp(1j * grid_d.points)
    g = inverse(forward(f, params), grid_d)
    assert rel_error(g.values, f.values) < 1e-8


def test_round_trip_working_params(grid_d):
    f = gaussian_profile(grid_d, width=1.5, center=2.0)
    params = working_params(grid_d.dimension)
    assert params.alpha == 0.0
    assert params.beta == 0.5 * (grid_d.dimension - 1) - 2.0
    g = inverse(forward(f, params), grid_d)
    assert rel_error(g.values, f.values) < 1e-8


def test_self_dual_gaussian_d3(grid3):
    spec = forward(gaussian_profile(grid3))
    numpy.testing.assert_allclose(spec.values, numpy.exp(-numpy.pi * spec.rho**2), atol=1e-10)


def test_plancherel(grid_d):
    f = annulus_bump(grid_d, 1.0, 4.0, sharpness=1.0) * numpy.exp(2j * grid_d.points)
    assert plancherel_defect(f) < 1e-10
    assert sobolev_norm(f, 0.0) == pytest.approx(l2_norm(f), rel=1e-10)
    assert sobolev_norm(f, 0.0, homogeneous=True) == pytest.approx(l2_norm(f), rel=1e-10)
    assert sobolev_norm(f, 1.0) > l2_norm(f)


def test_zero_function_plancherel(grid3):
    assert plancherel_defect(RadialFunction(grid3, numpy.zeros(grid3.size))) == 0.0


def test_kappa_scale(grid3):
    f = gaussian_profile(grid3)
    ref = KERNEL_SPHERE_MEASURE[3]
    base = forward(f)
    scaled = forward(f, kappa=1.01 * ref)
    numpy.testing.assert_allclose(scaled.values, 1.01 * base.values, rtol=1e-12)
    assert scaled.kappa == pytest.approx(1.01 * ref)
    # The scale enters both directions, so the round trip is off by 1.01^2.
    g = inverse(scaled, grid3)
    numpy.testing.assert_allclose(g.values, 1.0201 * f.values, rtol=1e-9, atol=1e-14)


def test_deformed_params_check():
    with pytest.raises(WaveSplitValidationException):
        DeformedParams(3.0, 0.0).check(3)
    with pytest.raises(WaveSplitValidationException):
        DeformedParams(0.0, -4.0).check(4)
    DeformedParams(4.9, -4.9).check(5)


def test_spectrum_checks(grid3):
    fgrid = dual_frequency_grid(grid3)
    with pytest.raises(WaveSplitValidationException):
        Spectrum(fgrid, numpy.zeros(3), STANDARD_PARAMS, 3, 1.0)
    spec = Spectrum(fgrid, numpy.zeros(fgrid.size), STANDARD_PARAMS, 3, 1.0)
    assert spec.top_octave_fraction == 0.0
    with pytest.raises(ValueError):
        spec.values[0] = 1.0


def test_inverse_rejects_other_dimension(grid3):
    spec = forward(gaussian_profile(grid3))
    with pytest.raises(WaveSplitValidationException):
        inverse(spec, make_grid(4, r_max=8.0, M=512))


def test_white_noise_is_aliased(grid3):
    noise = numpy.random.default_rng(3).standard_normal(grid3.size)
    f = RadialFunction(grid3, noise)
    with pytest.raises(WaveSplitAliasingException):
        check_band_limited(f)
    with pytest.raises(WaveSplitAliasingException):
        forward(f, alias_tol=1e-6)
    with pytest.raises(WaveSplitAliasingException):
        sobolev_norm(f, 1.0)


def test_band_multipliers():
    rho = numpy.array([0.5, 4.0, 8.0, 16.0, 20.0])
    numpy.testing.assert_array_equal(band_le(4.0).multiplier(rho), [1.0, 1.0, 0.0, 0.0, 0.0])
    numpy.testing.assert_array_equal(band_gt(4.0).multiplier(rho), [0.0, 0.0, 1.0, 1.0, 1.0])
    numpy.testing.assert_array_equal(band_dyadic(2).multiplier(rho), [0.0, 0.0, 1.0, 0.0, 0.0])


def test_dyadic_bands_telescope():
    rho = numpy.linspace(0.01, 30.0, 3001)
    total = band_le(2.0**-3).multiplier(rho)
    for k in range(-3, 4):
        total = total + band_dyadic(k).multiplier(rho)
    numpy.testing.assert_allclose(total, band_le(16.0).multiplier(rho), atol=1e-15)


def test_band_check(grid3):
    fgrid = dual_frequency_grid(grid3)
    band_le(16.0).check(fgrid)
    band_dyadic(3).check(fgrid)
    with pytest.raises(WaveSplitValidationException):
        band_le(32.0).check(fgrid)
    with pytest.raises(WaveSplitValidationException):
        band_dyadic(4).check(fgrid)
    with pytest.raises(WaveSplitValidationException):
        band_gt(0.0).check(fgrid)


def test_band_range(grid3):
    fgrid = dual_frequency_grid(grid3)
    assert band_range(fgrid) == (-6, 3)
    assert band_range(fgrid, clean_top_octave=True) == (-6, 2)


def test_lp_projections_sum_to_identity(grid_d):
    f = gaussian_profile(grid_d, width=1.0, center=3.0)
    low = lp_project(f, band_le(2.0))
    high = lp_project(f, band_gt(2.0))
    assert rel_error((low + high).values, f.values) < 1e-8
    with pytest.raises(WaveSplitValidationException):
        lp_project(f, band_le(64.0))


def test_mismatch_profile(bump3):
    profile = mismatch_profile(bump3, [0, 1, 2, 3])
    assert profile["m"] == [0, 1, 2, 3]
    assert len(profile["norms"]) == 4
    assert all(v >= 0.0 for v in profile["norms"])


def test_mismatch_decay():
    # Fine frequency spacing so the lowest cut still holds several points.
    grid = make_grid(3, r_max=128.0, M=2048)
    f = annulus_bump(grid, 1.5, 3.5, sharpness=1.0)
    profile = mismatch_profile(f, [3, 4, 5])
    assert all(v > 0.0 for v in profile["norms"])
    assert profile["slope"] <= -2.0


def test_gaussian_band_decay():
    # Narrow enough that bands 2..5 all stay above rounding.
    grid = make_grid(3, r_max=8.0, M=2048)
    f = gaussian_profile(grid, width=0.1)
    ks = [2, 3, 4, 5]
    norms = [l2_norm(lp_project(f, band_dyadic(k))) for k in ks]
    assert all(n > 0.0 for n in norms)
    assert all(b < a for a, b in zip(norms[:-1], norms[1:]))
    slope, _ = fit_index_slope(ks, norms)
    assert slope <= -4.0


def _bump_values(s, r_lo=1.5, r_hi=3.5, sharpness=1.0):
    x = (2.0 * s - r_lo - r_hi) / (r_hi - r_lo)
    return numpy.exp(sharpness - sharpness / (1.0 - x**2))


def test_working_transform_matches_direct_quadrature(grid3, bump3):
    # d = 3, beta = -1: F(rho) = (2 / rho) int sin(2 pi rho r) f(r) dr.
    spec = forward(bump3, working_params(3))
    nodes, weights = numpy.polynomial.legendre.leggauss(64)
    edges = numpy.linspace(1.5, 3.5, 41)
    half = 0.5 * numpy.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    s = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    rho = spec.rho
    direct = (2.0 / rho) * (numpy.sin(2.0 * numpy.pi * numpy.outer(rho, s)) @ (w * _bump_values(s)))
    assert rel_error(spec.values, direct) < 1e-6


def test_calibrate_kappa_d3():
    kappa, rel = calibrate_kappa(3, M=512, r_max=8.0)
    assert kappa == pytest.approx(2.0 * numpy.pi, rel=1e-10)
    assert rel < 1e-10


def test_write_spectrum(tmp_path, grid3):
    spec = forward(gaussian_profile(grid3), working_params(3))
    csv_file, json_file = write_spectrum(str(tmp_path / "spectrum"), spec)
    with open(csv_file) as f:
        assert f.readline().strip() == "rho,re,im"
    with open(json_file) as f:
        meta = json.load(f)
    assert meta["d"] == 3
    assert meta["beta"] == -1.0
    assert meta["kappa"] == pytest.approx(2.0 * numpy.pi)


@pytest.mark.parametrize("d", [4, 5])
def test_self_dual_gaussian(d):
    grid = make_grid(d, r_max=8.0, M=512)
    spec = forward(gaussian_profile(grid))
    numpy.testing.assert_allclose(spec.values, numpy.exp(-numpy.pi * spec.rho**2), atol=1e-8)
    # exp(-pi a r^2) has transform a^{-d/2} exp(-pi rho^2 / a).
    spec = forward(gaussian_profile(grid, width=0.5))
    numpy.testing.assert_allclose(spec.values, 0.5**d * numpy.exp(-numpy.pi * 0.25 * spec.rho**2), atol=1e-8)


def test_d4_core_is_close_to_the_hankel_matrix():
    grid = make_grid(4, r_max=8.0, M=256)
    plan = get_plan(grid)
    assert grid.layout == "bessel-zero"
    assert plan.fgrid.layout == "bessel-zero"
    assert plan.orthogonal
    # Before the polar step the core is the symmetric matrix 2 J_1(j_m j_n / S) / (S |J_2(j_m) J_2(j_n)|).
    zeros = scipy.special.jn_zeros(1, grid.size + 1)
    S = zeros[-1]
    j = zeros[:-1]
    j2 = numpy.abs(scipy.special.jv(2, j))
    hankel = 2.0 * scipy.special.jv(1, numpy.outer(j, j) / S) / (S * numpy.outer(j2, j2))
    f = gaussian_profile(grid, width=1.5).values
    sqrt_wr = numpy.sqrt(grid.measure)
    numpy.testing.assert_allclose(plan.core @ (sqrt_wr * f), hankel @ (sqrt_wr * f), atol=1e-9)


@pytest.mark.parametrize("d", [3, 4])
def test_radial_derivative(d):
    grid = make_grid(d, r_max=8.0, M=512)
    f = gaussian_profile(grid)
    r = grid.points
    expected = -2.0 * numpy.pi * r * numpy.exp(-numpy.pi * r**2)
    numpy.testing.assert_allclose(radial_derivative(f).values, expected, atol=1e-7)


def test_calibrate_kappa_d4():
    kappa, rel = calibrate_kappa(4)
    assert kappa == pytest.approx(4.0 * numpy.pi, rel=1e-8)
    assert rel < 1e-8
