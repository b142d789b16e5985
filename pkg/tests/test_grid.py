"""
Tests for wavesplitlib.wavesplitgrid.
"""

import numpy
import pytest
import scipy.special

from wavesplitlib.wavesplitexception import WaveSplitValidationException
from wavesplitlib.wavesplitgrid import (
    SPHERE_MEASURE,
    RadialFunction,
    annulus_bump,
    dual_frequency_grid,
    gaussian_profile,
    inner_product,
    l2_norm,
    lp_norm,
    make_grid,
    read_function_csv,
    sample_function,
    weighted_sup,
    write_function_csv,
    zero_function,
)


def test_uniform_midpoint_layout():
    grid = make_grid(3, r_max=10.0, M=100)
    h = 0.1
    numpy.testing.assert_allclose(grid.points[:3], [0.05, 0.15, 0.25])
    numpy.testing.assert_allclose(numpy.diff(grid.points), h)
    assert grid.size == 100
    assert numpy.sum(grid.weights) == pytest.approx(10.0, rel=1e-12)
    assert grid.points[-1] < grid.r_max


def test_grid_is_read_only():
    grid = make_grid(4, r_max=4.0, M=64)
    with pytest.raises(ValueError):
        grid.points[0] = 1.0


@pytest.mark.parametrize(
    "d, M, layout",
    [
        (2, 64, "uniform-midpoint"),
        (6, 64, "uniform-midpoint"),
        (3, 8, "uniform-midpoint"),
        (3, 64, "chebyshev"),
        (5, 64, "bessel-zero"),
    ],
)
def test_make_grid_rejects_bad_arguments(d, M, layout):
    with pytest.raises(WaveSplitValidationException):
        make_grid(d, r_max=8.0, M=M, layout=layout)


def test_make_grid_rejects_bad_radius():
    with pytest.raises(WaveSplitValidationException):
        make_grid(3, r_max=0.0, M=64)
    with pytest.raises(WaveSplitValidationException):
        make_grid(3, r_max=1.0, M=64, layout="log-linear-hybrid")


def test_hybrid_layout_quadrature():
    grid = make_grid(3, r_max=8.0, M=256, layout="log-linear-hybrid")
    assert grid.size == 256
    assert numpy.all(numpy.diff(grid.points) > 0)
    assert numpy.all(grid.weights > 0)
    # Exact for constants and linear functions, close for quadratics.
    assert numpy.sum(grid.weights) == pytest.approx(8.0, rel=1e-12)
    assert numpy.sum(grid.weights * grid.points) == pytest.approx(32.0, rel=1e-12)
    assert numpy.sum(grid.weights * grid.points**2) == pytest.approx(8.0**3 / 3.0, rel=1e-5)
    # Gauss-Legendre panels resolve the small radii.
    assert grid.points[0] < 2.0**-10


def test_dual_frequency_grid():
    grid = make_grid(5, r_max=8.0, M=512)
    fgrid = dual_frequency_grid(grid)
    assert fgrid.size == 512
    assert fgrid.rho_max == pytest.approx(32.0)
    numpy.testing.assert_allclose(numpy.diff(fgrid.points), 1.0 / 16.0)
    assert fgrid == dual_frequency_grid(make_grid(5, r_max=8.0, M=512))

def test_bessel_zero_layout():
    grid = make_grid(4, r_max=8.0, M=256)
    assert grid.layout == "bessel-zero"
    zeros = scipy.special.jn_zeros(1, 257)
    numpy.testing.assert_allclose(grid.points, 8.0 * zeros[:-1] / zeros[-1], rtol=1e-14)
    assert grid.points[-1] < grid.r_max
    # Far from the origin the nodes and weights approach the midpoint rule.
    assert grid.weights[-1] == pytest.approx(8.0 / 256, rel=1e-2)
    # int_0^inf r^3 exp(-pi r^2) dr = 1 / (2 pi^2)
    assert numpy.sum(grid.measure * numpy.exp(-numpy.pi * grid.points**2)) == pytest.approx(
        0.5 / numpy.pi**2, rel=1e-12
    )
    fgrid = dual_frequency_grid(grid)
    assert fgrid.layout == "bessel-zero"
    assert fgrid.size == 256
    assert fgrid.rho_max == pytest.approx(zeros[-1] / (16.0 * numpy.pi))
    numpy.testing.assert_allclose(fgrid.points, zeros[:-1] / (16.0 * numpy.pi), rtol=1e-14)


def test_bessel_zero_csv_round_trip(tmp_path):
    grid = make_grid(4, r_max=8.0, M=128)
    f = annulus_bump(grid, 1.0, 3.0) * numpy.exp(1j * grid.points)
    out_file = str(tmp_path / "f4.csv")
    write_function_csv(out_file, f)
    g = read_function_csv(out_file, 4)
    assert g.grid == grid
    numpy.testing.assert_array_equal(g.values, f.values)



def test_dual_frequency_grid_hybrid():
    grid = make_grid(3, r_max=8.0, M=256, layout="log-linear-hybrid")
    fgrid = dual_frequency_grid(grid)
    assert fgrid.size == int(numpy.sum(grid.points > 1.0))
    assert fgrid.rho_max == pytest.approx(fgrid.size / 16.0)


def test_grid_equality_and_hash():
    a = make_grid(3, r_max=8.0, M=64)
    b = make_grid(3, r_max=8.0, M=64)
    c = make_grid(4, r_max=8.0, M=64)
    assert a == b
    assert hash(a) == hash(b)
    assert a != c


def test_radial_function_checks(grid3):
    with pytest.raises(WaveSplitValidationException):
        RadialFunction(grid3, numpy.zeros(grid3.size - 1))
    bad = numpy.zeros(grid3.size)
    bad[3] = numpy.nan
    with pytest.raises(WaveSplitValidationException):
        RadialFunction(grid3, bad)
    f = zero_function(grid3)
    with pytest.raises(ValueError):
        f.values[0] = 1.0


def test_radial_function_arithmetic(grid3):
    f = gaussian_profile(grid3)
    g = sample_function(grid3, lambda r: 1j * r)
    numpy.testing.assert_allclose((f + g).values, f.values + g.values)
    numpy.testing.assert_allclose((2.0 * f - g).values, 2.0 * f.values - g.values)
    numpy.testing.assert_allclose((-f).values, -f.values)
    numpy.testing.assert_allclose(g.conj().values, -1j * grid3.points)
    other = gaussian_profile(make_grid(3, r_max=4.0, M=512))
    with pytest.raises(WaveSplitValidationException):
        f + other


@pytest.mark.parametrize("d", [3, 4, 5])
def test_gaussian_norms(d):
    # int_{R^d} exp(-2 pi |x|^2) dx = 2^{-d/2}
    grid = make_grid(d, r_max=8.0, M=512)
    f = gaussian_profile(grid)
    assert l2_norm(f) == pytest.approx(2.0 ** (-0.25 * d), rel=1e-6)
    # int exp(-pi |x|^2) dx = 1
    assert lp_norm(f, 1) == pytest.approx(1.0, rel=1e-6)
    assert lp_norm(f, numpy.inf) == pytest.approx(numpy.exp(-numpy.pi * grid.points[0] ** 2))
    assert inner_product(f, f).real == pytest.approx(l2_norm(f) ** 2, rel=1e-12)


def test_lp_norm_rejects_small_p(grid3):
    with pytest.raises(WaveSplitValidationException):
        lp_norm(gaussian_profile(grid3), 0.5)


def test_inner_product_is_conjugate_linear(grid3, complex_bump3):
    f = gaussian_profile(grid3)
    lhs = inner_product(f, 1j * complex_bump3)
    rhs = -1j * inner_product(f, complex_bump3)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_sphere_measure():
    assert SPHERE_MEASURE[3] == pytest.approx(4.0 * numpy.pi)
    assert SPHERE_MEASURE[5] == pytest.approx(8.0 * numpy.pi**2 / 3.0)


def test_annulus_bump_support(grid3):
    f = annulus_bump(grid3, 2.0, 3.0)
    r = grid3.points
    assert numpy.all(f.values[(r <= 2.0) | (r >= 3.0)] == 0.0)
    assert weighted_sup(f, 0.0) == pytest.approx(1.0, rel=1e-2)
    with pytest.raises(WaveSplitValidationException):
        annulus_bump(grid3, 3.0, 2.0)


def test_function_csv_round_trip(tmp_path, grid3, complex_bump3):
    out_file = str(tmp_path / "f.csv")
    write_function_csv(out_file, complex_bump3)
    g = read_function_csv(out_file, 3)
    assert g.grid == grid3
    numpy.testing.assert_array_equal(g.values, complex_bump3.values)


def test_function_csv_rejects_wrong_header(tmp_path):
    bad_file = tmp_path / "bad.csv"
    bad_file.write_text("x,y\n1,2\n")
    with pytest.raises(WaveSplitValidationException):
        read_function_csv(str(bad_file), 3)
    with pytest.raises(WaveSplitValidationException):
        read_function_csv(str(tmp_path / "missing.csv"), 3)
