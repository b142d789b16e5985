"""
Tests for wavesplitlib.wavesplitwaves.
"""

import math

import numpy
import pytest

from wavesplitlib.wavesplitexception import (
    WaveSplitAliasingException,
    WaveSplitEmptyBandException,
    WaveSplitValidationException,
)
from wavesplitlib.wavesplitgrid import RadialFunction, annulus_bump, gaussian_profile, zero_function
from wavesplitlib.wavesplittransform import band_le
from wavesplitlib.wavesplitutils import rel_error
from wavesplitlib.wavesplitwaves import (
    band_sobolev_ratio,
    check_outside_unit_ball,
    decompose,
    decompose_band,
    decompose_head,
    decompose_tail,
    decompose_with_band,
    matching_residual,
    modified_components,
    select_N,
    spatial_leakage,
    spatial_leakage_high,
    support_fraction,
    zero_pair,
)


def test_out_plus_in_reconstructs(grid_d):
    f = annulus_bump(grid_d, 1.5, 3.5, sharpness=1.0) * numpy.exp(1j * grid_d.points)
    pair = decompose(f)
    assert rel_error(pair.total.values, f.values) < 1e-8
    assert pair.source_norm > 0.0


def test_real_data_gives_conjugate_parts(bump3):
    pair = decompose(bump3)
    numpy.testing.assert_allclose(pair.in_part.values, numpy.conj(pair.out_part.values), atol=1e-14)
    # The parts are genuinely complex.
    assert numpy.max(numpy.abs(pair.out_part.values.imag)) > 1e-3


def test_zero_function_decomposes_to_zero(grid3):
    pair = decompose(zero_function(grid3))
    assert numpy.all(pair.out_part.values == 0.0)
    assert numpy.all(pair.in_part.values == 0.0)
    z = zero_pair(grid3)
    assert z.source_norm == 0.0
    assert numpy.all(z.total.values == 0.0)


def test_aliased_input_is_rejected(grid3):
    noise = numpy.random.default_rng(11).standard_normal(grid3.size)
    with pytest.raises(WaveSplitAliasingException):
        decompose(RadialFunction(grid3, noise))


def test_head_and_tail_split_the_decomposition(complex_bump3):
    whole = decompose(complex_bump3).out_part
    tail = decompose_tail(complex_bump3, 1)
    head = decompose_with_band(complex_bump3, band_le(2.0))
    assert tail.band == 1
    assert rel_error((tail.out_part + head.out_part).values, whole.values) < 1e-10
    assert tail.truncation_norm >= 0.0


def test_decompose_band_and_head(complex_bump3):
    pair = decompose_band(complex_bump3, 1)
    assert pair.band == 1
    assert numpy.all(numpy.isfinite(pair.out_part.values))
    head = decompose_head(complex_bump3, 1)
    assert head.band == 1
    with pytest.raises(WaveSplitValidationException):
        decompose_band(complex_bump3, 4)
    with pytest.raises(WaveSplitValidationException):
        decompose_tail(complex_bump3, 4)
    with pytest.raises(WaveSplitValidationException):
        decompose_head(complex_bump3, 3)


def test_support_fraction(grid3, bump3):
    assert support_fraction(bump3) == 0.0
    assert support_fraction(gaussian_profile(grid3)) > 0.99
    assert support_fraction(zero_function(grid3)) == 0.0
    check_outside_unit_ball(bump3)
    with pytest.raises(WaveSplitValidationException):
        check_outside_unit_ball(gaussian_profile(grid3))


def test_select_n(bump3):
    N, tail = select_N(bump3, 0.5, 0.1)
    assert math.log2(N) == int(math.log2(N))
    assert tail <= 0.1
    with pytest.raises(WaveSplitAliasingException):
        select_N(bump3, 0.5, 1e-30)


def test_modified_components(bump3):
    pair = modified_components(bump3, 0.5, 0.1)
    assert pair.N >= 1.0
    assert pair.tail_norm <= 0.1
    assert pair.s0 == 0.5
    total = pair.plus_part + pair.minus_part
    assert rel_error(total.values, bump3.values) < 1e-10


@pytest.mark.parametrize("s0, delta0", [(0.0, 0.1), (1.0, 0.1), (0.5, 0.0)])
def test_modified_components_rejects_bad_parameters(bump3, s0, delta0):
    with pytest.raises(WaveSplitValidationException):
        modified_components(bump3, s0, delta0)


def test_modified_components_needs_support_outside_unit_ball(grid3):
    with pytest.raises(WaveSplitValidationException):
        modified_components(gaussian_profile(grid3), 0.5, 0.1)


def test_leakage_and_matching(complex_bump3):
    for side in ("out", "in"):
        value = spatial_leakage(complex_bump3, 1, side)
        assert numpy.isfinite(value) and value >= 0.0
        value = spatial_leakage_high(complex_bump3, side)
        assert numpy.isfinite(value) and value >= 0.0
    high = matching_residual(complex_bump3, 2, "high")
    low = matching_residual(complex_bump3, 1, "low")
    for res in (high, low):
        assert set(res) == {"l2", "h1"}
        assert numpy.isfinite(res["l2"]) and res["l2"] >= 0.0
    with pytest.raises(WaveSplitValidationException):
        matching_residual(complex_bump3, 1, "middle")


def test_matching_residual_of_zero(grid3):
    assert matching_residual(zero_function(grid3), 1) == {"l2": 0.0, "h1": 0.0}


def test_empty_band_is_reported(grid3):
    with pytest.raises(WaveSplitEmptyBandException):
        spatial_leakage(zero_function(grid3), 1)
    with pytest.raises(WaveSplitEmptyBandException):
        band_sobolev_ratio(zero_function(grid3), 1, 0.5)


def test_band_sobolev_ratio(complex_bump3):
    value = band_sobolev_ratio(complex_bump3, 1, 0.5)
    assert numpy.isfinite(value) and value > 0.0
