"""
Tests for wavesplitlib.wavesplitflow.
"""

import numpy
import pytest
import scipy.integrate

from wavesplitlib.wavesplitexception import WaveSplitDomainEscapeException, WaveSplitValidationException
from wavesplitlib.wavesplitflow import (
    PropagatorPlan,
    boundary_fraction,
    cone_input,
    cone_radius,
    cone_split,
    crossing_time,
    dispersive_ratio,
    evolve_linear,
    evolve_many,
    gaussian_closed_form,
    is_admissible,
    kernel_oracle,
    strichartz_norm,
    sum_space_split,
)
from wavesplitlib.wavesplitgrid import annulus_bump, dual_frequency_grid, gaussian_profile, l2_norm, lp_norm, make_grid
from wavesplitlib.wavesplitutils import rel_error


def _bump_profile(s, r_lo=1.5, r_hi=3.5, sharpness=1.0):
    x = (2.0 * s - r_lo - r_hi) / (r_hi - r_lo)
    out = numpy.zeros_like(s)
    inside = numpy.abs(x) < 1.0
    out[inside] = numpy.exp(sharpness - sharpness / (1.0 - x[inside] ** 2))
    return out


def test_time_zero_is_identity(grid_d):
    f = annulus_bump(grid_d, 1.5, 3.5, sharpness=1.0) * numpy.exp(1j * grid_d.points)
    assert rel_error(evolve_linear(f, 0.0).values, f.values) < 1e-8


def test_mass_is_conserved(grid_d):
    f = annulus_bump(grid_d, 1.5, 3.5, sharpness=1.0)
    for t in (0.01, -0.03):
        assert l2_norm(evolve_linear(f, t)) == pytest.approx(l2_norm(f), rel=1e-8)


def test_group_property(complex_bump3):
    two_steps = evolve_linear(evolve_linear(complex_bump3, 0.01), 0.02)
    one_step = evolve_linear(complex_bump3, 0.03)
    assert rel_error(two_steps.values, one_step.values) < 1e-10


def test_time_reversal(bump3):
    forward_u = evolve_linear(bump3, 0.02)
    backward_u = evolve_linear(bump3.conj(), -0.02)
    numpy.testing.assert_allclose(backward_u.values, numpy.conj(forward_u.values), atol=1e-13)


def test_gaussian_matches_closed_form(grid3):
    f = gaussian_profile(grid3)
    numpy.testing.assert_allclose(gaussian_closed_form(grid3, 0.0).values, f.values, rtol=1e-14)
    for t in (0.05, -0.1):
        u = evolve_linear(f, t)
        numpy.testing.assert_allclose(u.values, gaussian_closed_form(grid3, t).values, atol=1e-9)


@pytest.mark.parametrize("d", [4, 5])
def test_gaussian_matches_closed_form_higher_dimensions(d):
    grid = make_grid(d, r_max=8.0, M=512)
    f = gaussian_profile(grid)
    for t in (0.05, -0.2):
        u = evolve_linear(f, t)
        numpy.testing.assert_allclose(u.values, gaussian_closed_form(grid, t).values, atol=1e-8)


def test_matches_kernel_oracle(grid3, bump3):
    t = 0.02
    u = evolve_linear(bump3, t)
    idx = numpy.arange(0, grid3.size, 16)
    oracle = kernel_oracle(_bump_profile, t, grid3.points[idx], 3.5)
    numpy.testing.assert_allclose(u.values[idx], oracle, atol=1e-7)
    with pytest.raises(WaveSplitValidationException):
        kernel_oracle(_bump_profile, 0.0, grid3.points[idx], 3.5)


def test_evolve_many_matches_single_times(complex_bump3):
    times = [0.0, 0.01, 0.02]
    many = evolve_many(complex_bump3, times)
    assert len(many) == 3
    for t, u in zip(times, many):
        numpy.testing.assert_allclose(u.values, evolve_linear(complex_bump3, t).values, atol=1e-13)


def test_escape_is_detected(grid3):
    edge = annulus_bump(grid3, 7.3, 7.9)
    assert boundary_fraction(edge) > 0.99
    with pytest.raises(WaveSplitDomainEscapeException):
        evolve_linear(edge, 0.0)
    u = evolve_linear(edge, 0.0, check_escape=False)
    assert rel_error(u.values, edge.values) < 1e-10


def test_propagator_plan(grid3):
    fgrid = dual_frequency_grid(grid3)
    plan = PropagatorPlan(fgrid, [0.0, 0.5])
    mult = plan.multipliers()
    assert mult.shape == (2, fgrid.size)
    numpy.testing.assert_array_equal(mult[0], 1.0)
    numpy.testing.assert_allclose(numpy.abs(mult[1]), 1.0)
    with pytest.raises(WaveSplitValidationException):
        PropagatorPlan(fgrid, [numpy.nan])


def test_dispersive_ratio(grid3):
    f = gaussian_profile(grid3)
    value = dispersive_ratio(f, 0.05, numpy.inf)
    assert numpy.isfinite(value) and value > 0.0
    with pytest.raises(WaveSplitValidationException):
        dispersive_ratio(f, 0.0, 4.0)
    with pytest.raises(WaveSplitValidationException):
        dispersive_ratio(f, 0.05, 1.5)


def test_dispersive_decay_law():
    # Large r_max keeps the spreading Gaussian (width ~ 4 pi t) off the boundary up to t = 16.
    grid = make_grid(3, r_max=400.0, M=2048)
    f = gaussian_profile(grid)
    sups = {t: lp_norm(evolve_linear(f, t), numpy.inf) for t in (4.0, 8.0, 16.0)}
    assert sups[16.0] / sups[8.0] == pytest.approx(2.0**-1.5, rel=0.1)
    ratios = [dispersive_ratio(f, t, numpy.inf) for t in (4.0, 8.0, 16.0)]
    assert max(ratios) / min(ratios) <= 1.1
    assert ratios[-1] == pytest.approx((4.0 * numpy.pi) ** -1.5, rel=0.1)


def test_cone_geometry():
    assert crossing_time(0, 0) == pytest.approx(1.0 / (4.0 * numpy.pi))
    assert crossing_time(2, 1) == pytest.approx(4.0 / (8.0 * numpy.pi))
    assert cone_radius(1, 2, 0.25, 0.0) == pytest.approx(0.5)
    assert cone_radius(1, 2, 0.25, crossing_time(1, 2)) == pytest.approx(1.0)


def test_cone_split(complex_bump3):
    f = cone_input(complex_bump3, 1, 2)
    t = 0.005
    split = cone_split(f, 1, 2, 0.25, t)
    u = evolve_linear(f, t)
    numpy.testing.assert_allclose((split.inside + split.outside).values, u.values, atol=1e-14)
    assert split.radius == pytest.approx(cone_radius(1, 2, 0.25, t))
    assert 0.0 <= split.inside_fraction
    back = cone_split(f, 1, 2, 0.25, t, direction="in")
    assert back.t == -t


def test_cone_split_rejects_bad_arguments(complex_bump3):
    f = cone_input(complex_bump3, 1, 2)
    with pytest.raises(WaveSplitValidationException):
        cone_split(f, 1, 2, 0.3, 0.01)
    with pytest.raises(WaveSplitValidationException):
        cone_split(f, 1, 2, 0.25, 0.01, direction="sideways")
    with pytest.raises(WaveSplitDomainEscapeException):
        cone_split(f, 3, 0, 0.25, 10.0)


def test_admissible_pairs():
    assert is_admissible(3, 2.0, 6.0)
    assert is_admissible(3, numpy.inf, 2.0)
    assert is_admissible(3, 4.0, 3.0)
    assert not is_admissible(3, 2.0, 7.0)
    assert not is_admissible(5, 4.0, 3.0)


def test_strichartz_norm(bump3):
    trajectory = [bump3, bump3]
    norm = l2_norm(bump3)
    assert strichartz_norm(trajectory, [0.0, 1.0], numpy.inf, 2.0) == pytest.approx(norm)
    assert strichartz_norm(trajectory, [0.0, 1.0], 2.0, 2.0) == pytest.approx(norm)
    with pytest.raises(WaveSplitValidationException):
        strichartz_norm([bump3], [0.0], 2.0, 2.0)


def test_sum_space_split_adds_up(bump3):
    split = sum_space_split(bump3, 2.0, 0.5, check_escape=False)
    assert len(split.part_one) == len(split.times) == 4
    for one, two, target in zip(split.part_one, split.part_two, split.target):
        assert rel_error((one + two).values, target.values) < 1e-9
    assert numpy.isfinite(split.norm_one) and split.norm_one > 0.0
    assert numpy.isfinite(split.norm_two) and split.norm_two >= 0.0
    # The L^2_t norm is taken in physical time t = tau / (4 pi N).
    numpy.testing.assert_allclose(split.times, numpy.array([0.0, 0.25, 0.5, 1.0]) / (8.0 * numpy.pi))
    sups = numpy.array([numpy.max(numpy.abs(u.values)) for u in split.part_two])
    expected = numpy.sqrt(scipy.integrate.trapezoid(sups**2, split.times))
    assert split.norm_two == pytest.approx(expected, rel=1e-12)


def test_sum_space_split_rejects_bad_arguments(grid3, bump3):
    with pytest.raises(WaveSplitValidationException):
        sum_space_split(bump3, 3.0, 0.5)
    with pytest.raises(WaveSplitValidationException):
        sum_space_split(bump3, 32.0, 0.5)
    with pytest.raises(WaveSplitValidationException):
        sum_space_split(gaussian_profile(grid3), 2.0, 0.5)
