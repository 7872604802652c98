"""Image measures, slope estimates and the Hölder check."""

import numpy as np
import pytest

from imagedim.errors import InvalidParameterError, ResolutionError
from imagedim.estimation import (
    estimate_dq,
    holder_upper_check,
    image_correlation_curve,
    image_measure,
    image_moment_curve,
    merge_coincident,
    origin_invariance,
)
from imagedim.fields import FbmSpec, FieldSample, sample_field, unit_grid
from imagedim.measures import AtomsMeasure, UniformMeasure, discretize


def identity_field(resolution):
    grid = unit_grid(resolution)
    return FieldSample(grid=grid, values=grid.points())


def constant_field(resolution, d=1):
    grid = unit_grid(resolution)
    return FieldSample(grid=grid, values=np.zeros((grid.size, d)))


@pytest.fixture(scope="module")
def uniform_atoms():
    return discretize(UniformMeasure(), 8)


def test_identity_map_preserves_uniform_dimension(uniform_atoms):
    im = image_measure(identity_field(1024), uniform_atoms)
    assert len(im.masses) == 256
    estimate = estimate_dq(image_moment_curve(im, 2.0, range(1, 7)), (1, 6))
    assert estimate.slope == pytest.approx(1.0, abs=1e-9)
    assert estimate.window_min == pytest.approx(estimate.window_max)
    assert estimate.within_ambient(1, 1e-9)


def test_constant_map_collapses_to_one_atom(uniform_atoms):
    im = image_measure(constant_field(1024, d=2), uniform_atoms)
    assert im.points.shape == (1, 2)
    assert im.masses[0] == pytest.approx(1.0)
    estimate = estimate_dq(image_moment_curve(im, 3.0, range(1, 7)), (1, 6))
    assert estimate.slope == pytest.approx(0.0, abs=1e-9)


def test_merge_coincident_adds_masses():
    points, masses = merge_coincident(np.array([[0.5], [0.5], [0.25]]), np.array([0.2, 0.3, 0.5]))
    assert points.tolist() == [[0.25], [0.5]]
    assert masses.tolist() == pytest.approx([0.5, 0.5])


def test_atoms_off_the_grid_are_rejected():
    atoms = AtomsMeasure(points=((0.999,),), masses=(1.0,))
    with pytest.raises(ResolutionError):
        image_measure(identity_field(4), atoms)


def test_fit_range_needs_four_levels(uniform_atoms):
    curve = image_moment_curve(image_measure(identity_field(1024), uniform_atoms), 2.0, range(1, 7))
    with pytest.raises(InvalidParameterError):
        estimate_dq(curve, (1, 3))


def test_lower_and_upper_proxies_bracket_the_fit(uniform_atoms):
    field = sample_field(FbmSpec(alpha=0.5), unit_grid(1024), seed=7, method="circulant-1d")
    curve = image_moment_curve(image_measure(field, uniform_atoms), 2.0, range(1, 8))
    lower = estimate_dq(curve, (1, 7), kind="lower")
    upper = estimate_dq(curve, (1, 7), kind="upper")
    assert lower.value <= upper.value
    assert lower.value == lower.window_min
    assert upper.value == upper.window_max


def test_image_correlation_curve_of_identity():
    im = image_measure(identity_field(8192), discretize(UniformMeasure(), 12))
    estimate = estimate_dq(image_correlation_curve(im, 2.0, range(2, 6)), (2, 5))
    assert estimate.curve_kind == "correlation"
    assert estimate.slope == pytest.approx(1.0, abs=0.1)


def test_mesh_origin_barely_moves_the_slope(uniform_atoms):
    im = image_measure(identity_field(1024), uniform_atoms)
    report = origin_invariance(im, 2.0, range(1, 7), (1, 6), origins=4, seed=1)
    assert len(report.slopes) == 5
    assert report.slopes[0] == pytest.approx(1.0, abs=1e-9)
    assert report.max_deviation < 0.15


def test_holder_check():
    assert holder_upper_check(1.0, 0.5, alpha=0.5, d=2).holds
    report = holder_upper_check(1.4, 0.5, alpha=0.5, d=2)
    assert report.bound == pytest.approx(1.0)
    assert not report.holds
    assert holder_upper_check(1.9, 0.9, alpha=0.3, d=2).bound == 2.0
    with pytest.raises(InvalidParameterError):
        holder_upper_check(1.0, 0.5, alpha=0.0, d=1)


def test_holder_check_needs_matching_orders(uniform_atoms):
    im = image_measure(identity_field(1024), uniform_atoms)
    a = estimate_dq(image_moment_curve(im, 2.0, range(1, 7)), (1, 6))
    b = estimate_dq(image_moment_curve(im, 3.0, range(1, 7)), (1, 6))
    with pytest.raises(InvalidParameterError):
        holder_upper_check(a, b, alpha=0.5, d=1)
