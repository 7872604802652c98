"""Measure models, exact cylinder masses and moment sums."""

import math

import numpy as np
import pytest

from imagedim.errors import BaseMismatchError, ConfigError, InvalidParameterError, UnsupportedModelError
from imagedim.measures import (
    AtomsMeasure,
    CubeAddress,
    MultinomialMeasure,
    UniformMeasure,
    analytic_dq,
    correlation_curve,
    correlation_integral,
    cylinder_mass,
    discretize,
    dump_measure_config,
    export_atoms_csv,
    load_measure_config,
    moment_curve,
    moment_sum,
    read_atoms_csv,
    read_curve_csv,
    rescale_to_half_cube,
    write_curve_csv,
)

CASCADE = MultinomialMeasure(m=2, weights=(0.7, 0.3))


def test_cylinder_mass_multiplies_digit_weights():
    cube = CubeAddress(m=2, level=3, digits=((0,), (1,), (0,)))
    assert cylinder_mass(CASCADE, cube) == pytest.approx(0.7 * 0.3 * 0.7)


def test_cylinder_mass_of_uniform_and_root():
    assert cylinder_mass(UniformMeasure(N=2), CubeAddress(m=2, level=2, digits=((0, 1), (1, 1)))) == 1 / 16
    assert cylinder_mass(CASCADE, CubeAddress(m=2, level=0, digits=())) == 1.0


def test_cylinder_mass_rejects_other_base():
    with pytest.raises(BaseMismatchError):
        cylinder_mass(CASCADE, CubeAddress(m=4, level=1, digits=((3,),)))


def test_cube_address_rejects_odd_base():
    with pytest.raises(ValueError):
        CubeAddress(m=3, level=1, digits=((0,),))


def test_containing_cube_is_exact_at_dyadic_boundaries():
    cube = CubeAddress.containing((0.5,), 2, 1)
    assert cube.index() == (1,)
    assert CubeAddress.containing((0.49999999999999994,), 2, 1).index() == (0,)


def test_atom_masses_sum_inside_cube():
    atoms = AtomsMeasure(points=((0.1,), (0.2,), (0.7,)), masses=(0.25, 0.25, 0.5))
    assert cylinder_mass(atoms, CubeAddress(m=2, level=1, digits=((0,),))) == pytest.approx(0.5)


def test_moment_sum_of_cascade_is_power_of_weight_sum():
    expected = (0.7 ** 2 + 0.3 ** 2) ** 5
    assert moment_sum(CASCADE, 2.0, 5) == pytest.approx(expected)


def test_moment_sum_matches_discretized_cascade():
    atoms = discretize(CASCADE, 8)
    for k in range(0, 8):
        assert moment_sum(atoms, 2.5, k) == pytest.approx(moment_sum(CASCADE, 2.5, k), rel=1e-10)


def test_moment_sum_rejects_q_at_most_one():
    with pytest.raises(InvalidParameterError):
        moment_sum(CASCADE, 1.0, 3)


def test_moment_sum_of_single_atom_is_one():
    atom = AtomsMeasure(points=((0.3,),), masses=(1.0,))
    assert moment_sum(atom, 3.0, 12) == 1.0


def test_moment_curve_slope_recovers_analytic_dimension():
    curve = moment_curve(CASCADE, 2.0, range(1, 9))
    levels, scales, values = curve.arrays()
    slope = np.polyfit((2.0 - 1.0) * np.log(scales), np.log(values), 1)[0]
    assert slope == pytest.approx(analytic_dq(CASCADE, 2.0), abs=1e-10)


def test_analytic_dq_known_value():
    assert analytic_dq(CASCADE, 2.0) == pytest.approx(0.785875, abs=1e-6)
    with pytest.raises(UnsupportedModelError):
        analytic_dq(UniformMeasure(), 2.0)


def test_multinomial_validates_weights():
    with pytest.raises(ValueError):
        MultinomialMeasure(m=2, weights=(0.7, 0.4))
    with pytest.raises(ValueError):
        MultinomialMeasure(m=2, N=2, weights=(0.5, 0.5))


def test_discretize_places_atoms_at_cube_centers():
    atoms = discretize(UniformMeasure(), 2)
    points, masses = atoms.arrays()
    assert np.allclose(points[:, 0], [0.125, 0.375, 0.625, 0.875])
    assert np.allclose(masses, 0.25)


def test_discretize_skips_empty_cubes():
    atoms = discretize(MultinomialMeasure(m=2, weights=(1.0, 0.0)), 4)
    assert len(atoms.masses) == 1
    assert atoms.points[0][0] == pytest.approx(1 / 32)


@pytest.mark.parametrize("q", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("r", [1e-6, 0.3, 2.0])
def test_correlation_integral_of_a_point_mass(q, r):
    assert correlation_integral(AtomsMeasure(points=((0.4,),), masses=(1.0,)), q, r) == pytest.approx(1.0)
    plane = AtomsMeasure(N=2, points=((0.4, 0.6),), masses=(1.0,))
    assert correlation_integral(plane, q, r) == pytest.approx(1.0)


def test_correlation_integral_separates_distant_atoms():
    pair = AtomsMeasure(points=((0.0,), (0.75,)), masses=(0.5, 0.5))
    assert correlation_integral(pair, 2.0, 0.5) == pytest.approx(0.5)
    assert correlation_integral(pair, 2.0, 0.75) == pytest.approx(1.0)


def test_correlation_integral_of_uniform_measure():
    assert correlation_integral(UniformMeasure(), 2.0, 0.25, depth=10) == pytest.approx(0.4375, abs=2e-3)
    with pytest.raises(UnsupportedModelError):
        correlation_integral(UniformMeasure(), 2.0, 0.25)
    with pytest.raises(InvalidParameterError):
        correlation_integral(CASCADE, 2.0, 0.0, depth=4)


def test_correlation_integral_is_nondecreasing_in_r():
    values = [correlation_integral(CASCADE, 2.0, r, depth=8) for r in (0.01, 0.03, 0.1, 0.2, 0.5, 1.0)]
    assert all(b >= a for a, b in zip(values, values[1:]))
    assert values[-1] == pytest.approx(1.0)


def test_correlation_curve_needs_depth_for_continuous_models():
    with pytest.raises(UnsupportedModelError):
        correlation_curve(UniformMeasure(), 2.0, [1, 2])
    curve = correlation_curve(UniformMeasure(), 2.0, [4, 5, 6, 7, 8], depth=10)
    _, scales, values = curve.arrays()
    slope = np.polyfit(np.log(scales), np.log(values), 1)[0]
    assert slope == pytest.approx(1.0, abs=0.05)


def test_rescale_to_half_cube():
    half = rescale_to_half_cube(CASCADE, depth=4)
    points, _ = half.arrays()
    assert points.max() < 0.5
    atoms = AtomsMeasure(points=((0.5,), (0.75,)), masses=(0.5, 0.5))
    assert rescale_to_half_cube(atoms).points == ((0.25,), (0.375,))
    with pytest.raises(InvalidParameterError, match="depth"):
        rescale_to_half_cube(CASCADE)


def test_measure_config_round_trip(tmp_path):
    path = dump_measure_config(CASCADE, tmp_path / "measure.json")
    assert load_measure_config(path) == CASCADE


def test_measure_config_reports_offending_key(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"kind": "multinomial", "m": 2, "weights": "heavy"}')
    with pytest.raises(ConfigError) as info:
        load_measure_config(path)
    assert "weights" in str(info.value)


def test_missing_measure_config_names_path(tmp_path):
    with pytest.raises(ConfigError) as info:
        load_measure_config(tmp_path / "absent.json")
    assert "absent.json" in str(info.value)


def test_atoms_csv_round_trip(tmp_path):
    atoms = AtomsMeasure(N=2, points=((0.1, 0.2), (0.3, 0.4)), masses=(0.5, 0.5))
    assert read_atoms_csv(export_atoms_csv(atoms, tmp_path / "atoms.csv")) == atoms


def test_curve_csv_has_expected_columns(tmp_path):
    curve = moment_curve(CASCADE, 2.0, [1, 2, 3])
    path = write_curve_csv(curve, tmp_path / "curve.csv")
    assert path.read_text().splitlines()[0] == "k,r,value"
    back = read_curve_csv(path, 2.0)
    assert [e.level for e in back.entries] == [1, 2, 3]
    assert math.isclose(back.entries[2].value, curve.entries[2].value)
