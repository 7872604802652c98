"""Gaussian field laws, samplers and diagnostics."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from imagedim.errors import (
    InvalidParameterError,
    NotPositiveDefiniteError,
    ResolutionError,
    UnsupportedModelError,
)
from imagedim.fields import (
    DyadicPiecewisePsi,
    FbmSpec,
    FieldSample,
    InfinityScaleSpec,
    PowerLawPsi,
    RieszBesselSpec,
    TabulatedPsi,
    check_lacunarity,
    conditional_variance,
    covariance_matrix,
    doubling_constant,
    export_field_csv,
    export_field_metadata,
    fbm_covariance,
    modulus_of_continuity,
    psi_for_spec,
    psi_indices,
    regular_grid,
    sample_field,
    sln_ratio_scan,
    spectral_truncation_error,
    structure_function,
    unit_grid,
    variogram,
)
from imagedim.fields.samplers import cholesky_with_jitter

BM = FbmSpec(alpha=0.5)


def test_fbm_covariance_closed_form():
    assert fbm_covariance(1.0, 1.0, 0.3) == pytest.approx(1.0)
    assert fbm_covariance(1.0, 0.0, 0.7) == pytest.approx(0.0)
    assert fbm_covariance(0.5, 0.25, 0.5) == pytest.approx(0.25)


def test_structure_function_of_fbm_is_power_law():
    assert structure_function(FbmSpec(alpha=0.8), 0.5) == pytest.approx(0.5 ** 1.6)
    assert structure_function(BM, 0.0) == 0.0


def test_riesz_bessel_structure_function_scales_with_effective_index():
    spec = RieszBesselSpec(gamma=0.5, beta=0.5)
    small, double = structure_function(spec, 2.0 ** -7), structure_function(spec, 2.0 ** -6)
    assert double / small == pytest.approx(2.0, abs=0.1)
    assert small / (2 * math.pi * 2.0 ** -7) == pytest.approx(1.0, abs=0.05)


def test_riesz_bessel_rejects_bad_exponents():
    with pytest.raises(ValueError):
        RieszBesselSpec(gamma=2.0, beta=0.5)
    with pytest.raises(ValueError):
        RieszBesselSpec(gamma=0.2, beta=0.1)


def test_infinity_scale_validates_indices():
    with pytest.raises(ValueError):
        InfinityScaleSpec(H=(0.5, 1.2))
    spec = InfinityScaleSpec(H=(0.4, 0.6, 0.4), j_max=1)
    assert spec.last_annulus == 1
    assert spec.density(np.array([3.0]))[0] == 0.0


def test_covariance_matrix_matches_pointwise_formula():
    points = np.array([[0.1], [0.4], [0.9]])
    matrix = covariance_matrix(FbmSpec(alpha=0.3), points)
    assert np.allclose(matrix, matrix.T)
    assert matrix[0, 2] == pytest.approx(fbm_covariance(0.1, 0.9, 0.3))


def test_samplers_are_deterministic_in_the_seed():
    grid = unit_grid(64)
    for method in ("exact-cholesky", "circulant-1d"):
        a = sample_field(BM, grid, seed=3, method=method)
        b = sample_field(BM, grid, seed=3, method=method)
        c = sample_field(BM, grid, seed=4, method=method)
        assert np.array_equal(a.values, b.values)
        assert not np.array_equal(a.values, c.values)
        assert a.values[0, 0] == 0.0


def test_coordinates_are_independent_streams():
    sample = sample_field(FbmSpec(alpha=0.5, d=2), unit_grid(32), seed=1, method="circulant-1d")
    assert sample.values.shape == (32, 2)
    assert not np.array_equal(sample.values[:, 0], sample.values[:, 1])


@pytest.mark.parametrize("i, j", [(8, 8), (4, 12)])
def test_coordinate_cross_covariance_vanishes(i, j):
    spec = FbmSpec(alpha=0.5, d=2)
    grid = unit_grid(16)
    pairs = np.array([sample_field(spec, grid, seed=s, method="circulant-1d").values[[i, j], [0, 1]] for s in range(400)])
    products = pairs[:, 0] * pairs[:, 1]
    se = np.std(products, ddof=1) / math.sqrt(len(products))
    assert abs(products.mean()) <= 3 * se


def test_circulant_needs_grid_from_origin():
    grid = regular_grid(16, 1 / 16, origin=(0.5,))
    with pytest.raises(InvalidParameterError):
        sample_field(BM, grid, seed=0, method="circulant-1d")


def test_fbm_is_not_spectrally_synthesized():
    with pytest.raises(UnsupportedModelError):
        sample_field(BM, unit_grid(8), seed=0, method="spectral")
    with pytest.raises(InvalidParameterError):
        sample_field(BM, unit_grid(8), seed=0, method="bogus")


def test_spectral_sample_vanishes_at_origin():
    spec = RieszBesselSpec(gamma=0.5, beta=0.5)
    sample = sample_field(spec, unit_grid(32), seed=5, method="spectral")
    assert sample.values[0, 0] == 0.0
    assert np.all(np.isfinite(sample.values))


def test_cholesky_jitter_is_applied_once():
    factor, jitter = cholesky_with_jitter(np.array([[1.0, 1.0], [1.0, 1.0]]))
    assert jitter > 0
    assert factor.shape == (2, 2)
    with pytest.raises(NotPositiveDefiniteError):
        cholesky_with_jitter(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_exact_samplers_reproduce_fbm_covariance():
    grid = regular_grid(8, 1 / 8)
    exact = covariance_matrix(BM, grid.points())
    R = 2000
    band = 5.0 * np.sqrt((np.outer(np.diag(exact), np.diag(exact)) + exact ** 2) / R)
    for method in ("exact-cholesky", "circulant-1d"):
        draws = np.stack([sample_field(BM, grid, seed, method).values[:, 0] for seed in range(R)])
        empirical = draws.T @ draws / R
        assert np.all(np.abs(empirical - exact) <= band + 1e-12)


def test_variogram_matches_power_law():
    grid = unit_grid(256)
    samples = [sample_field(FbmSpec(alpha=0.3), grid, seed, "circulant-1d") for seed in range(200)]
    for point in variogram(samples, [2.0 ** -k for k in range(2, 6)]):
        assert abs(point.value - point.h ** 0.6) <= 4 * point.stderr


def test_variogram_rejects_off_grid_lag():
    samples = [sample_field(BM, unit_grid(16), seed, "circulant-1d") for seed in range(2)]
    with pytest.raises(InvalidParameterError):
        variogram(samples, [0.03])


def test_conditional_variance_of_brownian_motion():
    assert conditional_variance(BM, [0.5], [[0.25]]).value == pytest.approx(0.25)
    assert conditional_variance(BM, [0.5], []).value == pytest.approx(0.5)
    assert conditional_variance(BM, [0.5], [[0.5], [0.25]]).value == 0.0


def test_conditional_variance_shrinks_on_nested_conditioners():
    chain = [[], [[0.9]], [[0.9], [0.2]], [[0.9], [0.2], [0.45]]]
    values = [conditional_variance(BM, [0.5], ys).value for ys in chain]
    assert values == pytest.approx([0.5, 0.5 * 0.4 / 0.9, 0.3 * 0.4 / 0.7, 0.05 * 0.4 / 0.45])
    rough = FbmSpec(alpha=0.3)
    ys = np.random.default_rng(11).uniform(0.05, 1.0, size=(6, 1))
    nested = [conditional_variance(rough, [0.5], ys[:k]).value for k in range(len(ys) + 1)]
    assert all(b <= a + 1e-12 for a, b in zip(nested, nested[1:]))
    assert nested[-1] < nested[0]


def test_local_nondeterminism_ratio_stays_bounded_below():
    scan = sln_ratio_scan(BM)
    assert len(scan) == 6
    assert min(s.ratio for s in scan) >= 0.2


def test_psi_indices():
    assert psi_indices(PowerLawPsi(alpha=0.4)) == (0.4, 0.4)
    assert psi_indices(DyadicPiecewisePsi(H=(0.3, 0.6, 0.3, 0.6))) == (0.3, 0.6)
    with pytest.raises(UnsupportedModelError):
        psi_indices(TabulatedPsi(log_r=(-2.0, 0.0), log_psi=(-3.0, 0.0)))


def test_stationary_tail_must_exist():
    with pytest.raises(ValidationError, match="tail_start"):
        InfinityScaleSpec(H=(0.4, 0.6, 0.4, 0.6), j_max=1, tail_start=2)
    with pytest.raises(ValidationError, match="tail_start"):
        DyadicPiecewisePsi(H=(0.5,), tail_start=3)
    spec = InfinityScaleSpec(H=(0.4, 0.6, 0.4, 0.6), j_max=2, tail_start=2)
    assert psi_indices(psi_for_spec(spec)) == (0.4, 0.4)
    with pytest.raises(InvalidParameterError, match="no tail"):
        psi_indices(DyadicPiecewisePsi.model_construct(H=(0.5,), tail_start=3))


def test_psi_for_spec():
    assert psi_for_spec(RieszBesselSpec(gamma=0.5, beta=0.6)).alpha == pytest.approx(0.6)
    with pytest.raises(UnsupportedModelError):
        psi_for_spec(RieszBesselSpec(gamma=0.5, beta=1.5))
    assert isinstance(psi_for_spec(InfinityScaleSpec(H=(0.3, 0.5))), DyadicPiecewisePsi)


def test_dyadic_psi_at_knots():
    psi = DyadicPiecewisePsi(H=(0.3, 0.6))
    assert float(psi(0.5)) == pytest.approx(2.0 ** -0.6)
    assert float(psi(0.25)) == pytest.approx(2.0 ** -1.8)


def test_doubling_constant_of_power_law():
    assert doubling_constant(PowerLawPsi(alpha=0.25), [0.01, 0.1]) == pytest.approx(2.0 ** 0.5)


def test_lacunarity_outcomes():
    assert check_lacunarity([0.5] * 10, 0.1).status == "vacuous"
    failing = check_lacunarity([0.3, 0.6, 0.3, 0.6], 0.05)
    assert failing.status == "fails-at-k"
    assert failing.witness == 0
    holding = check_lacunarity([0.3] + [0.6] * 10 + [0.3] * 5, 0.05)
    assert holding.status == "holds-for-tail"
    assert holding.times == [1, 11]


def test_modulus_of_continuity_of_linear_map():
    grid = unit_grid(64)
    sample = FieldSample(grid=grid, values=grid.points())
    (point,) = modulus_of_continuity(sample, [4 / 64])
    assert point.omega == pytest.approx(4 / 64)
    with pytest.raises(ResolutionError):
        modulus_of_continuity(sample, [1 / 128])


def test_spectral_truncation_error_is_small():
    for point in spectral_truncation_error(RieszBesselSpec(gamma=0.5, beta=0.5), [2.0 ** -4, 2.0 ** -6]):
        assert point.relative_error < 0.05


def test_field_export(tmp_path):
    sample = sample_field(BM, unit_grid(8), seed=2)
    csv_path = export_field_csv(sample, tmp_path / "field.csv")
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "t1,X1"
    assert len(lines) == 9
    meta = export_field_metadata(sample, tmp_path / "field.json").read_text()
    assert '"seed": 2' in meta
