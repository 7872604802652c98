"""Predictions, Monte Carlo experiment runs and small-ball checks."""

import json

import numpy as np
import pytest
from pydantic import ValidationError

from imagedim.errors import InvalidParameterError, ResolutionError, UnsupportedRegimeError
from imagedim.experiments import (
    ExperimentConfig,
    ExperimentRunner,
    default_tolerance,
    predicted_dimension,
    replicate_seed,
    run_experiment,
    verify_smallball,
)
from imagedim.experiments.runner import constant_sampler, identity_sampler
from imagedim.experiments.smallball import increment_covariance, kernel_sum
from imagedim.fields import FbmSpec, InfinityScaleSpec, RieszBesselSpec

CASCADE_DQ = 0.785875


def small_config(**overrides):
    payload = {
        "measure": {"kind": "uniform"},
        "field": {"kind": "fbm", "alpha": 0.5},
        "q": [2.0],
        "replicates": 2,
        "resolution": 1024,
        "depth": 8,
        "fit": [1, 6],
        "seed": 5,
    }
    payload.update(overrides)
    return ExperimentConfig.model_validate(payload)


def test_exact_prediction_caps_at_range_dimension():
    prediction = predicted_dimension(2.0, FbmSpec(alpha=0.5), 1, 1.0)
    assert prediction.case == "exact"
    assert prediction.value == 1.0
    assert not prediction.space_filling
    assert default_tolerance(prediction) == 0.10


def test_exact_prediction_below_the_cap():
    prediction = predicted_dimension(2.0, FbmSpec(alpha=0.8), 1, CASCADE_DQ)
    assert prediction.value == pytest.approx(0.98234, abs=1e-5)
    assert default_tolerance(prediction) == 0.10
    low = predicted_dimension(2.0, FbmSpec(alpha=0.8, d=2), 2, 0.5)
    assert low.value == pytest.approx(0.625)
    assert default_tolerance(low) == 0.10


def test_prediction_is_monotone_in_alpha_and_capped():
    values = [predicted_dimension(2.0, FbmSpec(alpha=a, d=2), 2, 0.9).value for a in (0.3, 0.5, 0.7, 0.9)]
    assert values == sorted(values, reverse=True)
    assert all(v <= 2.0 for v in values)
    assert values[0] == 2.0


def test_space_filling_cap_widens_the_tolerance():
    capped = predicted_dimension(2.0, FbmSpec(alpha=0.35, d=2), 2, 1.0)
    assert capped.value == 2.0
    assert capped.space_filling
    assert default_tolerance(capped) == 0.20
    cascade = predicted_dimension(2.0, FbmSpec(alpha=0.8, d=2), 2, CASCADE_DQ)
    assert cascade.value == pytest.approx(0.98234, abs=1e-5)
    assert not cascade.space_filling
    assert default_tolerance(cascade) == 0.10


def test_riesz_bessel_regimes():
    rough = predicted_dimension(2.0, RieszBesselSpec(gamma=0.5, beta=0.5), 1, 0.4)
    assert rough.case == "exact"
    assert rough.value == pytest.approx(0.8)
    smooth = predicted_dimension(2.0, RieszBesselSpec(gamma=0.5, beta=1.2), 1, 0.7)
    assert smooth.case == "preserved"
    assert smooth.value == pytest.approx(0.7)
    with pytest.raises(UnsupportedRegimeError):
        predicted_dimension(2.0, RieszBesselSpec(gamma=0.5, beta=1.0), 1, 0.7)


def test_infinity_scale_gives_an_interval():
    prediction = predicted_dimension(2.0, InfinityScaleSpec(H=(0.4, 0.8, 0.4, 0.8), d=2), 2, 1.0)
    assert prediction.case == "interval"
    assert prediction.lower == pytest.approx(1.25)
    assert prediction.upper == 2.0
    assert (prediction.alpha_lower, prediction.alpha_upper) == (0.4, 0.8)


def test_config_validation():
    with pytest.raises(ValidationError):
        small_config(q=[1.0])
    with pytest.raises(ValidationError):
        small_config(resolution=1000)
    with pytest.raises(ValidationError):
        small_config(resolution=256)
    with pytest.raises(ValidationError):
        small_config(fit=[5, 2])
    with pytest.raises(ValidationError):
        small_config(field={"kind": "fbm", "alpha": 0.5, "N": 2})


def test_fingerprint_ignores_output_directory():
    assert small_config().fingerprint() == small_config(out="elsewhere").fingerprint()
    assert small_config().fingerprint() != small_config(seed=6).fingerprint()


def test_replicate_seeds_are_stable_and_distinct():
    assert replicate_seed(5, 0) == replicate_seed(5, 0)
    assert len({replicate_seed(5, i) for i in range(50)}) == 50


def test_identity_map_passes_the_prediction():
    report = run_experiment(small_config(), sampler=identity_sampler)
    assert report.complete
    assert report.passed
    (summary,) = report.summaries
    assert summary.mean == pytest.approx(1.0, abs=1e-9)
    assert summary.sd == pytest.approx(0.0, abs=1e-9)


def test_constant_map_fails_the_prediction():
    report = run_experiment(small_config(), sampler=constant_sampler(0.0))
    assert report.complete
    assert not report.passed
    (summary,) = report.summaries
    assert summary.mean == pytest.approx(0.0, abs=1e-9)
    assert summary.holder_ok
    assert not summary.passed


def test_replicate_errors_are_recorded():
    def broken(spec, grid, seed):
        raise ResolutionError("grid too coarse")

    report = run_experiment(small_config(), sampler=broken)
    assert not report.complete
    assert not report.passed
    assert all(r.status == "error" and r.error == "grid too coarse" for r in report.replicates)
    assert report.summaries[0].estimates == []


def test_runs_are_deterministic_across_thread_counts():
    config = small_config()
    serial = run_experiment(config, threads=1)
    parallel = run_experiment(config, threads=2)
    assert serial.seeds == parallel.seeds == [replicate_seed(5, i) for i in range(2)]
    assert serial.summaries[0].estimates == parallel.summaries[0].estimates


def test_brownian_image_of_lebesgue_measure_is_one_dimensional():
    config = small_config(resolution=16384, depth=12, fit=[3, 8], replicates=6)
    report = run_experiment(config, threads=2)
    summary = report.summaries[0]
    assert report.complete
    assert summary.tolerance == 0.10
    assert summary.mean == pytest.approx(1.0, abs=0.10)


def test_planar_fbm_image_of_cascade_stretches_by_one_over_alpha():
    config = small_config(
        measure={"kind": "multinomial", "m": 2, "weights": [0.7, 0.3]},
        field={"kind": "fbm", "alpha": 0.8, "d": 2},
        resolution=16384,
        depth=12,
        fit=[3, 7],
        replicates=6,
    )
    report = run_experiment(config, threads=2)
    summary = report.summaries[0]
    assert report.complete
    assert summary.prediction.value == pytest.approx(CASCADE_DQ / 0.8, abs=1e-5)
    assert summary.tolerance == 0.10
    # reduced scale, so the band is wider than the full run's
    assert summary.mean == pytest.approx(summary.prediction.value, abs=0.15)
    assert summary.mean > CASCADE_DQ + 0.1


def test_write_produces_report_files(tmp_path):
    runner = ExperimentRunner(small_config(q=[2.0, 3.0]), sampler=identity_sampler)
    runner.write(runner.run(), tmp_path)
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["config_hash"] == small_config(q=[2.0, 3.0]).fingerprint()
    assert (tmp_path / "curves" / "q2_rep0.csv").is_file()
    assert (tmp_path / "curves" / "q3_rep1.csv").is_file()
    assert (tmp_path / "summary.csv").read_text().splitlines()[0] == "q,predicted,mean,sd"
    assert "total" in json.loads((tmp_path / "timing.json").read_text())


def test_increment_covariance_of_one_point():
    cov = increment_covariance(FbmSpec(alpha=0.5), np.array([[0.1]]), np.array([0.35]))
    assert cov[0, 0] == pytest.approx(0.25)


def test_kernel_sum_of_one_point():
    # m = 4: both translates split the two points at the root
    assert kernel_sum(np.array([[0.1]]), np.array([0.35]), 0.5, 1.0) == pytest.approx(2.0)


def test_small_ball_for_one_point_matches_closed_form():
    radii = [2.0 ** -k for k in range(2, 7)]
    report = verify_smallball(FbmSpec(alpha=0.5), [[0.1]], [0.35], radii, [0.5, 1.0], replicates=20_000, seed=3)
    assert report.expected_exponent == 1.0
    assert report.exponent == pytest.approx(1.0, abs=0.1)
    assert report.closed_form_ok
    assert all(point.resolved for point in report.points)
    assert report.checks[0].holds
    assert report.holds


def test_small_ball_rejects_bad_inputs():
    spec = FbmSpec(alpha=0.5)
    radii = [0.1, 0.05, 0.025]
    with pytest.raises(InvalidParameterError):
        verify_smallball(spec, [[0.6]], [0.35], radii, [0.5], replicates=1000)
    with pytest.raises(InvalidParameterError):
        verify_smallball(spec, [[0.1]], [0.35], radii, [1.5], replicates=1000)
    with pytest.raises(InvalidParameterError):
        verify_smallball(spec, [[0.1]], [0.35], [1e-6, 1e-7, 1e-8], [0.5], replicates=1000)
