"""Experiment configuration, predictions, runners and verification suites."""

from imagedim.experiments.config import ExperimentConfig, load_config
from imagedim.experiments.predict import Prediction, default_tolerance, predicted_dimension
from imagedim.experiments.runner import ExperimentReport, ExperimentRunner, replicate_seed, run_experiment
from imagedim.experiments.smallball import SmallBallReport, verify_smallball

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "ExperimentRunner",
    "Prediction",
    "SmallBallReport",
    "default_tolerance",
    "load_config",
    "predicted_dimension",
    "replicate_seed",
    "run_experiment",
    "verify_smallball",
]
