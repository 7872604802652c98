"""Command-line entry point: `imagedim <command> --config <file.json>`."""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

from imagedim.errors import ConfigError, ImageDimError
from imagedim.estimation.estimator import estimate_dq
from imagedim.estimation.image import image_correlation_curve, image_measure, image_moment_curve
from imagedim.experiments.config import (
    EstimateConfig,
    ExperimentConfig,
    MomentsConfig,
    SimulateConfig,
    SmallBallConfig,
    TreeSuiteConfig,
    UltrametricSuiteConfig,
    load_config,
)
from imagedim.experiments.runner import ExperimentRunner
from imagedim.experiments.smallball import verify_smallball
from imagedim.experiments.suites import SuiteReport, field_suite, tree_suite, ultrametric_suite
from imagedim.fields.io import export_field_csv, export_field_metadata
from imagedim.fields.samplers import sample_field
from imagedim.fields.specs import unit_grid
from imagedim.measures.io import read_curve_csv, write_curve_csv
from imagedim.measures.moments import correlation_curve, discretize, moment_curve
from imagedim.settings import DEFAULT_LOG_LEVEL, DEFAULT_OUTPUT_DIR, DEFAULT_THREADS, DEFAULT_TOLERANCE

logger = logging.getLogger(__name__)


def _out_dir(args: argparse.Namespace, configured: Optional[str]) -> Path:
    out = Path(args.out or configured or Path(DEFAULT_OUTPUT_DIR) / args.command)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _with_seed(config, args: argparse.Namespace):
    return config.model_copy(update={"seed": args.seed}) if args.seed is not None else config


def _print_suite(report: SuiteReport) -> None:
    print(f"\n📊 {report.name.upper()} SUITE")
    for check in report.checks:
        mark = "✅" if check.status == "success" else "❌"
        line = f"  {mark} {check.name}: {check.checked} checked, {check.failures} failures"
        if check.error:
            line += f" ({check.error})"
        print(line)


def _write_json(path: Path, payload: str) -> None:
    path.write_text(payload)
    print(f"📁 {path}")


def cmd_simulate(args: argparse.Namespace) -> bool:
    config = _with_seed(load_config(args.config, SimulateConfig), args)
    grid = unit_grid(config.resolution, config.field.N)
    print(f"🔄 Sampling {config.field.kind} on {grid.size} points ({config.method})")
    sample = sample_field(config.field, grid, config.seed, config.method)
    out = _out_dir(args, config.out)
    print(f"📁 {export_field_csv(sample, out / 'field.csv')}")
    print(f"📁 {export_field_metadata(sample, out / 'field.json')}")
    print("✅ Field written")
    return True


def cmd_moments(args: argparse.Namespace) -> bool:
    config = _with_seed(load_config(args.config, MomentsConfig), args)
    if config.field is not None:
        grid = unit_grid(config.resolution, config.field.N)
        sample = sample_field(config.field, grid, config.seed, config.method)
        im = image_measure(sample, discretize(config.measure, config.depth), measure_id=config.measure.kind)
        if config.estimator == "correlation":
            curve = image_correlation_curve(im, config.q, config.levels)
        else:
            curve = image_moment_curve(im, config.q, config.levels)
    elif config.estimator == "correlation":
        curve = correlation_curve(config.measure, config.q, config.levels, depth=config.depth)
    else:
        curve = moment_curve(config.measure, config.q, config.levels)
    path = write_curve_csv(curve, _out_dir(args, config.out) / "curve.csv")
    print(f"📁 {path}")
    print(f"✅ {curve.kind} curve with {len(curve.entries)} scales")
    return True


def cmd_estimate(args: argparse.Namespace) -> bool:
    config = load_config(args.config, EstimateConfig)
    if not Path(config.curve).is_file():
        raise ConfigError(f"curve file not found: {config.curve}", path=config.curve)
    curve = read_curve_csv(config.curve, config.q, config.curve_kind)
    estimate = estimate_dq(curve, config.fit, kind=config.kind)
    _write_json(_out_dir(args, config.out) / "estimate.json", estimate.model_dump_json(indent=2))
    print(f"✅ D_{config.q:g} ≈ {estimate.value:.4f} (slope {estimate.slope:.4f} ± {estimate.stderr:.4f})")
    return True


def _run_suite(args: argparse.Namespace, report: SuiteReport, configured: Optional[str]) -> bool:
    _print_suite(report)
    _write_json(_out_dir(args, configured) / f"{report.name}.json", report.model_dump_json(indent=2))
    return report.passed


def cmd_verify_ultrametric(args: argparse.Namespace) -> bool:
    config = _with_seed(load_config(args.config, UltrametricSuiteConfig), args)
    return _run_suite(args, ultrametric_suite(config), config.out)


def cmd_verify_tree(args: argparse.Namespace) -> bool:
    config = _with_seed(load_config(args.config, TreeSuiteConfig), args)
    return _run_suite(args, tree_suite(config), config.out)


def cmd_verify_smallball(args: argparse.Namespace) -> bool:
    config = _with_seed(load_config(args.config, SmallBallConfig), args)
    tolerance = args.tolerance if args.tolerance is not None else config.tolerance
    report = verify_smallball(
        config.field, config.points, config.y, config.radii, config.s, config.replicates, config.seed, tolerance
    )
    print(f"\n📊 SMALL-BALL: exponent {report.exponent:.3f} ± {report.exponent_stderr:.3f} (expected {report.expected_exponent:g})")
    for check in report.checks:
        mark = "✅" if check.holds else "❌"
        print(f"  {mark} s={check.s:g}: constant slope {check.constant_slope:.3f}")
    if report.closed_form_ok is not None:
        print(f"  {'✅' if report.closed_form_ok else '❌'} closed-form agreement")
    out = _out_dir(args, config.out)
    _write_json(out / "smallball.json", report.model_dump_json(indent=2))
    passed = report.holds
    if config.fidelity:
        passed = _run_suite(args, field_suite(config), config.out) and passed
    return passed


def cmd_experiment(args: argparse.Namespace) -> bool:
    config = _with_seed(load_config(args.config, ExperimentConfig), args)
    tolerance = args.tolerance if args.tolerance is not None else DEFAULT_TOLERANCE
    runner = ExperimentRunner(config, threads=args.threads, tolerance=tolerance)
    print(f"🚀 Experiment: {config.field.kind} on {config.measure.kind}, {config.replicates} replicates")
    report = runner.run()
    out = runner.write(report, _out_dir(args, config.out))
    print(f"\n📊 RESULTS ({out})")
    for s in report.summaries:
        mark = "✅" if s.passed and s.holder_ok else "❌"
        mean = "n/a" if s.mean is None else f"{s.mean:.4f} ± {s.sd:.4f}"
        print(f"  {mark} q={s.q:g}: predicted {s.prediction.value:.4f} ({s.prediction.case}), mean {mean}, tol {s.tolerance:.2f}")
    failed = [r.index for r in report.replicates if r.status == "error"]
    if failed:
        print(f"  ❌ replicates aborted: {failed}")
    return report.passed


COMMANDS: Dict[str, Callable[[argparse.Namespace], bool]] = {
    "simulate": cmd_simulate,
    "moments": cmd_moments,
    "estimate": cmd_estimate,
    "verify-ultrametric": cmd_verify_ultrametric,
    "verify-tree": cmd_verify_tree,
    "verify-smallball": cmd_verify_smallball,
    "experiment": cmd_experiment,
}

HELP = {
    "simulate": "Sample a Gaussian field and write it as CSV",
    "moments": "Moment curve of a measure or of its image",
    "estimate": "Fit D_q from a moment curve",
    "verify-ultrametric": "Property suite for translated ultrametrics",
    "verify-tree": "Exhaustive tree inequality suite",
    "verify-smallball": "Small-ball exponents and Gaussian-field fidelity checks",
    "experiment": "Monte Carlo image-dimension experiment",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="imagedim", description="Image-measure dimension laboratory")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        command = sub.add_parser(name, help=HELP[name])
        command.add_argument("--config", required=True, help="JSON configuration file")
        command.add_argument("--seed", type=int, default=None, help="Override the configured seed")
        command.add_argument("--out", default=None, help="Output directory")
        command.add_argument("--threads", type=int, default=DEFAULT_THREADS, help="Worker threads")
        command.add_argument("--tolerance", type=float, default=None, help="Override the pass tolerance")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, DEFAULT_LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    try:
        passed = COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"❌ {e}", file=sys.stderr)
        return 2
    except ImageDimError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"❌ {e}", file=sys.stderr)
        return 1
    print("\n✅ All checks passed" if passed else "\n❌ Some checks failed")
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
