"""Monte Carlo image-dimension experiments."""

import csv
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Dict, List, Literal, Optional

import numpy as np
import pydantic
import scipy
from pydantic import BaseModel, Field

import imagedim
from imagedim.errors import ImageDimError
from imagedim.estimation.estimator import DimensionEstimate, estimate_dq
from imagedim.estimation.holder import HolderReport, holder_upper_check
from imagedim.estimation.image import image_correlation_curve, image_measure, image_moment_curve
from imagedim.experiments.config import ExperimentConfig
from imagedim.experiments.predict import Prediction, default_tolerance, predicted_dimension
from imagedim.fields.samplers import sample_field
from imagedim.fields.specs import FieldSample, FieldSpec, Grid, unit_grid
from imagedim.measures.io import PathLike, write_curve_csv
from imagedim.measures.models import MomentCurve
from imagedim.measures.moments import discretize, source_dimension
from imagedim.settings import DEFAULT_THREADS

Sampler = Callable[[FieldSpec, Grid, int], FieldSample]


def replicate_seed(seed: int, index: int) -> int:
    """Independent 64-bit seed for replicate `index`."""
    state = np.random.SeedSequence(seed, spawn_key=(index,)).generate_state(1, dtype=np.uint64)
    return int(state[0])


def constant_sampler(value: float = 0.0) -> Sampler:
    """A synthetic map sending every grid point to the same value."""

    def sample(spec: FieldSpec, grid: Grid, seed: int) -> FieldSample:
        values = np.full((grid.size, spec.d), float(value))
        return FieldSample(grid=grid, values=values, spec=spec, seed=seed, method="constant")

    return sample


def identity_sampler(spec: FieldSpec, grid: Grid, seed: int) -> FieldSample:
    """X(x) = x, which carries μ onto itself."""
    if spec.d != grid.N:
        raise ImageDimError(f"identity map needs d = N, got d={spec.d}, N={grid.N}")
    return FieldSample(grid=grid, values=grid.points(), spec=spec, seed=seed, method="identity")


class QEstimate(BaseModel):
    estimate: DimensionEstimate
    holder: HolderReport


class ReplicateResult(BaseModel):
    index: int
    seed: int
    status: Literal["success", "failed", "error"] = Field(..., description="failed = a Hölder check did not hold")
    results: List[QEstimate] = Field(default_factory=list, description="One entry per q, in config order")
    error: Optional[str] = None
    notes: List[str] = Field(default_factory=list, description="Sampler remarks")
    curves: List[MomentCurve] = Field(default_factory=list, exclude=True)


class QSummary(BaseModel):
    q: float
    prediction: Prediction
    estimates: List[float] = Field(..., description="Reported proxy per successful replicate, by index")
    mean: Optional[float] = None
    sd: Optional[float] = None
    tolerance: float
    passed: bool
    holder_ok: bool


class ExperimentReport(BaseModel):
    config_hash: str
    config: dict
    versions: Dict[str, str]
    seeds: List[int]
    replicates: List[ReplicateResult]
    summaries: List[QSummary]
    complete: bool = Field(..., description="Every replicate finished without error")
    passed: bool


def _versions() -> Dict[str, str]:
    return {
        "imagedim": imagedim.__version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pydantic": pydantic.VERSION,
    }


class ExperimentRunner:
    """Sample → push forward → image curve → estimate, per replicate; then aggregate per q."""

    def __init__(
        self,
        config: ExperimentConfig,
        threads: Optional[int] = None,
        tolerance: Optional[float] = None,
        sampler: Optional[Sampler] = None,
    ):
        self.config = config
        self.threads = threads or DEFAULT_THREADS
        self.tolerance = tolerance if tolerance is not None else config.tolerance
        self.sampler = sampler or (lambda spec, grid, seed: sample_field(spec, grid, seed, config.method))
        self.logger = logging.getLogger(__name__)
        self.timings: Dict[str, float] = {}
        self._atoms = None
        self._grid = None

    def predictions(self) -> List[Prediction]:
        field = self.config.field
        return [
            predicted_dimension(q, field, field.d, source_dimension(self.config.measure, q)) for q in self.config.q
        ]

    def _curve(self, im, q: float) -> MomentCurve:
        levels = range(self.config.fit[0], self.config.fit[1] + 1)
        if self.config.estimator == "correlation":
            return image_correlation_curve(im, q, levels)
        return image_moment_curve(im, q, levels)

    def _run_replicate(self, index: int, predictions: List[Prediction]) -> ReplicateResult:
        config = self.config
        seed = replicate_seed(config.seed, index)
        started = time.perf_counter()
        try:
            sample = self.sampler(config.field, self._grid, seed)
            im = image_measure(sample, self._atoms, measure_id=config.measure.kind)
            results, curves = [], []
            for q, prediction in zip(config.q, predictions):
                curve = self._curve(im, q)
                estimate = estimate_dq(curve, config.fit, kind=config.kind)
                alpha = 1.0 if prediction.case == "preserved" else prediction.alpha_lower
                holder = holder_upper_check(
                    estimate.value, source_dimension(config.measure, q), alpha, prediction.d, config.holder_tolerance
                )
                results.append(QEstimate(estimate=estimate, holder=holder))
                curves.append(curve)
            status = "success" if all(r.holder.holds for r in results) else "failed"
            self.logger.debug(f"Replicate {index}: {[round(r.estimate.value, 4) for r in results]}")
            return ReplicateResult(index=index, seed=seed, status=status, results=results, notes=sample.notes, curves=curves)
        except ImageDimError as e:
            self.logger.warning(f"Replicate {index} aborted: {e}")
            return ReplicateResult(index=index, seed=seed, status="error", error=str(e))
        finally:
            self.timings[f"replicate_{index}"] = time.perf_counter() - started

    def _summarize(self, position: int, prediction: Prediction, replicates: List[ReplicateResult]) -> QSummary:
        done = [r for r in sorted(replicates, key=lambda r: r.index) if r.status != "error"]
        values = [r.results[position].estimate.value for r in done]
        tolerance = self.tolerance if self.tolerance is not None else default_tolerance(prediction)
        if not values:
            return QSummary(
                q=self.config.q[position], prediction=prediction, estimates=[], tolerance=tolerance, passed=False, holder_ok=False
            )
        mean = math.fsum(values) / len(values)
        sd = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
        if prediction.case == "interval":
            passed = prediction.lower - tolerance <= mean <= prediction.upper + tolerance
        else:
            passed = abs(mean - prediction.value) <= tolerance
        holder_ok = all(r.results[position].holder.holds for r in done)
        return QSummary(
            q=self.config.q[position],
            prediction=prediction,
            estimates=values,
            mean=mean,
            sd=sd,
            tolerance=tolerance,
            passed=passed,
            holder_ok=holder_ok,
        )

    def run(self) -> ExperimentReport:
        config = self.config
        self.logger.info(
            f"Starting experiment: {config.replicates} replicates, q={config.q}, {config.field.kind} on {config.measure.kind}"
        )
        started = time.perf_counter()
        predictions = self.predictions()
        self._grid = unit_grid(config.resolution, config.measure.N)
        self._atoms = discretize(config.measure, config.depth)
        indices = list(range(config.replicates))
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            replicates = list(pool.map(lambda i: self._run_replicate(i, predictions), indices))
        summaries = [self._summarize(i, p, replicates) for i, p in enumerate(predictions)]
        complete = all(r.status != "error" for r in replicates)
        self.timings["total"] = time.perf_counter() - started
        report = ExperimentReport(
            config_hash=config.fingerprint(),
            config=config.model_dump(mode="json", exclude={"out"}),
            versions=_versions(),
            seeds=[r.seed for r in replicates],
            replicates=replicates,
            summaries=summaries,
            complete=complete,
            passed=complete and all(s.passed and s.holder_ok for s in summaries),
        )
        self.logger.info(f"Experiment finished in {self.timings['total']:.1f}s: passed={report.passed}")
        return report

    def write(self, report: ExperimentReport, out: PathLike) -> Path:
        """report.json, curves/q<q>_rep<i>.csv, summary.csv and timing.json under `out`."""
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(report.model_dump_json(indent=2))
        for replicate in report.replicates:
            for q, curve in zip(self.config.q, replicate.curves):
                write_curve_csv(curve, out / "curves" / f"q{q:g}_rep{replicate.index}.csv")
        with (out / "summary.csv").open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["q", "predicted", "mean", "sd"])
            for s in report.summaries:
                writer.writerow([s.q, s.prediction.value, s.mean, s.sd])
        (out / "timing.json").write_text(json.dumps(self.timings, indent=2, sort_keys=True))
        self.logger.info(f"Wrote experiment outputs to {out}")
        return out


def run_experiment(
    config: ExperimentConfig, threads: Optional[int] = None, tolerance: Optional[float] = None, sampler: Optional[Sampler] = None
) -> ExperimentReport:
    return ExperimentRunner(config, threads=threads, tolerance=tolerance, sampler=sampler).run()
