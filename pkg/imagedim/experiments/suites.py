"""Property suites over the ultrametric family, the tree calculus and the field samplers."""

import itertools
import logging
import math
from typing import Callable, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from imagedim.errors import ImageDimError
from imagedim.experiments.config import SmallBallConfig, TreeSuiteConfig, UltrametricSuiteConfig
from imagedim.fields.covariance import covariance_matrix
from imagedim.fields.diagnostics import sln_ratio_scan, variogram
from imagedim.fields.samplers import sample_field
from imagedim.fields.specs import FbmSpec, regular_grid, unit_grid
from imagedim.settings import ENUMERATION_GUARD
from imagedim.tree.counting import config_bound, count_level_configs, level_multisets, series_bound_check
from imagedim.tree.inequalities import frac_inequality_sweep, integer_inequality_sweep, orbit_partition_total
from imagedim.tree.measure import TreeMeasure
from imagedim.tree.multipotential import condition_profile, convergence_ratio, partial_J_sequence
from imagedim.tree.words import index_word, join_set
from imagedim.ultrametric.translates import (
    d_a,
    exception_bound,
    exception_count,
    lower_bound_check,
    select_translate,
    snap,
    translate_family,
)

logger = logging.getLogger(__name__)

# Failure instances kept per check in the report.
MAX_DUMPS = 5


class CheckResult(BaseModel):
    name: str
    status: Literal["success", "failed", "error"]
    checked: int = Field(0, description="Instances evaluated")
    failures: int = Field(0, description="Instances violating the property")
    detail: dict = Field(default_factory=dict)
    dumps: List[dict] = Field(default_factory=list, description="First failing instances")
    error: Optional[str] = None


class SuiteReport(BaseModel):
    name: str
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.status == "success" for c in self.checks)


class _Tally:
    def __init__(self):
        self.checked = 0
        self.failures = 0
        self.dumps: List[dict] = []
        self.detail: dict = {}

    def record(self, ok: bool, instance: Callable[[], dict]) -> None:
        self.checked += 1
        if not ok:
            self.failures += 1
            if len(self.dumps) < MAX_DUMPS:
                self.dumps.append(instance())


def _run_check(name: str, body: Callable[[_Tally], None]) -> CheckResult:
    tally = _Tally()
    try:
        body(tally)
    except ImageDimError as e:
        logger.error(f"Check {name} raised: {e}")
        return CheckResult(name=name, status="error", checked=tally.checked, failures=tally.failures, error=str(e))
    status = "success" if tally.failures == 0 and tally.checked > 0 else "failed"
    logger.info(f"Check {name}: {tally.checked} instances, {tally.failures} failures")
    return CheckResult(
        name=name,
        status=status,
        checked=tally.checked,
        failures=tally.failures,
        detail=tally.detail,
        dumps=tally.dumps,
    )


def _half_cube_points(rng: np.random.Generator, count: int, N: int) -> List[Tuple[float, ...]]:
    return [tuple(p) for p in rng.uniform(0.0, 0.5, size=(count, N))]


# ultrametric family


def ultrametric_suite(config: UltrametricSuiteConfig) -> SuiteReport:
    rng = np.random.default_rng(config.seed)
    cells = list(itertools.product(config.m_values, config.dimensions))

    def lower_bound(t: _Tally) -> None:
        for i in range(config.pairs):
            m, N = cells[i % len(cells)]
            x, y = _half_cube_points(rng, 2, N)
            sx, sy = snap(x, m), snap(y, m)
            for uid in translate_family(m, N):
                t.record(lower_bound_check(sx, sy, uid), lambda: {"x": x, "y": y, "m": m, "j": uid.j})

    def ultrametric_inequality(t: _Tally) -> None:
        for i in range(config.triples):
            m, N = cells[i % len(cells)]
            x, y, z = (snap(p, m) for p in _half_cube_points(rng, 3, N))
            uid = translate_family(m, N)[int(rng.integers((m // 2) ** N))]
            ok = d_a(x, z, uid) <= max(d_a(x, y, uid), d_a(y, z, uid))
            t.record(ok, lambda: {"points": [x.X, y.X, z.X], "m": m, "j": uid.j})

    def exceptions(t: _Tally) -> None:
        worst: Dict[str, int] = {}
        for m, N in cells:
            bound = exception_bound(m, N)
            for _ in range(config.exception_pairs):
                x, y = _half_cube_points(rng, 2, N)
                count = exception_count(x, y, m)
                worst[f"m={m},N={N}"] = max(worst.get(f"m={m},N={N}", 0), count)
                t.record(count <= bound, lambda: {"x": x, "y": y, "m": m, "count": count, "bound": bound})
        t.detail["max_exceptions"] = worst

    def selection(t: _Tally) -> None:
        for n in range(1, config.max_points + 1):
            for N in config.dimensions:
                m = 2 * n * n * N + 2
                for _ in range(config.sets):
                    points = _half_cube_points(rng, n, N)
                    uid = select_translate(points, m)
                    ok = True
                    for x, y in itertools.combinations(points, 2):
                        gap = math.dist(x, y)
                        dist = d_a(x, y, uid)
                        ok &= gap <= math.sqrt(N) * dist * (1 + 1e-12) and dist <= 8 * m * (m - 1) * gap * (1 + 1e-12)
                    t.record(ok, lambda: {"points": points, "m": m, "j": uid.j})

    checks = [
        _run_check("ultrametric.lower-bound", lower_bound),
        _run_check("ultrametric.strong-triangle", ultrametric_inequality),
        _run_check("ultrametric.exception-count", exceptions),
        _run_check("ultrametric.select-translate", selection),
    ]
    return SuiteReport(name="ultrametric", checks=checks)


# tree calculus


def tree_suite(config: TreeSuiteConfig) -> SuiteReport:
    rng = np.random.default_rng(config.seed)
    measures = {
        K: [TreeMeasure.random(config.M, K, rng, config.concentration) for _ in range(config.measures)]
        for K in range(1, config.max_depth + 1)
    }

    def integer(t: _Tally) -> None:
        for K, tms in measures.items():
            for n in config.ns:
                for q in config.qs:
                    if not q >= n:
                        continue
                    for tm in tms:
                        for result in integer_inequality_sweep(tm, q, n):
                            t.record(result.holds, lambda: {**result.model_dump(), "measure": tm.to_dict()})

    def fractional(t: _Tally) -> None:
        for K, tms in measures.items():
            for n in config.ns:
                for q in config.qs:
                    if not n <= q < n + 1:
                        continue
                    for tm in tms:
                        for result in frac_inequality_sweep(tm, q, n):
                            t.record(result.holds, lambda: {**result.model_dump(), "measure": tm.to_dict()})

    def partition(t: _Tally) -> None:
        for K, tms in measures.items():
            for n in config.ns:
                if (config.M ** K) ** n > ENUMERATION_GUARD:
                    continue
                for tm in tms:
                    total = orbit_partition_total(tm, n)
                    t.record(abs(total - 1.0) <= 1e-9, lambda: {"K": K, "n": n, "total": total})

    def join_cardinality(t: _Tally) -> None:
        skipped = []
        for M in (2, 3):
            for K in range(1, config.max_depth + 1):
                for n in range(2, 6):
                    if math.comb(M ** K, n) > 200_000:
                        skipped.append((M, K, n))
                        continue
                    leaves = [index_word(i, K, M) for i in range(M ** K)]
                    for words in itertools.combinations(leaves, n):
                        js = join_set(words)
                        t.record(js.total() == n - 1, lambda: {"words": [list(w) for w in words]})
        t.detail["skipped_cells"] = skipped

    def counting(t: _Tally) -> None:
        for n in range(1, config.count_max_n + 1):
            bound = config_bound(n)
            for ks in level_multisets(n, config.count_max_level):
                count = count_level_configs(ks, n)
                t.record(count <= bound, lambda: {"levels": list(ks), "count": count, "bound": bound})

    def series(t: _Tally) -> None:
        for n in range(1, config.series_max_n + 1):
            result = series_bound_check(n, config.series_lam, config.series_max_level)
            t.detail[f"n={n}"] = {"partial_sum": result.partial_sum, "bound": result.bound}
            t.record(result.holds, lambda: result.model_dump())

    def convergence(t: _Tally) -> None:
        q, n, exponent = config.convergence_q, config.convergence_n, config.convergence_exponent
        low, high = config.convergence_depths
        depths = list(range(low, high + 1))
        f = lambda l: 2.0 ** (exponent * l)  # noqa: E731
        profile = condition_profile(TreeMeasure.from_multinomial(config.convergence_weights, high), f, q)
        worst = max(value for _, value in profile)
        partials = partial_J_sequence(config.convergence_weights, f, q, n, depths)
        fit = convergence_ratio(partials)
        t.detail["condition_max"] = worst
        t.detail["ratio"] = fit.ratio
        t.record(worst <= -0.1, lambda: {"condition_profile": profile})
        t.record(fit.monotone and fit.ratio <= 0.95, lambda: fit.model_dump())

        growing = partial_J_sequence([0.5, 0.5], lambda l: 4.0 ** l, 1.5, 1, depths)
        steps = np.diff(growing)
        t.detail["divergent_steps"] = steps.tolist()
        t.record(bool(np.all(steps >= 0.4) and np.all(np.diff(steps) >= 0)), lambda: {"partials": growing})

    checks = [
        _run_check("tree.integer-inequality", integer),
        _run_check("tree.frac-inequality", fractional),
        _run_check("tree.orbit-partition", partition),
        _run_check("tree.join-cardinality", join_cardinality),
        _run_check("tree.count-level-configs", counting),
        _run_check("tree.series-bound", series),
        _run_check("tree.partial-J-convergence", convergence),
    ]
    return SuiteReport(name="tree", checks=checks)


# Gaussian fields


def field_suite(config: SmallBallConfig) -> SuiteReport:
    def covariance_agreement(t: _Tally) -> None:
        grid = regular_grid(8, 1.0 / 8)
        points = grid.points()
        R = config.fidelity_replicates
        for alpha in config.fidelity_alphas:
            spec = FbmSpec(alpha=alpha)
            exact = covariance_matrix(spec, points)
            band = 4.0 * np.sqrt((np.outer(np.diag(exact), np.diag(exact)) + exact ** 2) / R)
            for method in ("circulant-1d", "exact-cholesky"):
                draws = np.stack(
                    [sample_field(spec, grid, config.seed + i, method).values[:, 0] for i in range(R)]
                )
                empirical = draws.T @ draws / R
                deviation = np.abs(empirical - exact) - band
                t.record(
                    bool(np.all(deviation <= 1e-12)),
                    lambda: {"alpha": alpha, "method": method, "worst": float(deviation.max())},
                )

    def variograms(t: _Tally) -> None:
        grid = unit_grid(config.variogram_resolution)
        lags = [2.0 ** -k for k in range(1, 6)]
        for alpha in config.fidelity_alphas:
            spec = FbmSpec(alpha=alpha)
            samples = [
                sample_field(spec, grid, config.seed + i, "circulant-1d") for i in range(config.variogram_replicates)
            ]
            for point in variogram(samples, lags):
                expected = point.h ** (2 * alpha)
                ok = abs(point.value - expected) <= config.variogram_band * point.stderr
                t.record(ok, lambda: {"alpha": alpha, **point.model_dump(), "expected": expected})

    def nondeterminism(t: _Tally) -> None:
        scan = sln_ratio_scan(FbmSpec(alpha=0.5))
        worst = min(s.ratio for s in scan)
        t.detail["min_ratio"] = worst
        t.record(worst >= config.sln_min_ratio, lambda: {"scan": [s.model_dump() for s in scan]})

    checks = [
        _run_check("fields.covariance-agreement", covariance_agreement),
        _run_check("fields.variogram", variograms),
        _run_check("fields.nondeterminism", nondeterminism),
    ]
    return SuiteReport(name="fields", checks=checks)
