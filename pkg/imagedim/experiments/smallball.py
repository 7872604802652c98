"""Monte Carlo small-ball probabilities P{|X(y) - X(x_i)| <= r for all i}."""

import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field
from scipy import stats

from imagedim.errors import InvalidParameterError
from imagedim.experiments.predict import field_indices
from imagedim.fields.covariance import structure_function
from imagedim.fields.samplers import cholesky_with_jitter
from imagedim.fields.specs import FieldSpec
from imagedim.ultrametric.translates import phi_a, translate_family

logger = logging.getLogger(__name__)

# Radii with fewer hits than this are below Monte Carlo resolution.
MIN_HITS = 10
CHUNK = 1 << 16


def increment_covariance(spec: FieldSpec, points: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Cov(X₀(y) - X₀(x_i), X₀(y) - X₀(x_k)) = ½(σ²(y - x_i) + σ²(y - x_k) - σ²(x_i - x_k))."""
    n = len(points)
    to_y = [structure_function(spec, y - p) for p in points]
    out = np.empty((n, n))
    for i in range(n):
        for k in range(n):
            out[i, k] = 0.5 * (to_y[i] + to_y[k] - structure_function(spec, points[i] - points[k]))
    return out


def ball_probabilities(
    spec: FieldSpec, points: np.ndarray, y: np.ndarray, radii: Sequence[float], replicates: int, seed: int = 0
) -> np.ndarray:
    """Hit counts of the event max_i |X(y) - X(x_i)| <= r, one per radius."""
    lower, _ = cholesky_with_jitter(increment_covariance(spec, points, y))
    rng = np.random.default_rng(seed)
    radii = np.asarray(radii, dtype=float)
    hits = np.zeros(radii.size, dtype=np.int64)
    n = len(points)
    done = 0
    while done < replicates:
        size = min(CHUNK, replicates - done)
        # (size, d, n): the d coordinates are independent copies
        z = rng.standard_normal((size, spec.d, n)) @ lower.T
        spread = np.linalg.norm(z, axis=1).max(axis=1)
        hits += (spread[:, None] <= radii[None, :]).sum(axis=0)
        done += size
    return hits


def kernel_sum(points: np.ndarray, y: np.ndarray, alpha: float, s: float) -> float:
    """Σ over translates a of φ_a(x_1, ..., x_n, y)^(αs), with m = 2n²N + 2."""
    n, N = points.shape
    m = 2 * n * n * N + 2
    cloud = [tuple(p) for p in points] + [tuple(y)]
    return float(sum(phi_a(cloud, uid) ** (alpha * s) for uid in translate_family(m, N)))


class SmallBallPoint(BaseModel):
    r: float
    probability: float
    stderr: float
    resolved: bool = Field(..., description="At least MIN_HITS hits")
    closed_form: Optional[float] = Field(None, description="Exact probability when n = 1")


class ExponentCheck(BaseModel):
    s: float
    kernel: float = Field(..., description="Σ_a φ_a^(αs)")
    constants: List[float] = Field(..., description="P(r) / (r^(sn) kernel) per resolved radius")
    constant_slope: float = Field(..., description="Slope of log C(r) against log r")
    holds: bool = Field(..., description="exponent >= sn - tolerance and C(r) does not blow up as r decreases")


class SmallBallReport(BaseModel):
    n: int
    d: int
    alpha: float
    replicates: int
    points: List[SmallBallPoint]
    exponent: float = Field(..., description="Fitted slope of log P against log r")
    exponent_stderr: float
    expected_exponent: float = Field(..., description="dn, the small-r exponent for fixed distinct points")
    checks: List[ExponentCheck]
    closed_form_ok: Optional[bool] = Field(None, description="MC within 4 SE of the exact value at every radius (n = 1)")
    holds: bool


def verify_smallball(
    spec: FieldSpec,
    points: Sequence[Sequence[float]],
    y: Sequence[float],
    radii: Sequence[float],
    s_values: Sequence[float],
    replicates: int,
    seed: int = 0,
    tolerance: float = 0.1,
    alpha: Optional[float] = None,
) -> SmallBallReport:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    y = np.asarray(y, dtype=float)
    n, N = points.shape
    if not 1 <= n <= 3:
        raise InvalidParameterError(f"small-ball checks take 1 to 3 points, got {n}")
    if N != spec.N or y.shape != (N,):
        raise InvalidParameterError(f"points and y must lie in R^{spec.N}")
    cloud = np.vstack([points, y[None, :]])
    if np.any(cloud < 0) or np.any(cloud >= 0.5):
        raise InvalidParameterError("points must lie in [0, 1/2)^N")
    if any(not 0 < s <= spec.d for s in s_values):
        raise InvalidParameterError(f"each s must lie in (0, d = {spec.d}]")
    alpha = alpha if alpha is not None else field_indices(spec)[1]
    radii = np.sort(np.asarray(radii, dtype=float))[::-1]

    hits = ball_probabilities(spec, points, y, radii, replicates, seed)
    prob = hits / replicates
    stderr = np.sqrt(prob * (1.0 - prob) / replicates)
    resolved = hits >= MIN_HITS
    closed = None
    if n == 1:
        sigma = math.sqrt(structure_function(spec, y - points[0]))
        closed = stats.chi.cdf(radii / sigma, df=spec.d)
    table = [
        SmallBallPoint(
            r=float(r),
            probability=float(p),
            stderr=float(e),
            resolved=bool(ok),
            closed_form=None if closed is None else float(closed[i]),
        )
        for i, (r, p, e, ok) in enumerate(zip(radii, prob, stderr, resolved))
    ]
    if resolved.sum() < 3:
        raise InvalidParameterError(f"only {int(resolved.sum())} radii reach {MIN_HITS} hits; raise replicates")
    unresolved = [float(r) for r in radii[~resolved]]
    if unresolved:
        logger.warning(f"Radii below Monte Carlo resolution: {unresolved}")

    log_r, log_p = np.log(radii[resolved]), np.log(prob[resolved])
    fit = stats.linregress(log_r, log_p)
    checks = []
    for s in s_values:
        kernel = kernel_sum(points, y, alpha, s)
        constants = prob[resolved] / (radii[resolved] ** (s * n) * kernel)
        slope = float(stats.linregress(log_r, np.log(constants)).slope)
        holds = fit.slope >= s * n - tolerance and slope >= -tolerance
        checks.append(ExponentCheck(s=s, kernel=kernel, constants=constants.tolist(), constant_slope=slope, holds=holds))
    closed_ok = None
    if closed is not None:
        band = 4.0 * np.sqrt(closed * (1.0 - closed) / replicates)
        closed_ok = bool(np.all(np.abs(prob - closed) <= band + 1.0 / replicates))
    holds = all(c.holds for c in checks) and closed_ok is not False
    logger.info(f"Small-ball exponent {fit.slope:.3f} ± {fit.stderr:.3f} (n={n}, d={spec.d})")
    return SmallBallReport(
        n=n,
        d=spec.d,
        alpha=alpha,
        replicates=replicates,
        points=table,
        exponent=float(fit.slope),
        exponent_stderr=float(fit.stderr),
        expected_exponent=float(spec.d * n),
        checks=checks,
        closed_form_ok=closed_ok,
        holds=holds,
    )
