"""Increment-variance diagnostics: variograms, conditional variances, indices and moduli."""

import logging
import math
from typing import List, Literal, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field
from scipy import linalg

from imagedim.errors import InvalidParameterError, ResolutionError, UnsupportedModelError
from imagedim.fields.covariance import covariance_matrix, one_minus_spherical_cos, structure_function
from imagedim.fields.samplers import cholesky_with_jitter, coordinate_streams, spectral_design
from imagedim.fields.specs import (
    DyadicPiecewisePsi,
    FbmSpec,
    FieldSample,
    FieldSpec,
    PowerLawPsi,
    PsiModel,
    RieszBesselSpec,
    regular_grid,
)

logger = logging.getLogger(__name__)


class VariogramPoint(BaseModel):
    h: float = Field(..., description="Lag length")
    value: float = Field(..., description="Mean squared increment pooled over x and replicates")
    stderr: float = Field(..., description="Standard error across replicates")


def _lag_steps(h: float, spacing: float, length: int) -> int:
    steps = h / spacing
    k = int(round(steps))
    if k < 1 or abs(steps - k) > 1e-9 * max(1.0, steps) or k >= length:
        raise InvalidParameterError(f"lag {h} is not a positive multiple of spacing {spacing} inside the grid")
    return k


def variogram(samples: Sequence[FieldSample], lags: Sequence[float]) -> List[VariogramPoint]:
    """Empirical E[(X₀(x+h) - X₀(x))²] along the first grid axis, coordinate 0."""
    if len(samples) < 2:
        raise InvalidParameterError("variogram needs at least two samples")
    grid = samples[0].grid
    out = []
    for h in lags:
        k = _lag_steps(h, grid.spacing, grid.shape[0])
        per_sample = []
        for sample in samples:
            field = sample.coordinate(0)
            diff = field[k:] - field[:-k]
            per_sample.append(float(np.mean(diff ** 2)))
        per_sample = np.asarray(per_sample)
        stderr = float(per_sample.std(ddof=1) / math.sqrt(len(per_sample)))
        out.append(VariogramPoint(h=float(h), value=float(per_sample.mean()), stderr=stderr))
    return out


class ConditionalVariance(NamedTuple):
    value: float
    jitter: float


def conditional_variance(spec: FieldSpec, x, conditioners) -> ConditionalVariance:
    """Var(X₀(x) | X₀(y), y in conditioners) = σ²(x) - cᵀK⁻¹c."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    ys = np.asarray(conditioners, dtype=float).reshape(-1, x.size) if len(conditioners) else np.empty((0, x.size))
    if len(ys):
        ys = np.unique(ys, axis=0)
        ys = ys[np.linalg.norm(ys, axis=1) > 0]
    prior = structure_function(spec, x)
    if not len(ys):
        return ConditionalVariance(prior, 0.0)
    if np.any(np.all(ys == x, axis=1)):
        return ConditionalVariance(0.0, 0.0)
    lower, jitter = cholesky_with_jitter(covariance_matrix(spec, ys))
    cross = covariance_matrix(spec, ys, x[None, :])[:, 0]
    w = linalg.solve_triangular(lower, cross, lower=True)
    return ConditionalVariance(max(prior - float(w @ w), 0.0), jitter)


class SlnRatio(BaseModel):
    r: float = Field(..., description="Conditioning radius")
    ratio: float = Field(..., description="Minimum over targets of conditional variance / ψ(r)")
    argmin: Tuple[float, ...] = Field(..., description="Target attaining the minimum")


def sln_ratio_scan(
    spec: FieldSpec,
    T: float = 0.25,
    radii: Sequence[float] = tuple(2.0 ** -k for k in range(4, 10)),
    spacing: Optional[float] = None,
    r0: Optional[float] = None,
    targets: int = 16,
) -> List[SlnRatio]:
    """Profile of min_x Var(X₀(x) | X₀(y): r <= |x-y| <= r0) / ψ(r) on a grid over [-T, T]^N.

    Targets closer to the origin than r are skipped, since their unconditional
    variance is already below ψ(r).
    """
    if not isinstance(spec, FbmSpec):
        raise UnsupportedModelError("strong local nondeterminism is scanned for fbm only")
    spacing = spacing or min(radii)
    r0 = r0 or T
    n = int(round(T / spacing))
    grid = regular_grid((2 * n + 1,) * spec.N, spacing, (-n * spacing,) * spec.N)
    points = grid.points()
    norms = np.linalg.norm(points, axis=1)
    out = []
    for r in radii:
        if r < spacing or r > r0:
            raise InvalidParameterError(f"radius {r} must lie in [spacing, r0] = [{spacing}, {r0}]")
        psi = structure_function(spec, r)
        candidates = points[norms >= r]
        pick = np.linspace(0, len(candidates) - 1, min(targets, len(candidates))).round().astype(int)
        best, where = math.inf, None
        for x in candidates[pick]:
            dist = np.linalg.norm(points - x, axis=1)
            cond = points[(dist >= r) & (dist <= r0)]
            ratio = conditional_variance(spec, x, cond).value / psi
            if ratio < best:
                best, where = ratio, x
        logger.debug(f"SLN scan r={r:.4g}: min ratio {best:.4f}")
        out.append(SlnRatio(r=r, ratio=best, argmin=tuple(float(c) for c in where)))
    return out


def psi_for_spec(spec: FieldSpec) -> PsiModel:
    """The increment-variance model ψ attached to a field law."""
    if isinstance(spec, FbmSpec):
        return PowerLawPsi(alpha=spec.alpha)
    if isinstance(spec, RieszBesselSpec):
        if not spec.effective_index < 1:
            raise UnsupportedModelError(
                f"riesz-bessel with γ+β-N/2 = {spec.effective_index} >= 1 is differentiable; no ψ index below 1"
            )
        return PowerLawPsi(alpha=spec.effective_index)
    return DyadicPiecewisePsi(H=spec.H[: spec.last_annulus + 1], tail_start=spec.tail_start)


def psi_indices(model: PsiModel) -> Tuple[float, float]:
    """(α_*, α^*): lower and upper index of ψ at 0."""
    if isinstance(model, PowerLawPsi):
        return model.alpha, model.alpha
    if isinstance(model, DyadicPiecewisePsi):
        tail = model.H[model.tail_start:]
        if not tail:
            raise InvalidParameterError(f"tail_start={model.tail_start} leaves no tail in {len(model.H)} indices")
        return min(tail), max(tail)
    raise UnsupportedModelError("indices are limits; a finite table cannot certify them")


def doubling_constant(psi: PsiModel, radii: Sequence[float]) -> float:
    """max ψ(2r)/ψ(r) over the sampled radii."""
    r = np.asarray(radii, dtype=float)
    return float(np.max(psi(2.0 * r) / psi(r)))


class LacunarityResult(BaseModel):
    status: Literal["holds-for-tail", "fails-at-k", "vacuous"]
    ratio: float = Field(..., description="Required growth factor T_(2k+2) / T_(2k+1)")
    witness: Optional[int] = Field(None, description="First k violating the inequality")
    times: List[int] = Field(default_factory=list, description="T_1, T_2, ... found in the prefix")


def _switch_times(H: Sequence[float], threshold: float) -> List[int]:
    times, above = [], False
    for j, h in enumerate(H):
        if not above and h >= threshold:
            times.append(j)
            above = True
        elif above and h < threshold:
            times.append(j)
            above = False
    return times


def check_lacunarity(H: Sequence[float], eps: float, tail_start: int = 0, burn_in: int = 0) -> LacunarityResult:
    """Check T_(2k+2) > ratio * T_(2k+1) for every k >= burn_in defined in the prefix."""
    tail = list(H[tail_start:])
    if not tail:
        raise InvalidParameterError("the index sequence has no tail")
    h_low, h_high = min(tail), max(tail)
    if not 0 < eps < h_low:
        raise InvalidParameterError(f"eps must lie in (0, {h_low}), got {eps}")
    ratio = (h_high - eps) * (1 - h_low + eps) / ((h_low - eps) * (1 - h_high + eps))
    times = _switch_times(H, h_high - eps)
    checked = 0
    for k in range(burn_in, len(times) // 2):
        t_odd, t_even = times[2 * k], times[2 * k + 1]
        checked += 1
        if not t_even > ratio * t_odd:
            return LacunarityResult(status="fails-at-k", ratio=ratio, witness=k, times=times)
    status = "holds-for-tail" if checked else "vacuous"
    return LacunarityResult(status=status, ratio=ratio, times=times)


class ModulusPoint(BaseModel):
    delta: float
    omega: float


def modulus_of_continuity(sample: FieldSample, deltas: Sequence[float]) -> List[ModulusPoint]:
    """ω(δ) = max |X₀(s) - X₀(t)| over grid pairs with |s - t| <= δ (N = 1 or 2)."""
    grid = sample.grid
    if grid.N not in (1, 2):
        raise InvalidParameterError("modulus_of_continuity supports N = 1 or 2")
    if min(deltas) < grid.spacing:
        raise ResolutionError(f"δ = {min(deltas)} is below the grid spacing {grid.spacing}")
    field = sample.coordinate(0)
    reach = int(math.floor(max(deltas) / grid.spacing + 1e-9))
    if grid.N == 1:
        offsets = [(k,) for k in range(1, min(reach, grid.shape[0] - 1) + 1)]
    else:
        offsets = [
            (a, b)
            for a in range(0, reach + 1)
            for b in range(-reach, reach + 1)
            if (a, b) > (0, 0) and a * a + b * b <= reach * reach
        ]
    lengths, maxima = [], []
    for off in offsets:
        lengths.append(grid.spacing * math.sqrt(sum(o * o for o in off)))
        maxima.append(_max_shift_difference(field, off))
    order = np.argsort(lengths, kind="stable")
    lengths = np.asarray(lengths)[order]
    running = np.maximum.accumulate(np.asarray(maxima)[order]) if maxima else np.zeros(0)
    out = []
    for delta in deltas:
        idx = np.searchsorted(lengths, delta * (1 + 1e-12), side="right")
        out.append(ModulusPoint(delta=float(delta), omega=float(running[idx - 1]) if idx else 0.0))
    return out


def _max_shift_difference(field: np.ndarray, offset: Tuple[int, ...]) -> float:
    a = [slice(None)] * field.ndim
    b = [slice(None)] * field.ndim
    for axis, o in enumerate(offset):
        n = field.shape[axis]
        if abs(o) >= n:
            return 0.0
        if o >= 0:
            a[axis], b[axis] = slice(o, n), slice(0, n - o)
        else:
            a[axis], b[axis] = slice(0, n + o), slice(-o, n)
    return float(np.max(np.abs(field[tuple(a)] - field[tuple(b)])))


def holder_ratio(modulus: Sequence[ModulusPoint], psi: PsiModel) -> List[Tuple[float, float]]:
    """(δ, ω(δ) / sqrt(ψ(δ) log(1/δ))) for δ < 1."""
    out = []
    for point in modulus:
        if point.delta >= 1:
            continue
        scale = math.sqrt(float(psi(point.delta)) * math.log(1.0 / point.delta))
        out.append((point.delta, point.omega / scale))
    return out


class TruncationPoint(BaseModel):
    h: float
    synthesized: float = Field(..., description="Increment variance realized by the frequency design")
    exact: float = Field(..., description="structure_function at the same lag")
    relative_error: float


def spectral_truncation_error(
    spec: FieldSpec, lags: Sequence[float], seed: int = 0, n_bins: Optional[int] = None
) -> List[TruncationPoint]:
    """Compare Σ a_k² · 2(1 - avg cos(ρ_k h)) of one frequency design with σ²(h)."""
    rng = coordinate_streams(seed, 1)[0]
    rho, weights = spectral_design(spec, rng, n_bins)
    out = []
    for h in lags:
        synthesized = float(np.sum(weights * 2.0 * one_minus_spherical_cos(rho * h, spec.N)))
        exact = structure_function(spec, h)
        out.append(
            TruncationPoint(h=float(h), synthesized=synthesized, exact=exact, relative_error=abs(synthesized - exact) / exact)
        )
    return out
