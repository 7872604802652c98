"""Samplers for X = (X_1, ..., X_d) with i.i.d. coordinate processes."""

import logging
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy import linalg
from scipy.fft import fft

from imagedim.errors import EmbeddingError, InvalidParameterError, NotPositiveDefiniteError, UnsupportedModelError
from imagedim.fields.covariance import RB_HIGH, RB_LOW, covariance_matrix, increment_autocovariance, sphere_area
from imagedim.fields.specs import FbmSpec, FieldSample, FieldSpec, Grid, InfinityScaleSpec, RieszBesselSpec
from imagedim.settings import JITTER_SCALE

logger = logging.getLogger(__name__)

MAX_CHOLESKY_POINTS = 4096
RB_BINS = 4096
BINS_PER_ANNULUS = 64
# Points synthesized per block in the spectral sampler.
SPECTRAL_CHUNK = 1024


def coordinate_streams(seed: int, d: int) -> List[np.random.Generator]:
    """One independent generator per coordinate process, derived from `seed` alone."""
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(d)]


def cholesky_with_jitter(matrix: np.ndarray) -> Tuple[np.ndarray, float]:
    """Lower Cholesky factor, adding JITTER_SCALE * trace/n to the diagonal at most once."""
    try:
        return linalg.cholesky(matrix, lower=True), 0.0
    except linalg.LinAlgError:
        n = matrix.shape[0]
        jitter = JITTER_SCALE * float(np.trace(matrix)) / n
        logger.warning(f"Covariance not numerically positive definite; adding jitter {jitter:.3e}")
        try:
            return linalg.cholesky(matrix + jitter * np.eye(n), lower=True), jitter
        except linalg.LinAlgError as exc:
            raise NotPositiveDefiniteError(
                f"covariance of {n} points is not positive definite after jitter {jitter:.3e}"
            ) from exc


def sample_cholesky(spec: FieldSpec, grid: Grid, seed: int) -> FieldSample:
    points = grid.points()
    if len(points) > MAX_CHOLESKY_POINTS:
        raise InvalidParameterError(
            f"exact-cholesky handles at most {MAX_CHOLESKY_POINTS} points, grid has {len(points)}"
        )
    # X(0) = 0, so the origin carries no randomness and would make the matrix singular
    free = np.linalg.norm(points, axis=1) > 0
    values = np.zeros((len(points), spec.d))
    jitter = 0.0
    if free.any():
        lower, jitter = cholesky_with_jitter(covariance_matrix(spec, points[free]))
        for axis, rng in enumerate(coordinate_streams(seed, spec.d)):
            values[free, axis] = lower @ rng.standard_normal(int(free.sum()))
    return FieldSample(grid=grid, values=values, spec=spec, seed=seed, method="exact-cholesky", jitter=jitter)


def _embedding_eigenvalues(spec: FieldSpec, spacing: float, n_lags: int) -> np.ndarray:
    r = increment_autocovariance(spec, spacing, n_lags)
    circulant = np.concatenate([r, r[-2:0:-1]])
    return np.real(fft(circulant))


def sample_circulant(spec: FieldSpec, grid: Grid, seed: int) -> FieldSample:
    """Davies-Harte synthesis of the increments on a uniform N=1 grid starting at 0, then cumsum."""
    if grid.N != 1 or spec.N != 1:
        raise InvalidParameterError("circulant-1d needs a one-dimensional grid and spec")
    if grid.origin[0] != 0.0:
        raise InvalidParameterError(f"circulant-1d grids must start at 0, got origin {grid.origin[0]}")
    n_inc = grid.shape[0] - 1
    values = np.zeros((grid.size, spec.d))
    notes = []
    if n_inc == 0:
        return FieldSample(grid=grid, values=values, spec=spec, seed=seed, method="circulant-1d")

    lags = n_inc
    eigenvalues = _embedding_eigenvalues(spec, grid.spacing, lags)
    if eigenvalues.min() < -1e-10 * np.abs(eigenvalues).max():
        logger.warning(f"Circulant embedding of size {2 * lags} has negative eigenvalues; doubling")
        lags = 2 * n_inc
        eigenvalues = _embedding_eigenvalues(spec, grid.spacing, lags)
        notes.append(f"embedding doubled to {2 * lags}")
        if eigenvalues.min() < -1e-10 * np.abs(eigenvalues).max():
            raise EmbeddingError(f"negative eigenvalue {eigenvalues.min():.3e} after doubling the embedding")
    eigenvalues = np.clip(eigenvalues, 0.0, None)
    size = eigenvalues.size
    scale = np.sqrt(eigenvalues / size)

    for axis, rng in enumerate(coordinate_streams(seed, spec.d)):
        noise = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        increments = np.real(fft(scale * noise))[:n_inc]
        values[1:, axis] = np.cumsum(increments)
    return FieldSample(grid=grid, values=values, spec=spec, seed=seed, method="circulant-1d", notes=notes)


def frequency_bins(spec: FieldSpec, n_bins: Optional[int] = None) -> np.ndarray:
    """Edges (lo, hi) of the radial frequency bins used by the spectral sampler."""
    if isinstance(spec, RieszBesselSpec):
        edges = np.geomspace(RB_LOW, RB_HIGH, (n_bins or RB_BINS) + 1)
        return np.stack([edges[:-1], edges[1:]], axis=1)
    if isinstance(spec, InfinityScaleSpec):
        per = n_bins or BINS_PER_ANNULUS
        blocks = []
        for j in range(spec.last_annulus + 1):
            lo, hi = spec.annulus(j)
            edges = np.geomspace(max(lo, RB_LOW), hi, per + 1)
            blocks.append(np.stack([edges[:-1], edges[1:]], axis=1))
        return np.concatenate(blocks)
    raise UnsupportedModelError(f"spectral synthesis covers riesz-bessel and infinity-scale, not {spec.kind}")


def spectral_design(spec: FieldSpec, rng: np.random.Generator, n_bins: Optional[int] = None):
    """Log-uniform radius per bin and amplitude² = S_(N-1) ρ^N f(ρ) Δlog ρ."""
    bins = frequency_bins(spec, n_bins)
    log_lo, log_hi = np.log(bins[:, 0]), np.log(bins[:, 1])
    rho = np.exp(rng.uniform(log_lo, log_hi))
    weights = sphere_area(spec.N) * rho ** spec.N * spec.density(rho) * (log_hi - log_lo)
    return rho, weights


def _random_directions(rng: np.random.Generator, count: int, N: int) -> np.ndarray:
    if N == 1:
        return np.ones((count, 1))
    raw = rng.standard_normal((count, N))
    return raw / np.linalg.norm(raw, axis=1, keepdims=True)


def sample_spectral(spec: FieldSpec, grid: Grid, seed: int, n_bins: Optional[int] = None) -> FieldSample:
    """Randomized spectral sum Σ a_k (ξ_k (cos<λ_k,t> - 1) + η_k sin<λ_k,t>), zero at the origin."""
    if grid.N != spec.N:
        raise InvalidParameterError(f"grid dimension {grid.N} does not match spec dimension {spec.N}")
    points = grid.points()
    values = np.zeros((len(points), spec.d))
    for axis, rng in enumerate(coordinate_streams(seed, spec.d)):
        rho, weights = spectral_design(spec, rng, n_bins)
        freqs = rho[:, None] * _random_directions(rng, rho.size, spec.N)
        amplitude = np.sqrt(weights)
        xi = amplitude * rng.standard_normal(rho.size)
        eta = amplitude * rng.standard_normal(rho.size)
        for start in range(0, len(points), SPECTRAL_CHUNK):
            phase = points[start:start + SPECTRAL_CHUNK] @ freqs.T
            values[start:start + SPECTRAL_CHUNK, axis] = (np.cos(phase) - 1.0) @ xi + np.sin(phase) @ eta
    logger.debug(f"Spectral synthesis of {spec.kind} with {rho.size} frequencies on {len(points)} points")
    return FieldSample(grid=grid, values=values, spec=spec, seed=seed, method="spectral")


SAMPLERS: Dict[str, Callable[..., FieldSample]] = {
    "exact-cholesky": sample_cholesky,
    "circulant-1d": sample_circulant,
    "spectral": sample_spectral,
}


def sample_field(spec: FieldSpec, grid: Grid, seed: int, method: str = "exact-cholesky") -> FieldSample:
    """Draw (X(t))_{t in grid}; bit-identical for identical (spec, grid, seed, method)."""
    if method not in SAMPLERS:
        raise InvalidParameterError(f"unknown sampling method '{method}', choose from {sorted(SAMPLERS)}")
    if isinstance(spec, FbmSpec) and method == "spectral":
        raise UnsupportedModelError("fbm is sampled exactly; use exact-cholesky or circulant-1d")
    if grid.N != spec.N:
        raise InvalidParameterError(f"grid dimension {grid.N} does not match spec dimension {spec.N}")
    return SAMPLERS[method](spec, grid, seed)
