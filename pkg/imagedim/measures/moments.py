"""Cylinder masses, moment sums and correlation integrals of measure models."""

import logging
import math
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from imagedim.errors import BaseMismatchError, InvalidParameterError, ResolutionError, UnsupportedModelError
from imagedim.measures.models import (
    AtomsMeasure,
    CubeAddress,
    MeasureModel,
    MomentCurve,
    MomentEntry,
    MultinomialMeasure,
    UniformMeasure,
    cube_indices,
)

logger = logging.getLogger(__name__)

# Largest number of cubes discretize() will materialize.
MAX_DISCRETE_CUBES = 2 ** 26


def _check_q(q: float) -> None:
    if not q > 1:
        raise InvalidParameterError(f"moment order q must exceed 1, got {q}")


def cylinder_mass(model: MeasureModel, cube: CubeAddress) -> float:
    """Exact mass mu(C) of one cube of the hierarchy."""
    if cube.digits and cube.dimension != model.N:
        raise InvalidParameterError(f"cube has dimension {cube.dimension}, measure has {model.N}")
    if isinstance(model, MultinomialMeasure):
        if cube.m != model.m:
            raise BaseMismatchError(f"cube base {cube.m} does not match measure base {model.m}")
        mass = 1.0
        for digit in cube.digits:
            mass *= model.weights[model.symbol(digit)]
        return mass
    if isinstance(model, UniformMeasure):
        return float(cube.m) ** (-model.N * cube.level)
    points, masses = model.arrays()
    inside = np.all(cube_indices(points, cube.m, cube.level) == np.asarray(cube.index() or [0] * model.N), axis=1)
    return float(math.fsum(masses[inside]))


def cube_masses(model: AtomsMeasure, level: int, m: Optional[int] = None) -> np.ndarray:
    """Masses of the occupied level-k cubes of an atoms measure (empty cubes never appear)."""
    points, masses = model.arrays()
    index = cube_indices(points, m or model.m, level)
    _, inverse = np.unique(index, axis=0, return_inverse=True)
    return np.bincount(inverse.ravel(), weights=masses)


def moment_sum(model: MeasureModel, q: float, level: int) -> float:
    """Sum over level-k cubes of mu(C)^q, restricted to cubes of positive mass."""
    _check_q(q)
    if level < 0:
        raise InvalidParameterError(f"level must be nonnegative, got {level}")
    if isinstance(model, MultinomialMeasure):
        return float(sum(w ** q for w in model.weights if w > 0)) ** level
    if isinstance(model, UniformMeasure):
        return float(model.m) ** (model.N * level * (1.0 - q))
    occupied = cube_masses(model, level)
    return float(np.sum(occupied[occupied > 0] ** q))


def moment_curve(model: MeasureModel, q: float, levels: Iterable[int]) -> MomentCurve:
    entries = [
        MomentEntry(level=k, scale=float(model.m) ** -k, value=moment_sum(model, q, k)) for k in levels
    ]
    return MomentCurve(q=q, kind="mesh-moment", entries=entries)


def _ball_masses(points: np.ndarray, masses: np.ndarray, r: float) -> np.ndarray:
    """mu(B(x_i, r)) for every atom, closed Euclidean balls."""
    if points.shape[1] == 1:
        order = np.argsort(points[:, 0], kind="stable")
        xs = points[order, 0]
        cumulative = np.concatenate([[0.0], np.cumsum(masses[order])])
        lo = np.searchsorted(xs, xs - r, side="left")
        hi = np.searchsorted(xs, xs + r, side="right")
        out = np.empty_like(masses)
        out[order] = cumulative[hi] - cumulative[lo]
        return out
    tree = cKDTree(points)
    neighbours = tree.query_ball_point(points, r)
    return np.array([masses[idx].sum() for idx in neighbours])


def atoms_correlation_integral(points: np.ndarray, masses: np.ndarray, q: float, r: float) -> float:
    _check_q(q)
    if not r > 0:
        raise InvalidParameterError(f"radius must be positive, got {r}")
    balls = _ball_masses(points, masses, r)
    return float(np.sum(masses * balls ** (q - 1.0)))


def correlation_integral(model: MeasureModel, q: float, r: float, depth: Optional[int] = None) -> float:
    """Atomic evaluation of the integral of mu(B(x,r))^(q-1) d mu(x).

    Multinomial and uniform models are first discretized at `depth`.
    """
    if not isinstance(model, AtomsMeasure):
        if depth is None:
            raise UnsupportedModelError("correlation_integral needs atoms; pass depth= to discretize first")
        model = discretize(model, depth)
    points, masses = model.arrays()
    return atoms_correlation_integral(points, masses, q, r)


def correlation_curve(model: MeasureModel, q: float, levels: Iterable[int], depth: Optional[int] = None) -> MomentCurve:
    if not isinstance(model, AtomsMeasure):
        if depth is None:
            raise UnsupportedModelError("correlation_curve needs atoms; pass depth= to discretize first")
        model = discretize(model, depth)
    points, masses = model.arrays()
    entries = []
    for k in levels:
        r = float(model.m) ** -k
        entries.append(MomentEntry(level=k, scale=r, value=atoms_correlation_integral(points, masses, q, r)))
    return MomentCurve(q=q, kind="correlation", entries=entries)


def _digit_masses(weights: Sequence[float], depth: int) -> np.ndarray:
    masses = np.ones(1)
    w = np.asarray(weights, dtype=float)
    for _ in range(depth):
        masses = np.kron(masses, w)
    return masses


def _cube_centers(m: int, N: int, depth: int, words: np.ndarray) -> np.ndarray:
    """Centers of the level-K cubes named by word indices (symbols base m^N, coarsest first)."""
    M = m ** N
    coords = np.zeros((words.size, N), dtype=np.int64)
    for k in range(1, depth + 1):
        symbol = (words // M ** (depth - k)) % M
        for axis in range(N):
            digit = (symbol // m ** (N - 1 - axis)) % m
            coords[:, axis] += digit * m ** (depth - k)
    return (coords + 0.5) / float(m) ** depth


def discretize(model: MeasureModel, depth: int) -> AtomsMeasure:
    """Atoms at the centers of the positive-mass level-K cubes, carrying their exact masses."""
    if depth < 1:
        raise InvalidParameterError(f"discretization depth must be >= 1, got {depth}")
    if isinstance(model, AtomsMeasure):
        return model
    M = model.m ** model.N
    if M ** depth > MAX_DISCRETE_CUBES:
        raise ResolutionError(f"{M}^{depth} cubes exceed the discretization limit {MAX_DISCRETE_CUBES}")
    if isinstance(model, MultinomialMeasure):
        masses = _digit_masses(model.weights, depth)
    else:
        masses = np.full(M ** depth, float(M) ** -depth)
    words = np.flatnonzero(masses > 0)
    logger.debug(f"Discretized {model.kind} measure at depth {depth}: {words.size} atoms")
    points = _cube_centers(model.m, model.N, depth, words)
    return AtomsMeasure.from_arrays(points, masses[words], m=model.m)


def analytic_dq(model: MeasureModel, q: float) -> float:
    """Closed-form D_q of a multinomial cascade."""
    _check_q(q)
    if not isinstance(model, MultinomialMeasure):
        raise UnsupportedModelError(f"analytic_dq is defined for multinomial measures, not {model.kind}")
    power_sum = sum(w ** q for w in model.weights if w > 0)
    return math.log(power_sum) / ((q - 1.0) * math.log(1.0 / model.m))


def source_dimension(model: MeasureModel, q: float) -> float:
    """D_q of a model whose dimension is known exactly (atoms are 0-dimensional)."""
    if isinstance(model, MultinomialMeasure):
        return analytic_dq(model, q)
    if isinstance(model, UniformMeasure):
        return float(model.N)
    return 0.0


def rescale_to_half_cube(model: MeasureModel, depth: Optional[int] = None) -> AtomsMeasure:
    """Image of the (discretized) model under x -> x/2, which lands in [0, 1/2)^N."""
    if not isinstance(model, AtomsMeasure) and depth is None:
        raise InvalidParameterError(f"{model.kind} measure needs an atom depth to rescale")
    atoms = model if isinstance(model, AtomsMeasure) else discretize(model, depth)
    points, masses = atoms.arrays()
    return AtomsMeasure.from_arrays(points / 2.0, masses, m=atoms.m)
