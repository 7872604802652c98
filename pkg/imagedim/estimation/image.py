"""Push-forward of atomic measures under sampled fields, and their moment curves."""

import logging
from typing import Iterable, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from imagedim.errors import InvalidParameterError, ResolutionError
from imagedim.fields.specs import FieldSample
from imagedim.measures.models import MASS_TOLERANCE, AtomsMeasure, MomentCurve, MomentEntry, cube_indices
from imagedim.measures.moments import atoms_correlation_integral
from imagedim.settings import IMAGE_SNAP

logger = logging.getLogger(__name__)


class ImageMeasure(BaseModel):
    """Atoms X(x_i) in R^d carrying the source masses, coincident images merged."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    points: np.ndarray = Field(..., description="Image atom locations, shape (n, d)")
    masses: np.ndarray = Field(..., description="Image atom masses, shape (n,)")
    provenance: dict = Field(default_factory=dict, description="Measure id and field sample id")

    @model_validator(mode="after")
    def _check_mass(self) -> "ImageMeasure":
        if self.points.ndim != 2 or self.points.shape[0] != self.masses.shape[0]:
            raise ValueError("points must be (n, d) with one mass per point")
        if abs(float(np.sum(self.masses)) - 1.0) > MASS_TOLERANCE * max(1, self.masses.size) ** 0.5:
            raise ValueError(f"image mass {float(np.sum(self.masses))!r} is not 1")
        return self

    @property
    def d(self) -> int:
        return self.points.shape[1]


def merge_coincident(points: np.ndarray, masses: np.ndarray, snap: float = IMAGE_SNAP):
    """Snap to the `snap` lattice and add up masses of equal snapped points."""
    snapped = np.round(points / snap) * snap
    unique, inverse = np.unique(snapped, axis=0, return_inverse=True)
    return unique, np.bincount(inverse.ravel(), weights=masses)


def grid_positions(field: FieldSample, points: np.ndarray) -> np.ndarray:
    """Flat grid index of the lattice point nearest to each atom."""
    grid = field.grid
    if points.shape[1] != grid.N:
        raise InvalidParameterError(f"atoms live in R^{points.shape[1]}, field grid in R^{grid.N}")
    steps = np.rint((points - np.asarray(grid.origin)) / grid.spacing).astype(np.int64)
    outside = np.any((steps < 0) | (steps >= np.asarray(grid.shape)), axis=1)
    if outside.any():
        bad = points[np.flatnonzero(outside)[0]]
        raise ResolutionError(f"atom {tuple(bad.tolist())} lies more than half a cell off the field grid")
    return np.ravel_multi_index(tuple(steps.T), grid.shape)


def image_measure(field: FieldSample, atoms: AtomsMeasure, measure_id: str = "measure") -> ImageMeasure:
    """μ_X: the atom at x with mass w moves to X(x) with mass w."""
    points, masses = atoms.arrays()
    images = field.values[grid_positions(field, points)]
    merged, merged_masses = merge_coincident(images, masses)
    logger.debug(f"Image of {len(masses)} atoms has {len(merged_masses)} distinct points")
    provenance = {"measure": measure_id, "field_seed": field.seed, "method": field.method}
    return ImageMeasure(points=merged, masses=merged_masses, provenance=provenance)


def image_moment_sum(im: ImageMeasure, q: float, level: int, m: int = 2, origin: Optional[Sequence[float]] = None) -> float:
    anchor = im.points.min(axis=0) if origin is None else np.asarray(origin, dtype=float)
    shifted = im.points - anchor
    if np.any(shifted < 0):
        raise InvalidParameterError("mesh origin must lie below every image atom")
    index = cube_indices(shifted, m, level)
    _, inverse = np.unique(index, axis=0, return_inverse=True)
    occupied = np.bincount(inverse.ravel(), weights=im.masses)
    return float(np.sum(occupied[occupied > 0] ** q))


def image_moment_curve(
    im: ImageMeasure, q: float, levels: Iterable[int], m: int = 2, origin: Optional[Sequence[float]] = None
) -> MomentCurve:
    """Mesh moments of μ_X over m-adic cubes of R^d anchored at `origin` (default: coordinate-wise min)."""
    if not q > 1:
        raise InvalidParameterError(f"moment order q must exceed 1, got {q}")
    entries = [
        MomentEntry(level=k, scale=float(m) ** -k, value=image_moment_sum(im, q, k, m, origin)) for k in levels
    ]
    return MomentCurve(q=q, kind="mesh-moment", entries=entries)


def image_correlation_curve(im: ImageMeasure, q: float, levels: Iterable[int], m: int = 2) -> MomentCurve:
    """Σ_i w_i μ_X(B(y_i, r))^(q-1) at r = m^-k."""
    entries = []
    for k in levels:
        r = float(m) ** -k
        entries.append(MomentEntry(level=k, scale=r, value=atoms_correlation_integral(im.points, im.masses, q, r)))
    return MomentCurve(q=q, kind="correlation", entries=entries)
