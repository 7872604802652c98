"""Measure models with exactly computable cylinder masses."""

import math
from fractions import Fraction
from typing import Annotated, List, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator, model_validator

MASS_TOLERANCE = 1e-12


class CubeAddress(BaseModel):
    """One half-open m-adic cube of level k in [0,1)^N."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(..., description="Branching base (even, >= 2)")
    level: int = Field(..., ge=0, description="Cube level k")
    digits: Tuple[Tuple[int, ...], ...] = Field(
        ..., description="One N-tuple of base-m digits per level, coarsest first"
    )

    @field_validator("m")
    @classmethod
    def _even_base(cls, m: int) -> int:
        if m < 2 or m % 2:
            raise ValueError(f"cube base must be an even integer >= 2, got {m}")
        return m

    @model_validator(mode="after")
    def _check_digits(self) -> "CubeAddress":
        if len(self.digits) != self.level:
            raise ValueError(f"expected {self.level} digit tuples, got {len(self.digits)}")
        widths = {len(d) for d in self.digits}
        if len(widths) > 1:
            raise ValueError("all digit tuples must share the ambient dimension")
        for digit in self.digits:
            if any(not 0 <= c < self.m for c in digit):
                raise ValueError(f"digit {digit} outside [0, {self.m - 1}]")
        return self

    @property
    def dimension(self) -> int:
        return len(self.digits[0]) if self.digits else 0

    def index(self) -> Tuple[int, ...]:
        """Integer cube index (i_1, ..., i_N) with the cube equal to prod [i m^-k, (i+1) m^-k)."""
        if not self.digits:
            return ()
        out = [0] * self.dimension
        for digit in self.digits:
            out = [i * self.m + c for i, c in zip(out, digit)]
        return tuple(out)

    def lower_corner(self) -> Tuple[Fraction, ...]:
        side = Fraction(1, self.m ** self.level)
        return tuple(i * side for i in self.index())

    @classmethod
    def containing(cls, point, m: int, level: int) -> "CubeAddress":
        """Address of the level-k cube holding `point` (exact for float input)."""
        index = cube_indices(np.atleast_2d(np.asarray(point, dtype=float)), m, level)[0]
        digits = []
        for k in range(level, 0, -1):
            digits.append(tuple(int(i // m ** (k - 1)) % m for i in index))
        return cls(m=m, level=level, digits=tuple(digits))


def _is_power_of_two(m: int) -> bool:
    return m & (m - 1) == 0


def cube_indices(points: np.ndarray, m: int, level: int) -> np.ndarray:
    """Per-coordinate level-k cube indices floor(x m^k), computed without rounding error.

    Powers of two scale floats exactly; any other base goes through the exact
    integer ratio of each coordinate.
    """
    points = np.asarray(points, dtype=float)
    scale = m ** level
    if scale >= 2 ** 62:
        raise ValueError(f"level {level} exceeds the 62-bit index range for base {m}")
    if _is_power_of_two(m):
        return np.floor(points * float(scale)).astype(np.int64)
    out = np.empty(points.shape, dtype=np.int64)
    for pos, value in np.ndenumerate(points):
        num, den = float(value).as_integer_ratio()
        out[pos] = (num * scale) // den
    return out


class MultinomialMeasure(BaseModel):
    """Self-similar cascade: every level-k cylinder carries the product of its digit weights."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["multinomial"] = "multinomial"
    m: int = Field(..., ge=2, description="Base of the cube hierarchy")
    N: int = Field(1, ge=1, description="Ambient dimension")
    weights: Tuple[float, ...] = Field(..., description="Probability vector over the m^N digit symbols")

    @model_validator(mode="after")
    def _check_weights(self) -> "MultinomialMeasure":
        if len(self.weights) != self.m ** self.N:
            raise ValueError(f"need {self.m ** self.N} weights, got {len(self.weights)}")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        if abs(math.fsum(self.weights) - 1.0) > MASS_TOLERANCE:
            raise ValueError(f"weights sum to {math.fsum(self.weights)!r}, not 1")
        return self

    def symbol(self, digit: Tuple[int, ...]) -> int:
        """Digit tuple -> symbol index, first coordinate most significant."""
        s = 0
        for c in digit:
            s = s * self.m + c
        return s


class AtomsMeasure(BaseModel):
    """Finite list of point masses in [0,1)^N."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["atoms"] = "atoms"
    N: int = Field(1, ge=1, description="Ambient dimension")
    m: int = Field(2, ge=2, description="Base of the mesh used for moment sums")
    points: Tuple[Tuple[float, ...], ...] = Field(..., description="Atom locations")
    masses: Tuple[float, ...] = Field(..., description="Atom masses")

    @model_validator(mode="after")
    def _check_atoms(self) -> "AtomsMeasure":
        if len(self.points) != len(self.masses):
            raise ValueError("points and masses differ in length")
        if not self.points:
            raise ValueError("an atoms measure needs at least one atom")
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.N:
            raise ValueError(f"points must have {self.N} coordinates each")
        if np.any(pts < 0.0) or np.any(pts >= 1.0):
            raise ValueError("atoms must lie in [0,1)^N")
        if any(w < 0 for w in self.masses):
            raise ValueError("masses must be nonnegative")
        if abs(math.fsum(self.masses) - 1.0) > MASS_TOLERANCE:
            raise ValueError(f"masses sum to {math.fsum(self.masses)!r}, not 1")
        return self

    def arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.points, dtype=float), np.asarray(self.masses, dtype=float)

    @classmethod
    def from_arrays(cls, points: np.ndarray, masses: np.ndarray, m: int = 2) -> "AtomsMeasure":
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return cls(
            N=points.shape[1],
            m=m,
            points=tuple(map(tuple, points.tolist())),
            masses=tuple(np.asarray(masses, dtype=float).tolist()),
        )


class UniformMeasure(BaseModel):
    """Lebesgue measure on [0,1)^N."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["uniform"] = "uniform"
    N: int = Field(1, ge=1, description="Ambient dimension")
    m: int = Field(2, ge=2, description="Base of the cube hierarchy")


MeasureModel = Annotated[
    Union[MultinomialMeasure, AtomsMeasure, UniformMeasure], Field(discriminator="kind")
]

measure_adapter: TypeAdapter = TypeAdapter(MeasureModel)


class MomentEntry(BaseModel):
    """One scale of a moment curve."""

    level: int = Field(..., description="Mesh level k")
    scale: float = Field(..., gt=0, description="Scale r = m^-k")
    value: float = Field(..., description="Moment sum or correlation integral at r")


class MomentCurve(BaseModel):
    """(scale, moment) pairs for one q, ordered from coarse to fine."""

    q: float = Field(..., gt=1, description="Moment order")
    kind: Literal["mesh-moment", "correlation"] = Field(..., description="How values were computed")
    entries: List[MomentEntry] = Field(..., description="Entries with strictly decreasing scale")

    @model_validator(mode="after")
    def _check_scales(self) -> "MomentCurve":
        scales = [e.scale for e in self.entries]
        if any(b >= a for a, b in zip(scales, scales[1:])):
            raise ValueError("scales must be strictly decreasing")
        for e in self.entries:
            if e.value < 0 or e.value > 1 + MASS_TOLERANCE:
                raise ValueError(f"moment value {e.value} at level {e.level} outside [0, 1]")
        return self

    def arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        levels = np.array([e.level for e in self.entries])
        scales = np.array([e.scale for e in self.entries])
        values = np.array([e.value for e in self.entries])
        return levels, scales, values

    def to_csv_rows(self) -> List[Tuple[int, float, float]]:
        return [(e.level, e.scale, e.value) for e in self.entries]
