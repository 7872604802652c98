"""Field specifications, ψ models, grids and field samples."""

from typing import Annotated, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class FbmSpec(BaseModel):
    """Index-α fractional Brownian motion, E[(X(x+h)-X(x))^2] = |h|^(2α)."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["fbm"] = "fbm"
    alpha: float = Field(..., gt=0, lt=1, description="Hurst-type index α")
    N: int = Field(1, ge=1, description="Domain dimension")
    d: int = Field(1, ge=1, description="Range dimension")


class RieszBesselSpec(BaseModel):
    """Fractional Riesz-Bessel motion with spectral density |λ|^(-2γ) (1+|λ|^2)^(-β)."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["riesz-bessel"] = "riesz-bessel"
    gamma: float = Field(..., gt=0, description="Riesz exponent γ")
    beta: float = Field(..., description="Bessel exponent β")
    N: int = Field(1, ge=1, description="Domain dimension")
    d: int = Field(1, ge=1, description="Range dimension")

    @model_validator(mode="after")
    def _check_exponents(self) -> "RieszBesselSpec":
        if not self.gamma < 1 + self.N / 2:
            raise ValueError(f"need 0 < gamma < 1 + N/2, got gamma={self.gamma}")
        if not self.effective_index > 0:
            raise ValueError(f"need beta + gamma - N/2 > 0, got {self.effective_index}")
        return self

    @property
    def effective_index(self) -> float:
        return self.gamma + self.beta - self.N / 2

    def density(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        return rho ** (-2.0 * self.gamma) * (1.0 + rho ** 2) ** (-self.beta)


class InfinityScaleSpec(BaseModel):
    """Harmonizable field with Hurst index H_j on the dyadic annulus D_j, truncated at j_max."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["infinity-scale"] = "infinity-scale"
    H: Tuple[float, ...] = Field(..., min_length=1, description="Per-annulus indices H_0, H_1, ...")
    j_max: Optional[int] = Field(None, ge=0, description="Last annulus kept (defaults to len(H) - 1)")
    tail_start: int = Field(0, ge=0, description="First index of the stationary tail used for the indices")
    N: int = Field(1, ge=1, description="Domain dimension")
    d: int = Field(1, ge=1, description="Range dimension")

    @model_validator(mode="after")
    def _check_indices(self) -> "InfinityScaleSpec":
        if any(not 0 < h < 1 for h in self.H):
            raise ValueError("every H_j must lie in (0, 1)")
        if self.j_max is not None and self.j_max >= len(self.H):
            raise ValueError(f"j_max={self.j_max} needs {self.j_max + 1} indices, got {len(self.H)}")
        if self.tail_start > self.last_annulus:
            raise ValueError(f"tail_start={self.tail_start} lies beyond the last annulus {self.last_annulus}")
        return self

    @property
    def last_annulus(self) -> int:
        return len(self.H) - 1 if self.j_max is None else self.j_max

    def annulus(self, j: int) -> Tuple[float, float]:
        return (0.0, 1.0) if j == 0 else (2.0 ** (j - 1), 2.0 ** j)

    def density(self, rho: np.ndarray) -> np.ndarray:
        """Piecewise spectral density |λ|^(-2H_j - N); zero beyond the last annulus."""
        rho = np.asarray(rho, dtype=float)
        j = np.where(rho < 1.0, 0, np.floor(np.log2(np.maximum(rho, 1.0))).astype(int) + 1)
        h = np.asarray(self.H, dtype=float)[np.minimum(j, self.last_annulus)]
        out = rho ** (-2.0 * h - self.N)
        return np.where(j > self.last_annulus, 0.0, out)


FieldSpec = Annotated[Union[FbmSpec, RieszBesselSpec, InfinityScaleSpec], Field(discriminator="kind")]


class PowerLawPsi(BaseModel):
    kind: Literal["power-law"] = "power-law"
    alpha: float = Field(..., gt=0, lt=1, description="ψ(r) = r^(2α)")

    def __call__(self, r):
        return np.asarray(r, dtype=float) ** (2.0 * self.alpha)


class DyadicPiecewisePsi(BaseModel):
    """ψ with local exponent H_j between 2^-(j+1) and 2^-j, log-linear in between."""

    kind: Literal["dyadic-piecewise"] = "dyadic-piecewise"
    H: Tuple[float, ...] = Field(..., min_length=1, description="Per-scale indices")
    tail_start: int = Field(0, ge=0, description="Start of the stationary tail")

    @model_validator(mode="after")
    def _check_tail(self) -> "DyadicPiecewisePsi":
        if self.tail_start >= len(self.H):
            raise ValueError(f"tail_start={self.tail_start} leaves no tail in {len(self.H)} indices")
        return self

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        # log2 ψ at the dyadic knots 2^-j, j = 0..len(H)
        knots = np.concatenate([[0.0], -2.0 * np.cumsum(self.H)])
        x = -np.log2(r)
        j = np.clip(np.floor(x).astype(int), 0, len(self.H) - 1)
        frac = x - j
        log_psi = knots[j] - 2.0 * np.asarray(self.H)[j] * frac
        return 2.0 ** log_psi


class TabulatedPsi(BaseModel):
    kind: Literal["tabulated"] = "tabulated"
    log_r: Tuple[float, ...] = Field(..., min_length=2, description="Increasing log r values")
    log_psi: Tuple[float, ...] = Field(..., min_length=2, description="log ψ at each log r")

    @model_validator(mode="after")
    def _check_table(self) -> "TabulatedPsi":
        if len(self.log_r) != len(self.log_psi):
            raise ValueError("log_r and log_psi differ in length")
        if any(b <= a for a, b in zip(self.log_r, self.log_r[1:])):
            raise ValueError("log_r must be strictly increasing")
        if any(b < a for a, b in zip(self.log_psi, self.log_psi[1:])):
            raise ValueError("ψ must be non-decreasing")
        return self

    def __call__(self, r):
        return np.exp(np.interp(np.log(np.asarray(r, dtype=float)), self.log_r, self.log_psi))


PsiModel = Annotated[Union[PowerLawPsi, DyadicPiecewisePsi, TabulatedPsi], Field(discriminator="kind")]


class Grid(BaseModel):
    """Regular lattice origin + spacing * index, index over `shape` in C order."""

    model_config = ConfigDict(frozen=True)

    shape: Tuple[int, ...] = Field(..., min_length=1, description="Points per axis")
    spacing: float = Field(..., gt=0, description="Lattice spacing")
    origin: Tuple[float, ...] = Field((0.0,), description="Coordinates of index (0, ..., 0)")

    @model_validator(mode="after")
    def _check_origin(self) -> "Grid":
        if len(self.origin) != len(self.shape):
            raise ValueError("origin and shape must have the same dimension")
        if any(s < 1 for s in self.shape):
            raise ValueError("every axis needs at least one point")
        return self

    @property
    def N(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def points(self) -> np.ndarray:
        axes = [o + self.spacing * np.arange(n) for o, n in zip(self.origin, self.shape)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


def regular_grid(shape, spacing: float, origin=None) -> Grid:
    shape = (shape,) if isinstance(shape, int) else tuple(shape)
    origin = tuple(origin) if origin is not None else (0.0,) * len(shape)
    return Grid(shape=shape, spacing=spacing, origin=origin)


def unit_grid(resolution: int, N: int = 1) -> Grid:
    """The lattice resolution^-1 Z^N restricted to [0,1)^N."""
    return regular_grid((resolution,) * N, 1.0 / resolution)


class FieldSample(BaseModel):
    """One draw of X on a grid: values[i] is X(grid point i) in R^d."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    grid: Grid
    values: np.ndarray = Field(..., description="Array of shape (grid.size, d)")
    spec: Optional[FieldSpec] = Field(None, description="Law the sample was drawn from; None for synthetic maps")
    seed: Optional[int] = Field(None, description="Seed the sample is a deterministic function of")
    method: str = Field("synthetic", description="Sampler used")
    jitter: float = Field(0.0, description="Diagonal jitter added during factorization")
    notes: List[str] = Field(default_factory=list, description="Sampler remarks (embedding doubled etc.)")

    @model_validator(mode="after")
    def _check_values(self) -> "FieldSample":
        if self.values.ndim != 2 or self.values.shape[0] != self.grid.size:
            raise ValueError(f"values must have shape ({self.grid.size}, d), got {self.values.shape}")
        return self

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def coordinate(self, axis: int = 0) -> np.ndarray:
        """Values of coordinate process `axis`, reshaped to the grid."""
        return self.values[:, axis].reshape(self.grid.shape)

    def metadata(self) -> dict:
        return {
            "spec": self.spec.model_dump() if self.spec is not None else None,
            "method": self.method,
            "seed": self.seed,
            "jitter": self.jitter,
            "grid": self.grid.model_dump(),
            "notes": list(self.notes),
        }
