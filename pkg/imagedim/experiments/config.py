"""JSON configurations for every subcommand, validated with pydantic."""

import hashlib
import logging
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Type, TypeVar

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from imagedim.errors import ConfigError
from imagedim.fields.specs import FieldSpec
from imagedim.measures.io import PathLike, format_validation_error
from imagedim.measures.models import MeasureModel

logger = logging.getLogger(__name__)

ConfigT = TypeVar("ConfigT", bound=BaseModel)


def _power_of(value: int, base: int) -> bool:
    while value > 1 and value % base == 0:
        value //= base
    return value == 1


class ExperimentConfig(BaseModel):
    """Monte Carlo image-dimension experiment."""

    measure: MeasureModel = Field(..., description="Source measure μ on [0,1)^N")
    field: FieldSpec = Field(..., description="Law of the Gaussian field X")
    q: List[float] = Field(..., min_length=1, description="Moment orders, each > 1")
    replicates: int = Field(1, ge=1, description="Independent field samples")
    resolution: int = Field(..., ge=2, description="Grid points per axis on [0,1)^N, a power of the measure base")
    depth: int = Field(..., ge=1, description="Atom depth K used to discretize μ")
    fit: Tuple[int, int] = Field(..., description="Levels k_min..k_max of the image fit, r = 2^-k")
    seed: int = Field(0, ge=0, description="Root seed; replicate seeds are derived from it")
    method: Literal["exact-cholesky", "circulant-1d", "spectral"] = Field("circulant-1d", description="Field sampler")
    estimator: Literal["mesh-moment", "correlation"] = Field("mesh-moment", description="Image curve estimator")
    kind: Literal["lower", "upper", "single-fit"] = Field("single-fit", description="Which proxy is compared")
    tolerance: Optional[float] = Field(None, gt=0, description="Pass band; default 0.10, or 0.20 for a space-filling image")
    holder_tolerance: float = Field(0.05, ge=0, description="Slack of the Hölder upper-bound check")
    out: Optional[str] = Field(None, description="Output directory")

    @field_validator("q")
    @classmethod
    def _q_above_one(cls, q: List[float]) -> List[float]:
        if any(not value > 1 for value in q):
            raise ValueError("every q must exceed 1")
        return q

    @model_validator(mode="after")
    def _check_layout(self) -> "ExperimentConfig":
        if self.field.N != self.measure.N:
            raise ValueError(f"field domain dimension {self.field.N} differs from measure dimension {self.measure.N}")
        if not _power_of(self.resolution, self.measure.m):
            raise ValueError(f"resolution {self.resolution} is not a power of the measure base {self.measure.m}")
        if self.resolution < self.measure.m ** (self.depth + 1):
            raise ValueError(f"resolution {self.resolution} cannot place atom centers of depth {self.depth} on the grid")
        if not 0 <= self.fit[0] < self.fit[1]:
            raise ValueError(f"fit range {self.fit} must be increasing and nonnegative")
        return self

    def fingerprint(self) -> str:
        """sha256 of the result-relevant configuration (output path excluded)."""
        payload = self.model_dump_json(exclude={"out"})
        return hashlib.sha256(payload.encode()).hexdigest()


class SimulateConfig(BaseModel):
    field: FieldSpec = Field(..., description="Law of the field")
    resolution: int = Field(..., ge=2, description="Grid points per axis on [0,1)^N")
    seed: int = Field(0, ge=0, description="Sampler seed")
    method: Literal["exact-cholesky", "circulant-1d", "spectral"] = Field("exact-cholesky", description="Field sampler")
    out: Optional[str] = Field(None, description="Output directory")


class MomentsConfig(BaseModel):
    """Moment curve of a measure, or of its image when a field is given."""

    measure: MeasureModel
    q: float = Field(..., gt=1, description="Moment order")
    levels: List[int] = Field(..., min_length=1, description="Mesh levels k")
    estimator: Literal["mesh-moment", "correlation"] = Field("mesh-moment", description="Curve kind")
    depth: Optional[int] = Field(None, ge=1, description="Discretization depth for non-atomic measures")
    field: Optional[FieldSpec] = Field(None, description="Push the measure forward under a sample of this law")
    resolution: Optional[int] = Field(None, ge=2, description="Field grid points per axis")
    method: Literal["exact-cholesky", "circulant-1d", "spectral"] = Field("circulant-1d", description="Field sampler")
    seed: int = Field(0, ge=0, description="Field seed")
    out: Optional[str] = Field(None, description="Output directory")

    @model_validator(mode="after")
    def _check_image_inputs(self) -> "MomentsConfig":
        if self.field is not None and (self.resolution is None or self.depth is None):
            raise ValueError("image curves need both resolution and depth")
        return self


class EstimateConfig(BaseModel):
    curve: str = Field(..., description="Path of a k, r, value curve CSV")
    q: float = Field(..., gt=1, description="Moment order of the curve")
    curve_kind: Literal["mesh-moment", "correlation"] = Field("mesh-moment", description="Kind of the curve")
    fit: Tuple[int, int] = Field(..., description="Fit range k_min..k_max")
    kind: Literal["lower", "upper", "single-fit"] = Field("single-fit", description="Reported proxy")
    out: Optional[str] = Field(None, description="Output directory")


class UltrametricSuiteConfig(BaseModel):
    pairs: int = Field(100_000, ge=1, description="Random pairs for the lower bound, checked against every translate")
    triples: int = Field(10_000, ge=1, description="Random triples for the ultrametric inequality")
    exception_pairs: int = Field(10_000, ge=1, description="Random pairs per (m, N) for exception counting")
    sets: int = Field(10_000, ge=1, description="Random n-point sets per (n, N) for translate selection")
    m_values: List[int] = Field([4, 6, 10], description="Even bases for exception counting")
    dimensions: List[int] = Field([1, 2], description="Domain dimensions N")
    max_points: int = Field(3, ge=1, description="Largest n for translate selection")
    seed: int = Field(0, ge=0)
    out: Optional[str] = None


class TreeSuiteConfig(BaseModel):
    M: int = Field(2, ge=2, description="Branching number")
    max_depth: int = Field(4, ge=1, description="Largest depth K of the exhaustive grid")
    ns: List[int] = Field([1, 2, 3], description="Tuple sizes n")
    qs: List[float] = Field([2.0, 2.5, 3.0, 3.5], description="Moment orders q")
    measures: int = Field(100, ge=1, description="Random tree measures per cell")
    concentration: float = Field(1.0, gt=0, description="Dirichlet concentration of the random cascades")
    count_max_level: int = Field(6, ge=0, description="Largest level in count_level_configs")
    count_max_n: int = Field(4, ge=1, description="Largest n in count_level_configs")
    series_lam: float = Field(0.5, gt=0, lt=1, description="λ of the level-sum series")
    series_max_n: int = Field(3, ge=1)
    series_max_level: int = Field(6, ge=0)
    convergence_weights: List[float] = Field([0.7, 0.3], description="Multinomial weights for partial_J")
    convergence_q: float = Field(1.5, gt=1)
    convergence_n: int = Field(1, ge=1)
    convergence_exponent: float = Field(0.2, description="f(l) = 2^(exponent * l)")
    convergence_depths: Tuple[int, int] = Field((6, 14), description="Depth range K for partial_J")
    seed: int = Field(0, ge=0)
    out: Optional[str] = None


class SmallBallConfig(BaseModel):
    field: FieldSpec
    points: List[List[float]] = Field(..., min_length=1, max_length=3, description="x_1..x_n in [0,1/2)^N")
    y: List[float] = Field(..., description="Target point y in [0,1/2)^N")
    radii: List[float] = Field(..., min_length=3, description="Radii r")
    s: List[float] = Field([0.5, 0.9], description="Exponents s in (0, d]")
    replicates: int = Field(1_000_000, ge=100)
    tolerance: float = Field(0.1, gt=0)
    seed: int = Field(0, ge=0)
    fidelity: bool = Field(True, description="Also run the Gaussian-field fidelity checks")
    fidelity_replicates: int = Field(10_000, ge=10)
    fidelity_alphas: List[float] = Field([0.3, 0.5, 0.8])
    variogram_resolution: int = Field(256, ge=16, description="Grid points of the variogram samples")
    variogram_replicates: int = Field(400, ge=2)
    variogram_band: float = Field(3.0, gt=0, description="Allowed deviation in standard errors")
    sln_min_ratio: float = Field(0.2, gt=0, description="Required minimum of the nondeterminism ratio")
    out: Optional[str] = None


def load_config(path: PathLike, model: Type[ConfigT]) -> ConfigT:
    """Validate a JSON file against `model`; errors name the path or the offending key."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}", path=str(path))
    try:
        config = model.model_validate_json(path.read_text())
    except ValidationError as exc:
        where = format_validation_error(exc)
        raise ConfigError(f"{path}: invalid value at '{where}': {exc.errors()[0]['msg']}", path=where) from exc
    logger.debug(f"Loaded {model.__name__} from {path}")
    return config
