"""Log-log slope estimates of lower and upper generalized q-dimensions."""

import logging
from typing import List, Literal, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field
from scipy import stats

from imagedim.errors import InvalidParameterError, ResolutionError
from imagedim.estimation.image import ImageMeasure, image_moment_curve
from imagedim.measures.models import MomentCurve

logger = logging.getLogger(__name__)

WINDOW = 4


class DimensionEstimate(BaseModel):
    """Least-squares slope of log M(r) against (q-1) log r, with 4-point window extremes."""

    q: float = Field(..., description="Moment order")
    slope: float = Field(..., description="Single-fit slope over the whole range")
    stderr: float = Field(..., description="Standard error of the single-fit slope")
    k_min: int = Field(..., description="Coarsest level in the fit")
    k_max: int = Field(..., description="Finest level in the fit")
    kind: Literal["lower", "upper", "single-fit"] = Field("single-fit", description="Which proxy `value` reports")
    window_min: float = Field(..., description="Smallest slope over sliding 4-point windows (liminf proxy)")
    window_max: float = Field(..., description="Largest slope over sliding 4-point windows (limsup proxy)")
    curve_kind: str = Field("mesh-moment", description="Kind of the fitted curve")

    @property
    def value(self) -> float:
        if self.kind == "lower":
            return self.window_min
        if self.kind == "upper":
            return self.window_max
        return self.slope

    def within_ambient(self, ambient: int, tolerance: float = 0.0) -> bool:
        return -tolerance <= self.slope <= ambient + tolerance


def _fit(x: np.ndarray, y: np.ndarray) -> Tuple[float, float]:
    result = stats.linregress(x, y)
    return float(result.slope), float(result.stderr)


def estimate_dq(curve: MomentCurve, fit: Tuple[int, int], kind: str = "single-fit") -> DimensionEstimate:
    k_min, k_max = fit
    levels, scales, values = curve.arrays()
    keep = (levels >= k_min) & (levels <= k_max)
    if keep.sum() < WINDOW:
        raise InvalidParameterError(f"fit range {fit} holds {int(keep.sum())} points, need {WINDOW}")
    if np.any(values[keep] <= 0):
        raise ResolutionError(f"zero moment inside fit range {fit}: scale finer than the atom resolution")
    x = (curve.q - 1.0) * np.log(scales[keep])
    y = np.log(values[keep])
    slope, stderr = _fit(x, y)
    windows = [_fit(x[i:i + WINDOW], y[i:i + WINDOW])[0] for i in range(len(x) - WINDOW + 1)]
    return DimensionEstimate(
        q=curve.q,
        slope=slope,
        stderr=stderr,
        k_min=int(levels[keep].min()),
        k_max=int(levels[keep].max()),
        kind=kind,
        window_min=min(windows),
        window_max=max(windows),
        curve_kind=curve.kind,
    )


class OriginInvariance(BaseModel):
    slopes: List[float] = Field(..., description="Slope per mesh origin, default origin first")
    stderrs: List[float] = Field(..., description="Standard error per slope")
    max_deviation: float = Field(..., description="Largest |slope - slope at the default origin|")


def origin_invariance(
    im: ImageMeasure, q: float, levels: Sequence[int], fit: Tuple[int, int], origins: int = 5, m: int = 2, seed: int = 0
) -> OriginInvariance:
    """Refit the image moment curve with the mesh shifted to random origins below the atoms."""
    rng = np.random.default_rng(seed)
    base = im.points.min(axis=0)
    anchors = [base] + [base - rng.uniform(0.0, 1.0, size=im.d) for _ in range(origins)]
    estimates = [estimate_dq(image_moment_curve(im, q, levels, m, origin=a), fit) for a in anchors]
    slopes = [e.slope for e in estimates]
    return OriginInvariance(
        slopes=slopes,
        stderrs=[e.stderr for e in estimates],
        max_deviation=max(abs(s - slopes[0]) for s in slopes),
    )
