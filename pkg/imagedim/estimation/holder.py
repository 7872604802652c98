"""Hölder-type upper bound D_q(μ_X) <= min{d, D_q(μ)/α}."""

from typing import Union

from pydantic import BaseModel, Field

from imagedim.errors import InvalidParameterError
from imagedim.estimation.estimator import DimensionEstimate


class HolderReport(BaseModel):
    bound: float = Field(..., description="min{d, source / α}")
    image: float = Field(..., description="Estimated image dimension")
    source: float = Field(..., description="Source dimension used for the bound")
    margin: float = Field(..., description="bound + tolerance - image")
    holds: bool


def holder_upper_check(
    estimate_image: Union[DimensionEstimate, float],
    estimate_source: Union[DimensionEstimate, float],
    alpha: float,
    d: int,
    tolerance: float = 0.05,
) -> HolderReport:
    if not alpha > 0:
        raise InvalidParameterError(f"Hölder exponent must be positive, got {alpha}")
    if isinstance(estimate_image, DimensionEstimate) and isinstance(estimate_source, DimensionEstimate):
        if estimate_image.q != estimate_source.q:
            raise InvalidParameterError(f"q differs: image {estimate_image.q}, source {estimate_source.q}")
    image = estimate_image.value if isinstance(estimate_image, DimensionEstimate) else float(estimate_image)
    source = estimate_source.value if isinstance(estimate_source, DimensionEstimate) else float(estimate_source)
    bound = min(float(d), source / alpha)
    margin = bound + tolerance - image
    return HolderReport(bound=bound, image=image, source=source, margin=margin, holds=margin >= 0)
