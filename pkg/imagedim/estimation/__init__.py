"""Image measures under sampled fields and q-dimension estimates."""

from imagedim.estimation.estimator import DimensionEstimate, OriginInvariance, estimate_dq, origin_invariance
from imagedim.estimation.holder import HolderReport, holder_upper_check
from imagedim.estimation.image import (
    ImageMeasure,
    image_correlation_curve,
    image_measure,
    image_moment_curve,
    merge_coincident,
)

__all__ = [
    "DimensionEstimate",
    "HolderReport",
    "ImageMeasure",
    "OriginInvariance",
    "estimate_dq",
    "holder_upper_check",
    "image_correlation_curve",
    "image_measure",
    "image_moment_curve",
    "merge_coincident",
    "origin_invariance",
]
