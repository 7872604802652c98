"""Translated m-adic ultrametrics and good-translate selection."""

from imagedim.ultrametric.translates import (
    CubeAgreement,
    SnappedPoint,
    UltrametricId,
    agreement_level,
    d_a,
    default_depth,
    exception_bound,
    exception_count,
    join_cubes,
    join_levels_a,
    lower_bound_check,
    phi_a,
    select_translate,
    snap,
    translate_family,
)

__all__ = [
    "CubeAgreement",
    "SnappedPoint",
    "UltrametricId",
    "agreement_level",
    "d_a",
    "default_depth",
    "exception_bound",
    "exception_count",
    "join_cubes",
    "join_levels_a",
    "lower_bound_check",
    "phi_a",
    "select_translate",
    "snap",
    "translate_family",
]
